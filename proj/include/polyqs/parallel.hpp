#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace polyqs {

// Upper bound on worker threads used by library loops. 0 means hardware concurrency.
void set_thread_limit(unsigned n);
unsigned thread_limit();

// Runs body(i) for i in [0, n). Each index is handled exactly once; callers write
// results into per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Stateless 64-bit mixer; used to derive per-item random streams from a seed so
// sampled results do not depend on evaluation order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace polyqs
