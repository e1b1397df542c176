#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "polyqs/approximation.hpp"
#include "polyqs/complex.hpp"
#include "polyqs/finite_metric.hpp"
#include "polyqs/glue.hpp"
#include "polyqs/modulus.hpp"
#include "polyqs/pipeline.hpp"

namespace polyqs {

// Insertion-ordered, so emitted documents have a fixed key order.
using Json = nlohmann::ordered_json;

// Canonical text: two-space indent, numbers with 17 significant digits,
// non-finite numbers as null. Identical values give identical bytes.
std::string dump(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// {"points": [ids], "dist": [[row], ...]}
Json metric_to_json(const FiniteMetric& m);
FiniteMetric metric_from_json(const Json& j);

// [[i, f(i)], ...]; every source index in [0, n) must appear exactly once.
Json map_to_json(const PointMap& f);
PointMap map_from_json(const Json& j, std::size_t n);

// {"vertices": [ids], "triangles": [[v1, v2, v3, l12, l23, l31]], "embedding": [[x, y, z]]}
// (embedding optional). Triangles refer to vertices by index.
Json complex_to_json(const MetricComplex& c);
MetricComplex complex_from_json(const Json& j, BuildOptions opts = {});

// Wavefront OBJ of an embedded complex: triangles only, 1-based indices.
// Throws PreconditionError when the complex has no embedding.
std::string complex_to_obj(const MetricComplex& c);

// {"adjacency": [[u, v]], "p": {v: point}, "r": {v: real}, "U": {v: [points]}}
Json approximation_to_json(const Approximation& a);
Approximation approximation_from_json(const Json& j);

// {"E": [nodes], "F": [nodes], "G": [nodes] | "all"}
Json family_to_json(const CurveFamily& fam);
CurveFamily family_from_json(const Json& j);

// A FiniteMetric document with the glued subset as a sub-object:
// {"points", "dist", "subset": {"indices": [...], "points": [...], "dist": [[...]]}}
struct GlueInput {
  FiniteMetric base;
  std::vector<int> S;
  FiniteMetric d_S;
};
GlueInput glue_input_from_json(const Json& j);
Json glue_input_to_json(const GlueInput& in);

// {op, inputs, result, witnesses, tolerances}
Json make_report(const std::string& op, Json inputs, Json result, Json witnesses, Json tolerances);

Json to_json(const MetricCheck& c);
Json to_json(const AxiomResult& r);
Json to_json(const AxiomReport& r);
Json to_json(const QCCertificate& c);
Json to_json(const DistortionProfile& p);
Json to_json(const EpsIsometryCert& c);
Json to_json(const GlueReport& r);
// {value, lower, upper, iterations, sweeps, certificate, empty, rho_stats}
Json to_json(const ModulusResult& r);
Json to_json(const AnnulusReport& r);

}  // namespace polyqs
