#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "polyqs/constructions.hpp"
#include "polyqs/json_io.hpp"

using namespace polyqs;
namespace fs = std::filesystem;

namespace {

// Scratch directory for one test case, removed afterwards.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("polyqs_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const Scratch& s) {
  const std::string out = s / "stdout.txt";
  const std::string cmd = std::string(POLYQS_CLI) + " " + args + " > " + out + " 2> " + (s / "stderr.txt");
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream buf;
  buf << in.rdbuf();
  r.out = buf.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write(const std::string& path, const Json& j) { write_text_file(path, dump(j)); }

// Euclidean distances between the embedded vertices of a planar complex.
FiniteMetric vertex_euclidean(const MetricComplex& c) {
  std::vector<std::vector<double>> pts;
  for (const auto& p : c.embedding) pts.push_back({p[0], p[1], p[2]});
  FiniteMetric m = oracle::euclidean(pts);
  m.points = c.vertices;
  return m;
}

}  // namespace

TEST_CASE("cli snowsphere and export-obj") {
  Scratch s("snow");
  Run r = run("snowsphere 0 --out " + (s / "o"), s);
  CHECK(r.code == 0);
  CHECK(read_json_file(s / "o/snowsphere_0_report.json")["result"]["triangles"] == 12);
  r = run("snowsphere 1 --out " + (s / "o"), s);
  CHECK(r.code == 0);
  const Json rep = read_json_file(s / "o/snowsphere_1_report.json");
  CHECK(rep["op"] == "snowsphere");
  CHECK(rep["result"]["triangles"] == 156);
  CHECK(r.out.find("156 triangles") != std::string::npos);
  CHECK(run("snowsphere 5 --out " + (s / "o"), s).code == 2);

  r = run("export-obj " + (s / "o/snowsphere_1.json"), s);
  CHECK(r.code == 0);
  CHECK(r.out == slurp(s / "o/snowsphere_1.obj"));
  int faces = 0;
  std::istringstream in(r.out);
  for (std::string line; std::getline(in, line);) faces += line.rfind("f ", 0) == 0;
  CHECK(faces == 156);

  write(s / "torus.json", complex_to_json(flat_torus(3, 1.0)));
  CHECK(run("export-obj " + (s / "torus.json"), s).code == 2);
}

TEST_CASE("cli verify on the flat grid skeleton") {
  Scratch s("verify");
  write(s / "grid.json", complex_to_json(flat_grid(6, 1.0)));
  Run r = run("verify " + (s / "grid.json") + " --mesh-level 2 --out " + (s / "v.json"), s);
  CHECK(r.code == 0);
  const Json rep = read_json_file(s / "v.json");
  CHECK(rep["result"]["axioms_pass"] == true);
  const double L = rep["inputs"]["L"].get<double>();

  // Half the certified L: the cover axiom reports a witness.
  r = run("verify " + (s / "grid.json") + " --mesh-level 2 -L " + std::to_string(L / 2) + " --out " + (s / "h.json"), s);
  CHECK(r.code == 1);
  const Json half = read_json_file(s / "h.json");
  CHECK(half["result"]["axioms_pass"] == false);
  CHECK(half["witnesses"].contains("A2_cover"));
  CHECK_FALSE(half["witnesses"]["A2_cover"]["witness"].empty());
}

TEST_CASE("cli modulus rectangle fixture") {
  Scratch s("modulus");
  write(s / "rect.json", complex_to_json(rectangle_mesh(3, 1, 3, 1)));
  const std::string base = "modulus " + (s / "rect.json") + " --mesh-level 8 --crossing 0";
  Run r = run(base + " --expect 0.3333333333333333 --out " + (s / "a.json"), s);
  CHECK(r.code == 0);
  const Json rep = read_json_file(s / "a.json");
  CHECK(rep["result"]["value"].get<double>() == doctest::Approx(1.0 / 3).epsilon(0.10));
  CHECK(rep["result"]["certificate"].get<double>() >= 1 - 1e-6);
  CHECK(rep["result"].contains("rho_stats"));

  // Byte-identical reports for identical runs.
  CHECK(run(base + " --expect 0.3333333333333333 --out " + (s / "b.json"), s).code == 0);
  CHECK(slurp(s / "a.json") == slurp(s / "b.json"));

  CHECK(run(base + " --expect 1", s).code == 1);
  CHECK(run(base + " --max-paths 1", s).code == 3);
  CHECK(run("modulus " + (s / "rect.json") + " --mesh-level 8", s).code == 2);

  // Explicit family over mesh nodes; E and F overlap is an input error.
  write(s / "fam.json", Json::parse(R"({"E": [0], "F": [1], "G": "all"})"));
  CHECK(run("modulus " + (s / "rect.json") + " --mesh-level 2 --family " + (s / "fam.json"), s).code == 0);
  write(s / "bad.json", Json::parse(R"({"E": [0], "F": [0]})"));
  CHECK(run("modulus " + (s / "rect.json") + " --mesh-level 2 --family " + (s / "bad.json"), s).code == 2);

  r = run("modulus " + (s / "rect.json") + " --mesh-level 2 --annulus 2 --centers 2 --scales 1 --seed 4", s);
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["result"]["samples"].size() == 2);
}

TEST_CASE("cli distortion and glue") {
  Scratch s("distortion");
  std::mt19937_64 rng(21);
  const FiniteMetric m = oracle::random_graph_metric(rng, 12);
  write(s / "m.json", metric_to_json(m));
  Run r = run("distortion " + (s / "m.json") + " --seed 3", s);
  CHECK(r.code == 0);
  const Json rep = Json::parse(r.out);
  for (const auto& pt : rep["result"]["profile"]["samples"])
    CHECK(pt[1].get<double>() <= pt[0].get<double>() * (1 + 1e-9));
  CHECK(rep["result"]["bilip"] == 1.0);

  // Scaling by 2 through an explicit map.
  FiniteMetric twice = m;
  for (double& d : twice.dist) d *= 2;
  write(s / "twice.json", metric_to_json(twice));
  PointMap id(m.size());
  for (std::size_t i = 0; i < id.size(); ++i) id[i] = int(i);
  write(s / "id.json", map_to_json(id));
  CHECK(run("distortion " + (s / "m.json") + " " + (s / "twice.json") + " --map " + (s / "id.json"), s).code == 0);
  write(s / "short.json", Json::parse("[[0, 0]]"));
  CHECK(run("distortion " + (s / "m.json") + " --map " + (s / "short.json"), s).code == 2);

  GlueInput in;
  in.base = m;
  in.S = {0, 3, 7};
  in.d_S = m.restrict_to(in.S);
  for (double& d : in.d_S.dist) d *= 0.5;
  write(s / "glue.json", glue_input_to_json(in));
  r = run("glue " + (s / "glue.json") + " --result " + (s / "glued.json"), s);
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["result"]["pass"] == true);
  const FiniteMetric glued = metric_from_json(read_json_file(s / "glued.json"));
  CHECK(glued(0, 3) == in.d_S(0, 1));

  for (double& d : in.d_S.dist) d *= 4;  // now above d_Y on S
  write(s / "bad.json", glue_input_to_json(in));
  CHECK(run("glue " + (s / "bad.json"), s).code == 2);
}

TEST_CASE("cli approximate: self-approximation and bad input") {
  Scratch s("approx");
  const MetricComplex Z = flat_grid(3, 1.0);
  write(s / "Z.json", complex_to_json(Z));
  write(s / "target.json", metric_to_json(vertex_euclidean(Z)));
  write(s / "bundle.json", Json::parse(R"({"complex": "Z.json", "target": "target.json", "mesh_level": 2})"));
  Run r = run("approximate " + (s / "bundle.json") + " --out " + (s / "out"), s);
  CHECK(r.code == 0);
  const Json rep = read_json_file(s / "out/report.json");
  CHECK(rep["result"]["pass"] == true);
  CHECK(rep["result"]["dtilde_is_dS"] == true);
  CHECK(rep["result"]["alpha"].get<double>() == doctest::Approx(1.0));
  CHECK(rep["result"]["eps_isometry"]["eps"].get<double>() <= 4 / std::sqrt(3.0) + 1e-9);
  CHECK(fs::exists(s / "out/d_tilde.json"));
  CHECK(metric_from_json(read_json_file(s / "out/d_tilde.json")).size() == Z.vertex_count() + Z.triangles.size());

  // Target indexed inconsistently with the complex.
  write(s / "small.json", metric_to_json(vertex_euclidean(flat_grid(2, 1.0))));
  write(s / "bad.json", Json::parse(R"({"complex": "Z.json", "target": "small.json"})"));
  CHECK(run("approximate " + (s / "bad.json") + " --out " + (s / "out2"), s).code == 2);
  write(s / "broken.json", "{ not json");
  CHECK(run("approximate " + (s / "broken.json"), s).code == 2);
  CHECK(run("", s).code == 2);
}
