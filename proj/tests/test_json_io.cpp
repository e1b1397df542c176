#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "polyqs/constructions.hpp"
#include "polyqs/errors.hpp"
#include "polyqs/json_io.hpp"

using namespace polyqs;

TEST_CASE("dump is canonical with 17 significant digits") {
  Json j;
  j["b"] = 0.1;
  j["a"] = Json::array({1, 2.5, -3});
  j["nested"] = Json::array({Json::array({1, 2}), Json::object()});
  j["inf"] = std::numeric_limits<double>::infinity();
  j["text"] = "q\"uote";
  const std::string s = dump(j);
  CHECK(s ==
        "{\n"
        "  \"b\": 0.10000000000000001,\n"
        "  \"a\": [1, 2.5, -3],\n"
        "  \"nested\": [\n"
        "    [1, 2],\n"
        "    {}\n"
        "  ],\n"
        "  \"inf\": null,\n"
        "  \"text\": \"q\\\"uote\"\n"
        "}\n");
  // Every double survives the text round trip bit for bit.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng) * std::pow(10.0, int(rng() % 20) - 10);
    const Json back = Json::parse(dump(Json(x)));
    CHECK(back.get<double>() == x);
  }
}

TEST_CASE("finite metric round trip and validation") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const FiniteMetric m = oracle::random_graph_metric(rng, 2 + rng() % 12);
    const FiniteMetric back = metric_from_json(Json::parse(dump(metric_to_json(m))));
    CHECK(back.points == m.points);
    CHECK(back.dist == m.dist);
  }
  CHECK_THROWS_AS(metric_from_json(Json::parse(R"({"points": ["a", "b"], "dist": [[0, 1]]})")), InputError);
  CHECK_THROWS_AS(metric_from_json(Json::parse(R"({"points": ["a"], "dist": [["x"]]})")), InputError);
  CHECK_THROWS_AS(metric_from_json(Json::parse(R"({"dist": [[0]]})")), InputError);
  CHECK_THROWS_AS(metric_from_json(Json::parse(R"({"points": ["a", "b"], "dist": [[0, -1], [-1, 0]]})")),
                  InputError);
  // Numeric ids are kept as their text.
  CHECK(metric_from_json(Json::parse(R"({"points": [7], "dist": [[0]]})")).points[0] == "7");
}

TEST_CASE("point maps are index pairs") {
  const PointMap f = {2, 0, 1};
  const Json j = map_to_json(f);
  CHECK(j == Json::parse("[[0, 2], [1, 0], [2, 1]]"));
  CHECK(map_from_json(Json::parse("[[2, 1], [0, 2], [1, 0]]"), 3) == f);
  CHECK_THROWS_AS(map_from_json(Json::parse("[[0, 1], [0, 2]]"), 2), InputError);
  CHECK_THROWS_AS(map_from_json(Json::parse("[[0, 1]]"), 2), InputError);
  CHECK_THROWS_AS(map_from_json(Json::parse("[[5, 1]]"), 2), InputError);
  CHECK_THROWS_AS(map_from_json(Json::parse("[[0]]"), 1), InputError);
}

TEST_CASE("complex round trip and OBJ export") {
  const MetricComplex c = snowsphere(1).complex;
  const MetricComplex back = complex_from_json(Json::parse(dump(complex_to_json(c))));
  REQUIRE(back.triangles.size() == c.triangles.size());
  CHECK(back.vertices == c.vertices);
  CHECK(back.embedding == c.embedding);
  for (std::size_t t = 0; t < c.triangles.size(); ++t) {
    CHECK(back.triangles[t].v == c.triangles[t].v);
    CHECK(back.triangles[t].len == c.triangles[t].len);
  }

  const MetricComplex torus = flat_torus(3, 1.0);
  const Json tj = complex_to_json(torus);
  CHECK_FALSE(tj.contains("embedding"));
  CHECK_THROWS_AS(complex_to_obj(torus), PreconditionError);

  // Triangles may name vertices by id.
  const MetricComplex named = complex_from_json(Json::parse(
      R"({"vertices": ["a", "b", "c"], "triangles": [["a", "b", "c", 1, 1, 1]]})"));
  CHECK(named.triangles[0].v == std::array<int, 3>{0, 1, 2});
  CHECK_THROWS_AS(complex_from_json(Json::parse(R"({"vertices": ["a"], "triangles": [["a", "z", "a", 1, 1, 1]]})")),
                  InputError);
  CHECK_THROWS_AS(complex_from_json(Json::parse(R"({"vertices": [0, 1, 2], "triangles": [[0, 1, 2, 1, 1]]})")),
                  InputError);
  CHECK_THROWS_AS(complex_from_json(Json::parse(R"({"vertices": [0, 1, 2], "triangles": [[0, 1, 2, 1, 1, 5]]})")),
                  InputError);

  const MetricComplex sq = rectangle_mesh(1, 1, 1, 1);
  const std::string obj = complex_to_obj(sq);
  std::istringstream in(obj);
  std::string tag;
  int v = 0, f = 0;
  for (std::string line; std::getline(in, line);) {
    std::istringstream ls(line);
    ls >> tag;
    if (tag == "v") ++v;
    if (tag == "f") {
      ++f;
      int a, b, cc;
      ls >> a >> b >> cc;
      for (int x : {a, b, cc}) CHECK((x >= 1 && x <= 4));
    }
  }
  CHECK(v == 4);
  CHECK(f == 2);
}

TEST_CASE("approximation round trip") {
  const MetricComplex c = flat_grid(4, 1.0);
  const MeshGraph g = mesh_graph(c, 2);
  const Approximation a = skeleton_approximation(c, g);
  const Json j = approximation_to_json(a);
  CHECK(j.begin().key() == "adjacency");
  const Approximation back = approximation_from_json(Json::parse(dump(j)));
  CHECK(back.adjacency == a.adjacency);
  CHECK(back.p == a.p);
  CHECK(back.r == a.r);
  CHECK(back.U == a.U);

  CHECK_THROWS_AS(approximation_from_json(Json::parse(
                      R"({"adjacency": [], "p": {"0": 0, "2": 1}, "r": {"0": 1, "2": 1}, "U": {"0": [0], "2": [1]}})")),
                  InputError);
  CHECK_THROWS_AS(approximation_from_json(Json::parse(
                      R"({"adjacency": [[0, 0]], "p": {"0": 0}, "r": {"0": 1}, "U": {"0": [0]}})")),
                  InputError);
  CHECK_THROWS_AS(approximation_from_json(Json::parse(R"({"p": {}, "r": {}, "U": {}})")), InputError);
}

TEST_CASE("curve families and glue input") {
  const CurveFamily all = family_from_json(Json::parse(R"({"E": [0, 1], "F": [5], "G": "all"})"));
  CHECK(all.G.empty());
  CHECK(family_to_json(all)["G"] == "all");
  const CurveFamily some = family_from_json(Json::parse(R"({"E": [0], "F": [5], "G": [0, 3, 5]})"));
  CHECK(some.G == std::vector<int>{0, 3, 5});
  CHECK(family_from_json(family_to_json(some)).G == some.G);
  CHECK(family_from_json(Json::parse(R"({"E": [0], "F": [5]})")).G.empty());
  CHECK_THROWS_AS(family_from_json(Json::parse(R"({"E": [0], "F": [5], "G": "some"})")), InputError);
  CHECK_THROWS_AS(family_from_json(Json::parse(R"({"E": [0], "F": [5], "G": []})")), InputError);
  CHECK_THROWS_AS(family_from_json(Json::parse(R"({"E": [0.5], "F": [5]})")), InputError);

  std::mt19937_64 rng(2);
  GlueInput in;
  in.base = oracle::random_graph_metric(rng, 6);
  in.S = {1, 4};
  in.d_S = in.base.restrict_to(in.S);
  const GlueInput back = glue_input_from_json(Json::parse(dump(glue_input_to_json(in))));
  CHECK(back.S == in.S);
  CHECK(back.base.dist == in.base.dist);
  CHECK(back.d_S.dist == in.d_S.dist);
}

TEST_CASE("reports carry the five fields in order") {
  Json inputs;
  inputs["seed"] = 1;
  const Json r = make_report("verify", inputs, Json::object(), Json::array(), Json::object());
  std::vector<std::string> keys;
  for (auto it = r.begin(); it != r.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"op", "inputs", "result", "witnesses", "tolerances"});

  ModulusResult m;
  m.value = 2;
  m.rho.rho = {0, 1, 3};
  m.rho.energy = 2;
  const Json mj = to_json(m);
  CHECK(mj["rho_stats"]["max"] == 3.0);
  CHECK(mj["rho_stats"]["support"] == 2);
  CHECK(mj.contains("iterations"));
  CHECK(mj.contains("certificate"));

  AxiomReport ar;
  ar.A4.pass = false;
  const Json aj = to_json(ar);
  CHECK(aj["axioms_pass"] == false);
  CHECK(aj["axioms"]["A4"]["pass"] == false);
}
