#include "polyqs/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "polyqs/errors.hpp"

namespace polyqs {

namespace {

bool scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

void write(std::string& out, const Json& j, int depth) {
  const std::string pad(2 * depth + 2, ' '), close(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        break;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out += buf;
      break;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      // Rows of scalars stay on one line; nested structure is indented.
      const bool flat = std::all_of(j.begin(), j.end(), scalar);
      out += flat ? "[" : "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (!flat) out += pad;
        write(out, j[i], depth + 1);
        if (i + 1 < j.size()) out += flat ? ", " : ",\n";
      }
      out += flat ? "]" : "\n" + close + "]";
      break;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad + Json(it.key()).dump() + ": ";
        write(out, it.value(), depth + 1);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      out += close + "}";
      break;
    }
    default:
      out += j.dump();
  }
}

// Converts nlohmann's type and range errors into InputError with context.
template <class F>
auto parse(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

const Json& field(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string(what) + ": missing \"" + key + "\"");
  return j.at(key);
}

std::vector<int> index_list(const Json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array of indices");
  std::vector<int> out;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw InputError(std::string(what) + " must hold integers");
    out.push_back(x.get<int>());
  }
  return out;
}

int vertex_key(const std::string& key, std::size_t n, const char* what) {
  std::size_t used = 0;
  int v = -1;
  try {
    v = std::stoi(key, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != key.size() || v < 0 || std::size_t(v) >= n)
    throw InputError(std::string(what) + ": bad vertex key \"" + key + "\"");
  return v;
}

Json witness_json(const std::vector<int>& w) { return Json(w); }

}  // namespace

std::string dump(const Json& j) {
  std::string out;
  write(out, j, 0);
  out += "\n";
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("write failed: " + path);
}

Json metric_to_json(const FiniteMetric& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.size(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  Json j;
  j["points"] = m.points;
  j["dist"] = std::move(rows);
  return j;
}

FiniteMetric metric_from_json(const Json& j) {
  return parse("metric", [&] {
    const Json& pts = field(j, "points", "metric");
    const Json& rows = field(j, "dist", "metric");
    if (!pts.is_array() || !rows.is_array()) throw InputError("metric: points and dist must be arrays");
    std::vector<std::string> ids;
    for (const auto& p : pts) ids.push_back(p.is_string() ? p.get<std::string>() : p.dump());
    const std::size_t n = ids.size();
    if (rows.size() != n) throw InputError("metric: dist must have one row per point");
    std::vector<double> dist;
    dist.reserve(n * n);
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != n) throw InputError("metric: dist rows must have one entry per point");
      for (const auto& x : row) {
        if (!x.is_number()) throw InputError("metric: distances must be numbers");
        dist.push_back(x.get<double>());
      }
    }
    FiniteMetric m(std::move(ids), std::move(dist));
    validate_matrix(m);
    return m;
  });
}

Json map_to_json(const PointMap& f) {
  Json j = Json::array();
  for (std::size_t i = 0; i < f.size(); ++i) j.push_back(Json::array({int(i), f[i]}));
  return j;
}

PointMap map_from_json(const Json& j, std::size_t n) {
  return parse("map", [&] {
    if (!j.is_array()) throw InputError("map must be an array of index pairs");
    PointMap f(n, -1);
    for (const auto& pr : j) {
      if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number_integer() || !pr[1].is_number_integer())
        throw InputError("map entries must be [source, image] integer pairs");
      const int i = pr[0].get<int>();
      if (i < 0 || std::size_t(i) >= n) throw InputError("map source index out of range");
      if (f[i] != -1) throw InputError("map source index repeated");
      f[i] = pr[1].get<int>();
    }
    for (int x : f)
      if (x == -1) throw InputError("map must cover every source index");
    return f;
  });
}

Json complex_to_json(const MetricComplex& c) {
  Json j;
  j["vertices"] = c.vertices;
  Json tris = Json::array();
  for (const auto& t : c.triangles) tris.push_back(Json::array({t.v[0], t.v[1], t.v[2], t.len[0], t.len[1], t.len[2]}));
  j["triangles"] = std::move(tris);
  if (c.has_embedding()) {
    Json emb = Json::array();
    for (const auto& p : c.embedding) emb.push_back(Json::array({p[0], p[1], p[2]}));
    j["embedding"] = std::move(emb);
  }
  return j;
}

MetricComplex complex_from_json(const Json& j, BuildOptions opts) {
  return parse("complex", [&] {
    const Json& verts = field(j, "vertices", "complex");
    const Json& tris = field(j, "triangles", "complex");
    if (!verts.is_array() || !tris.is_array()) throw InputError("complex: vertices and triangles must be arrays");
    std::vector<std::string> ids;
    std::map<std::string, int> lookup;
    for (const auto& v : verts) {
      ids.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      lookup.emplace(ids.back(), int(ids.size()) - 1);
    }
    std::vector<Triangle> ts;
    for (const auto& t : tris) {
      if (!t.is_array() || t.size() != 6) throw InputError("complex: triangles are [v1, v2, v3, l12, l23, l31]");
      Triangle tr;
      for (int k = 0; k < 3; ++k) {
        if (t[k].is_number_integer()) {
          tr.v[k] = t[k].get<int>();
        } else if (t[k].is_string() && lookup.count(t[k].get<std::string>())) {
          tr.v[k] = lookup.at(t[k].get<std::string>());
        } else {
          throw InputError("complex: triangle vertex " + t[k].dump() + " is unknown");
        }
        if (!t[k + 3].is_number()) throw InputError("complex: side lengths must be numbers");
        tr.len[k] = t[k + 3].get<double>();
      }
      ts.push_back(tr);
    }
    std::vector<Vec3> emb;
    if (j.contains("embedding") && !j.at("embedding").is_null()) {
      for (const auto& p : j.at("embedding")) {
        if (!p.is_array() || p.size() != 3) throw InputError("complex: embedding points are [x, y, z]");
        emb.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
      }
      if (emb.size() != ids.size()) throw InputError("complex: embedding needs one point per vertex");
    }
    return build_complex(std::move(ids), std::move(ts), std::move(emb), opts);
  });
}

std::string complex_to_obj(const MetricComplex& c) {
  if (!c.has_embedding()) throw PreconditionError("complex has no embedding to export");
  std::string out;
  char buf[128];
  for (const auto& p : c.embedding) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p[0], p[1], p[2]);
    out += buf;
  }
  for (const auto& t : c.triangles) {
    std::snprintf(buf, sizeof buf, "f %d %d %d\n", t.v[0] + 1, t.v[1] + 1, t.v[2] + 1);
    out += buf;
  }
  return out;
}

Json approximation_to_json(const Approximation& a) {
  Json j;
  Json adj = Json::array();
  for (std::size_t u = 0; u < a.adjacency.size(); ++u)
    for (int v : a.adjacency[u])
      if (int(u) < v) adj.push_back(Json::array({int(u), v}));
  j["adjacency"] = std::move(adj);
  Json p = Json::object(), r = Json::object(), U = Json::object();
  for (std::size_t v = 0; v < a.vertex_count(); ++v) {
    const std::string key = std::to_string(v);
    p[key] = a.p[v];
    r[key] = a.r[v];
    U[key] = a.U[v];
  }
  j["p"] = std::move(p);
  j["r"] = std::move(r);
  j["U"] = std::move(U);
  return j;
}

Approximation approximation_from_json(const Json& j) {
  return parse("approximation", [&] {
    const Json& p = field(j, "p", "approximation");
    const Json& r = field(j, "r", "approximation");
    const Json& U = field(j, "U", "approximation");
    const Json& adj = field(j, "adjacency", "approximation");
    if (!p.is_object() || !r.is_object() || !U.is_object() || !adj.is_array())
      throw InputError("approximation: p, r and U are objects keyed by vertex, adjacency an array");
    const std::size_t n = p.size();
    if (r.size() != n || U.size() != n) throw InputError("approximation: p, r and U must cover the same vertices");
    Approximation a;
    a.p.assign(n, -1);
    a.r.assign(n, -1);
    a.U.assign(n, {});
    a.adjacency.assign(n, {});
    std::vector<char> seenp(n, 0), seenr(n, 0), seenU(n, 0);
    for (auto it = p.begin(); it != p.end(); ++it) {
      const int v = vertex_key(it.key(), n, "approximation p");
      if (!it.value().is_number_integer()) throw InputError("approximation: p values are point ids");
      a.p[v] = it.value().get<int>();
      seenp[v] = 1;
    }
    for (auto it = r.begin(); it != r.end(); ++it) {
      const int v = vertex_key(it.key(), n, "approximation r");
      if (!it.value().is_number()) throw InputError("approximation: r values are numbers");
      a.r[v] = it.value().get<double>();
      seenr[v] = 1;
    }
    for (auto it = U.begin(); it != U.end(); ++it) {
      const int v = vertex_key(it.key(), n, "approximation U");
      a.U[v] = index_list(it.value(), "approximation U");
      std::sort(a.U[v].begin(), a.U[v].end());
      a.U[v].erase(std::unique(a.U[v].begin(), a.U[v].end()), a.U[v].end());
      seenU[v] = 1;
    }
    for (std::size_t v = 0; v < n; ++v)
      if (!seenp[v] || !seenr[v] || !seenU[v]) throw InputError("approximation: vertex keys must be 0..n-1");
    for (const auto& e : adj) {
      const auto uv = index_list(e, "approximation adjacency");
      if (uv.size() != 2) throw InputError("approximation: adjacency entries are [u, v]");
      for (int x : uv)
        if (x < 0 || std::size_t(x) >= n) throw InputError("approximation: adjacency vertex out of range");
      if (uv[0] == uv[1]) throw InputError("approximation: adjacency has a loop");
      a.adjacency[uv[0]].push_back(uv[1]);
      a.adjacency[uv[1]].push_back(uv[0]);
    }
    for (auto& row : a.adjacency) {
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return a;
  });
}

Json family_to_json(const CurveFamily& fam) {
  Json j;
  j["E"] = fam.E;
  j["F"] = fam.F;
  if (fam.G.empty()) j["G"] = "all";
  else j["G"] = fam.G;
  return j;
}

CurveFamily family_from_json(const Json& j) {
  return parse("family", [&] {
    CurveFamily fam;
    fam.E = index_list(field(j, "E", "family"), "family E");
    fam.F = index_list(field(j, "F", "family"), "family F");
    if (j.contains("G")) {
      const Json& G = j.at("G");
      if (G.is_string()) {
        if (G.get<std::string>() != "all") throw InputError("family: G is a node list or \"all\"");
      } else {
        fam.G = index_list(G, "family G");
        if (fam.G.empty()) throw InputError("family: an empty G joins nothing; use \"all\"");
      }
    }
    return fam;
  });
}

GlueInput glue_input_from_json(const Json& j) {
  return parse("glue input", [&] {
    GlueInput in;
    in.base = metric_from_json(j);
    const Json& sub = field(j, "subset", "glue input");
    in.S = index_list(field(sub, "indices", "glue subset"), "glue subset indices");
    in.d_S = metric_from_json(sub);
    return in;
  });
}

Json glue_input_to_json(const GlueInput& in) {
  Json j = metric_to_json(in.base);
  Json sub;
  sub["indices"] = in.S;
  const Json m = metric_to_json(in.d_S);
  sub["points"] = m["points"];
  sub["dist"] = m["dist"];
  j["subset"] = std::move(sub);
  return j;
}

Json make_report(const std::string& op, Json inputs, Json result, Json witnesses, Json tolerances) {
  Json j;
  j["op"] = op;
  j["inputs"] = std::move(inputs);
  j["result"] = std::move(result);
  j["witnesses"] = std::move(witnesses);
  j["tolerances"] = std::move(tolerances);
  return j;
}

Json to_json(const MetricCheck& c) {
  Json j;
  j["ok"] = c.ok;
  j["violation"] = c.violation;
  j["witness"] = witness_json(c.witness);
  j["excess"] = c.excess;
  return j;
}

Json to_json(const AxiomResult& r) {
  Json j;
  j["pass"] = r.pass;
  j["worst"] = r.worst;
  j["witness"] = witness_json(r.witness);
  j["detail"] = r.detail;
  return j;
}

Json to_json(const AxiomReport& r) {
  Json j;
  j["K"] = r.K;
  j["L"] = r.L;
  j["axioms_pass"] = r.axioms_pass();
  j["pass"] = r.pass();
  Json ax;
  ax["A1"] = to_json(r.A1);
  ax["A2_ball"] = to_json(r.A2_ball);
  ax["A2_cover"] = to_json(r.A2_cover);
  ax["A3_adjacent"] = to_json(r.A3_adjacent);
  ax["A3_converse"] = to_json(r.A3_converse);
  ax["A4"] = to_json(r.A4);
  ax["fine"] = to_json(r.fine);
  ax["A6"] = to_json(r.A6);
  ax["A7"] = to_json(r.A7);
  j["axioms"] = std::move(ax);
  return j;
}

Json to_json(const QCCertificate& c) {
  Json j;
  j["M1"] = c.M1;
  j["M2"] = c.M2;
  j["M3"] = c.M3;
  j["M"] = c.M;
  j["M1_vertex"] = c.M1_vertex;
  j["M2_triangle"] = c.M2_triangle;
  j["M3_vertex"] = c.M3_vertex;
  return j;
}

Json to_json(const DistortionProfile& p) {
  Json j;
  Json s = Json::array();
  for (const auto& [t, h] : p.samples) s.push_back(Json::array({t, h}));
  j["samples"] = std::move(s);
  j["triple_budget"] = p.triple_budget;
  j["seed"] = p.seed;
  j["triples_evaluated"] = p.triples_evaluated;
  j["exhaustive"] = p.exhaustive;
  return j;
}

Json to_json(const EpsIsometryCert& c) {
  Json j;
  j["eps"] = c.eps;
  j["eps_distortion"] = c.eps_distortion;
  j["eps_density"] = c.eps_density;
  j["gh_bound"] = c.gh_bound;
  j["distortion_witness"] = Json::array({c.distortion_witness.first, c.distortion_witness.second});
  j["density_witness"] = c.density_witness;
  return j;
}

Json to_json(const GlueReport& r) {
  auto clause = [](const ClauseResult& c) {
    Json j;
    j["pass"] = c.pass;
    j["max_error"] = c.max_error;
    j["witness"] = witness_json(c.witness);
    return j;
  };
  Json j;
  j["pass"] = r.pass();
  j["metric"] = to_json(r.metric);
  j["below_base"] = clause(r.below_base);
  j["on_subset"] = clause(r.on_subset);
  j["mixed"] = clause(r.mixed);
  j["local_isometry"] = clause(r.local_isometry);
  j["comparability"] = clause(r.comparability);
  j["lambda"] = r.lambda;
  return j;
}

Json to_json(const ModulusResult& r) {
  Json j;
  j["value"] = r.value;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  j["iterations"] = r.paths;
  j["sweeps"] = r.sweeps;
  j["certificate"] = r.certificate;
  j["empty"] = r.empty;
  Json st;
  double lo = kInfDist, hi = 0, sum = 0;
  int support = 0;
  for (double x : r.rho.rho) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    sum += x;
    support += x > 0;
  }
  st["min"] = r.rho.rho.empty() ? 0.0 : lo;
  st["max"] = hi;
  st["mean"] = r.rho.rho.empty() ? 0.0 : sum / double(r.rho.rho.size());
  st["support"] = support;
  st["energy"] = r.rho.energy;
  j["rho_stats"] = std::move(st);
  j["active_paths"] = r.active.size();
  return j;
}

Json to_json(const AnnulusReport& r) {
  auto sample = [](const AnnulusSample& s) {
    Json j;
    j["center"] = s.center;
    j["r"] = s.r;
    j["modulus"] = s.modulus;
    j["empty"] = s.empty;
    return j;
  };
  Json j;
  j["max_modulus"] = r.max_modulus;
  j["witness"] = sample(r.witness);
  Json all = Json::array();
  for (const auto& s : r.samples) all.push_back(sample(s));
  j["samples"] = std::move(all);
  return j;
}

}  // namespace polyqs
