// Command-line front end. Every subcommand writes a JSON report with the
// fields {op, inputs, result, witnesses, tolerances}.
//
// Exit codes: 0 pass, 1 certificate failure, 2 input error, 3 non-convergence
// or internal error.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "polyqs/approximation.hpp"
#include "polyqs/constructions.hpp"
#include "polyqs/errors.hpp"
#include "polyqs/glue.hpp"
#include "polyqs/json_io.hpp"
#include "polyqs/modulus.hpp"
#include "polyqs/parallel.hpp"
#include "polyqs/pipeline.hpp"

namespace fs = std::filesystem;
using namespace polyqs;

namespace {

enum Exit { kPass = 0, kFail = 1, kInput = 2, kInternal = 3 };

struct Globals {
  std::optional<int> mesh_level;
  std::optional<double> alpha;
  std::uint64_t seed = 0;
  double tol = kMetricTol;
  unsigned threads = 0;
  std::string out;
};

// Report to --out when given, otherwise to stdout.
void emit(const Json& report, const std::string& out) {
  if (out.empty()) std::cout << dump(report);
  else write_text_file(out, dump(report));
}

fs::path out_dir(const std::string& out) {
  const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir.string());
  return dir;
}

int cmd_snowsphere(int stage, const Globals& g) {
  if (stage < 0 || stage > kSnowsphereMaxStage)
    throw InputError("snowsphere stage must be between 0 and " + std::to_string(kSnowsphereMaxStage));
  const Snowsphere s = snowsphere(stage);
  const fs::path dir = out_dir(g.out);
  const std::string base = "snowsphere_" + std::to_string(stage);
  write_text_file((dir / (base + ".json")).string(), dump(complex_to_json(s.complex)));
  write_text_file((dir / (base + ".obj")).string(), complex_to_obj(s.complex));

  Json inputs;
  inputs["stage"] = stage;
  Json result;
  result["squares"] = s.squares.size();
  result["triangles"] = s.complex.triangles.size();
  result["vertices"] = s.complex.vertex_count();
  result["side"] = s.side;
  result["vertices_at_stage"] = s.vertices_at_stage;
  result["qc"] = to_json(qc_certificate(s.complex));
  result["files"] = Json::array({base + ".json", base + ".obj"});
  write_text_file((dir / (base + "_report.json")).string(),
                  dump(make_report("snowsphere", inputs, result, Json::object(), Json::object())));
  std::cout << "stage " << stage << ": " << s.squares.size() << " squares, " << s.complex.triangles.size()
            << " triangles, " << s.complex.vertex_count() << " vertices\n";
  return kPass;
}

int cmd_approximate(const std::string& bundle_path, const Globals& g) {
  const Json bundle = read_json_file(bundle_path);
  const fs::path here = fs::path(bundle_path).parent_path();
  auto resolve = [&](const char* key) {
    if (!bundle.contains(key) || !bundle.at(key).is_string())
      throw InputError(std::string("bundle: \"") + key + "\" must name a file");
    const fs::path p(bundle.at(key).get<std::string>());
    return (p.is_absolute() ? p : here / p).string();
  };
  PipelineInput in;
  in.Z = complex_from_json(read_json_file(resolve("complex")));
  in.target = metric_from_json(read_json_file(resolve("target")));
  if (bundle.contains("X")) {
    in.X = metric_from_json(read_json_file(resolve("X")));
    if (!bundle.contains("tau")) throw InputError("bundle: \"tau\" is required with \"X\"");
  }
  if (bundle.contains("tau"))
    in.tau = map_from_json(bundle.at("tau"), in.Z.vertex_count() + in.Z.triangles.size());
  if (bundle.contains("mesh_level")) in.mesh_level = bundle.at("mesh_level").get<int>();
  if (bundle.contains("alpha")) in.alpha = bundle.at("alpha").get<double>();
  if (g.mesh_level) in.mesh_level = *g.mesh_level;
  if (g.alpha) in.alpha = *g.alpha;
  in.seed = g.seed;

  const PipelineOutput o = run_pipeline(in);
  const fs::path dir = out_dir(g.out);
  write_text_file((dir / "Y.json").string(), dump(complex_to_json(o.Y)));
  if (o.Y.has_embedding()) write_text_file((dir / "Y.obj").string(), complex_to_obj(o.Y));
  write_text_file((dir / "d_tilde.json").string(), dump(metric_to_json(o.glued.result)));
  write_text_file((dir / "phi.json").string(), dump(map_to_json(o.phi)));

  const bool pass = o.dS_below_dY && o.dtilde_is_dS && (!in.certify_axioms || o.skeleton_axioms.axioms_pass()) &&
                    (!in.certify_axioms || o.image_axioms.axioms_pass());
  Json inputs;
  inputs["bundle"] = bundle;
  inputs["mesh_level"] = in.mesh_level;
  inputs["seed"] = in.seed;
  Json result;
  result["pass"] = pass;
  result["t"] = o.t;
  result["alpha"] = o.alpha;
  result["Y"] = {{"vertices", o.Y.vertex_count()}, {"triangles", o.Y.triangles.size()}};
  result["qc_Y"] = to_json(o.qc);
  result["dS_below_dY"] = o.dS_below_dY;
  result["dtilde_is_dS"] = o.dtilde_is_dS;
  result["hyp2_ratio"] = o.hyp2_ratio;
  result["hyp4_L"] = o.hyp4_L;
  result["constants"] = {{"K", o.constants.K}, {"L", o.constants.L}};
  result["skeleton_axioms"] = to_json(o.skeleton_axioms);
  result["image_lambda"] = o.image_lambda;
  result["image_axioms"] = to_json(o.image_axioms);
  result["eps_isometry"] = to_json(o.eps_iso);
  result["bilip"] = o.bilip;
  result["qs_profile"] = to_json(o.qs);
  result["files"] = Json::array({"Y.json", "d_tilde.json", "phi.json"});
  if (o.Y.has_embedding()) result["files"].push_back("Y.obj");
  Json witnesses;
  witnesses["eps_distortion_pair"] = Json::array({o.eps_iso.distortion_witness.first, o.eps_iso.distortion_witness.second});
  witnesses["eps_density_point"] = o.eps_iso.density_witness;
  Json tol;
  tol["metric"] = kMetricTol;
  tol["dS_below_dY"] = 0.0;
  tol["dtilde_is_dS"] = 0.0;
  write_text_file((dir / "report.json").string(),
                  dump(make_report("approximate", inputs, result, witnesses, tol)));
  std::cout << "alpha " << o.alpha << ", eps " << o.eps_iso.eps << ", bilip " << o.bilip << ": "
            << (pass ? "pass" : "FAIL") << "\n";
  return pass ? kPass : kFail;
}

int cmd_verify(const std::string& complex_path, const std::string& approx_path, std::optional<double> K,
               std::optional<double> L, bool derived, const Globals& g) {
  const MetricComplex c = complex_from_json(read_json_file(complex_path));
  const int m = g.mesh_level.value_or(2);
  if (m < 0) throw InputError("mesh level must be nonnegative");
  const MeshGraph mesh = mesh_graph(c, m);
  const Approximation a =
      approx_path.empty() ? skeleton_approximation(c, mesh) : approximation_from_json(read_json_file(approx_path));
  const CertifiedConstants cc = certified_constants(qc_certificate(c));
  const double k = K.value_or(cc.K), l = L.value_or(cc.L);
  AxiomOptions o;
  o.tol = g.tol;
  o.seed = g.seed;
  const MeshHost host(mesh);
  const AxiomReport r = check_axioms(a, host, k, l, o);
  const bool pass = derived ? r.pass() : r.axioms_pass();

  Json inputs;
  inputs["complex"] = complex_path;
  inputs["approximation"] = approx_path.empty() ? Json("skeleton") : Json(approx_path);
  inputs["mesh_level"] = m;
  inputs["K"] = k;
  inputs["L"] = l;
  inputs["derived"] = derived;
  inputs["seed"] = g.seed;
  Json result = to_json(r);
  result["pass"] = pass;
  Json witnesses;
  for (const auto& [name, ax] : {std::pair<const char*, const AxiomResult*>{"A1", &r.A1},
                                 {"A2_ball", &r.A2_ball}, {"A2_cover", &r.A2_cover},
                                 {"A3_adjacent", &r.A3_adjacent}, {"A3_converse", &r.A3_converse},
                                 {"A4", &r.A4}, {"fine", &r.fine}, {"A6", &r.A6}, {"A7", &r.A7}})
    if (!ax->pass) witnesses[name] = to_json(*ax);
  Json tol;
  tol["ball"] = g.tol;
  emit(make_report("verify", inputs, result, witnesses, tol), g.out);
  return pass ? kPass : kFail;
}

int cmd_modulus(const std::string& complex_path, const std::string& family_path, int crossing,
                std::optional<double> annulus_L, int centers, int scales, std::optional<double> expect,
                double rel_tol, int max_paths, const Globals& g) {
  const MetricComplex c = complex_from_json(read_json_file(complex_path));
  const int m = g.mesh_level.value_or(8);
  if (m < 0) throw InputError("mesh level must be nonnegative");
  ModulusOptions o;
  if (g.tol != kMetricTol) o.tol = g.tol;
  if (max_paths > 0) o.max_paths = max_paths;
  Json inputs;
  inputs["complex"] = complex_path;
  inputs["mesh_level"] = m;
  inputs["stencil"] = kModulusStencil;
  Json result, witnesses;
  double value = 0;
  if (annulus_L) {
    inputs["L"] = *annulus_L;
    inputs["centers"] = centers;
    inputs["scales"] = scales;
    inputs["seed"] = g.seed;
    const AnnulusReport r = annulus_condition(c, m, *annulus_L, centers, scales, g.seed, o);
    value = r.max_modulus;
    result = to_json(r);
    witnesses["ball"] = {{"center", r.witness.center}, {"r", r.witness.r}};
  } else {
    const MeshGraph mesh = mesh_graph(c, m, kModulusStencil);
    CurveFamily fam;
    if (!family_path.empty()) {
      fam = family_from_json(read_json_file(family_path));
      inputs["family"] = family_path;
    } else if (crossing >= 0) {
      if (mesh.position.empty()) throw InputError("--crossing needs an embedded complex");
      double lo = kInfDist, hi = -kInfDist;
      for (const auto& p : mesh.position) {
        lo = std::min(lo, p[crossing]);
        hi = std::max(hi, p[crossing]);
      }
      const double eps = 1e-9 * std::max(1.0, hi - lo);
      for (std::size_t v = 0; v < mesh.size(); ++v) {
        if (mesh.position[v][crossing] <= lo + eps) fam.E.push_back(int(v));
        else if (mesh.position[v][crossing] >= hi - eps) fam.F.push_back(int(v));
      }
      inputs["crossing_axis"] = crossing;
    } else {
      throw InputError("modulus needs --family, --crossing or --annulus");
    }
    const ModulusResult r = mod2(mesh, fam, o);
    value = r.value;
    result = to_json(r);
    inputs["nodes"] = mesh.size();
  }
  bool pass = true;
  if (expect) {
    pass = std::abs(value - *expect) <= rel_tol * std::abs(*expect);
    result["expected"] = *expect;
    result["pass"] = pass;
  }
  Json tol;
  tol["admissibility"] = o.tol;
  tol["gap"] = o.gap;
  if (expect) tol["relative"] = rel_tol;
  emit(make_report("modulus", inputs, result, witnesses, tol), g.out);
  return pass ? kPass : kFail;
}

int cmd_distortion(const std::string& src_path, const std::string& dst_path, const std::string& map_path,
                   std::uint64_t budget, const Globals& g) {
  const FiniteMetric src = metric_from_json(read_json_file(src_path));
  const FiniteMetric dst = dst_path.empty() ? src : metric_from_json(read_json_file(dst_path));
  PointMap f;
  if (map_path.empty()) {
    if (src.size() != dst.size()) throw InputError("identity map needs metrics of equal size");
    f.resize(src.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = int(i);
  } else {
    f = map_from_json(read_json_file(map_path), src.size());
  }
  for (int x : f)
    if (x < 0 || std::size_t(x) >= dst.size()) throw InputError("map image out of range");
  const DistortionProfile p = qs_profile(f, src, dst, budget, g.seed);
  const double lambda = bilip_constant(f, src, dst);
  // A lambda-bi-Lipschitz map has H(t) <= lambda^2 t.
  bool pass = true;
  std::pair<double, double> worst{0, 0};
  for (const auto& [t, h] : p.samples)
    if (h > lambda * lambda * t * (1 + g.tol)) {
      pass = false;
      worst = {t, h};
    }
  Json inputs;
  inputs["src"] = src_path;
  inputs["dst"] = dst_path.empty() ? Json(src_path) : Json(dst_path);
  inputs["map"] = map_path.empty() ? Json("identity") : Json(map_path);
  inputs["budget"] = budget;
  inputs["seed"] = g.seed;
  Json result;
  result["pass"] = pass;
  result["bilip"] = lambda;
  result["profile"] = to_json(p);
  Json witnesses;
  if (!pass) witnesses["sample"] = Json::array({worst.first, worst.second});
  Json tol;
  tol["relative"] = g.tol;
  emit(make_report("distortion", inputs, result, witnesses, tol), g.out);
  return pass ? kPass : kFail;
}

int cmd_glue(const std::string& input_path, const std::string& result_path, const Globals& g) {
  const GlueInput in = glue_input_from_json(read_json_file(input_path));
  const GluedMetric gm = glue(in.base, in.S, in.d_S);
  const GlueReport r = verify_glue_clauses(gm, g.tol);
  if (!result_path.empty()) write_text_file(result_path, dump(metric_to_json(gm.result)));
  Json inputs;
  inputs["input"] = input_path;
  inputs["points"] = in.base.size();
  inputs["subset"] = in.S;
  Json result = to_json(r);
  if (result_path.empty()) result["glued"] = metric_to_json(gm.result);
  Json witnesses;
  if (!r.metric.ok) witnesses["metric"] = r.metric.witness;
  Json tol;
  tol["metric"] = g.tol;
  emit(make_report("glue", inputs, result, witnesses, tol), g.out);
  return r.pass() ? kPass : kFail;
}

int cmd_export_obj(const std::string& complex_path, const Globals& g) {
  const MetricComplex c = complex_from_json(read_json_file(complex_path));
  const std::string obj = complex_to_obj(c);
  if (g.out.empty()) std::cout << obj;
  else write_text_file(g.out, obj);
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polyhedral approximation and quasisymmetry checks for metric surfaces"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  int mesh_level = -1;
  double alpha = 0;
  app.add_option("--mesh-level", mesh_level, "Steiner refinement level m");
  app.add_option("--alpha", alpha, "Scale of the target edge lengths (default: smallest admissible)");
  app.add_option("--seed", g.seed, "Seed for all sampling");
  app.add_option("--tol", g.tol, "Tolerance for the checks");
  app.add_option("--threads", g.threads, "Worker thread cap (0: all cores)");
  app.add_option("--out", g.out, "Output file or directory");

  int stage = 0;
  auto* snow = app.add_subcommand("snowsphere", "Write the stage-n snowsphere as complex JSON and OBJ");
  snow->add_option("stage", stage, "Stage n (at most 4)")->required();

  std::string bundle;
  auto* approx = app.add_subcommand("approximate", "Run the approximation pipeline on an input bundle");
  approx->add_option("bundle", bundle, "Bundle JSON: {complex, target, X?, tau?, alpha?, mesh_level?}")
      ->required()
      ->check(CLI::ExistingFile);

  std::string complex_path, approx_path;
  double K = 0, L = 0;
  bool derived = false;
  auto* verify = app.add_subcommand("verify", "Check the approximation axioms");
  verify->add_option("complex", complex_path, "Complex JSON")->required()->check(CLI::ExistingFile);
  verify->add_option("--approximation", approx_path, "Approximation JSON over mesh nodes (default: skeleton)")
      ->check(CLI::ExistingFile);
  verify->add_option("-K", K, "Valence constant K (default: certified)");
  verify->add_option("-L", L, "Ratio constant L (default: certified)");
  verify->add_flag("--derived", derived, "Also require fineness and the derived axioms");

  std::string family_path;
  int crossing = -1, centers = 4, scales = 3;
  double annulus_L = 0, expect = 0, rel_tol = 0.1;
  auto* modulus = app.add_subcommand("modulus", "Discrete 2-modulus of a curve family or the annulus condition");
  modulus->add_option("complex", complex_path, "Complex JSON")->required()->check(CLI::ExistingFile);
  auto* fam_opt = modulus->add_option("--family", family_path, "Family JSON over mesh nodes")->check(CLI::ExistingFile);
  auto* cross_opt =
      modulus->add_option("--crossing", crossing, "Family between the two extreme sides along axis 0, 1 or 2")
          ->check(CLI::Range(0, 2));
  auto* ann_opt = modulus->add_option("--annulus", annulus_L, "Annulus condition with ratio L");
  fam_opt->excludes(cross_opt)->excludes(ann_opt);
  cross_opt->excludes(ann_opt);
  modulus->add_option("--centers", centers, "Sampled centers for --annulus");
  modulus->add_option("--scales", scales, "Dyadic scales for --annulus");
  auto* expect_opt = modulus->add_option("--expect", expect, "Expected value; exit 1 when outside --rel-tol");
  modulus->add_option("--rel-tol", rel_tol, "Relative tolerance for --expect");
  int max_paths = 0;
  modulus->add_option("--max-paths", max_paths, "Cap on generated path constraints");

  std::string src_path, dst_path, map_path;
  std::uint64_t budget = 200000;
  auto* dist = app.add_subcommand("distortion", "Empirical quasisymmetric distortion profile of a map");
  dist->add_option("src", src_path, "Source metric JSON")->required()->check(CLI::ExistingFile);
  dist->add_option("dst", dst_path, "Target metric JSON (default: the source)")->check(CLI::ExistingFile);
  dist->add_option("--map", map_path, "Map JSON as index pairs (default: identity)")->check(CLI::ExistingFile);
  dist->add_option("--budget", budget, "Sampled triples above the exhaustive limit");

  std::string glue_input, glue_result;
  auto* gl = app.add_subcommand("glue", "Glue a subset metric into a base metric");
  gl->add_option("input", glue_input, "Metric JSON with a \"subset\" sub-object")->required()->check(CLI::ExistingFile);
  gl->add_option("--result", glue_result, "Write the glued metric JSON here");

  auto* obj = app.add_subcommand("export-obj", "Write an embedded complex as OBJ");
  obj->add_option("complex", complex_path, "Complex JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (app.count("--mesh-level")) g.mesh_level = mesh_level;
    if (app.count("--alpha")) g.alpha = alpha;
    set_thread_limit(g.threads);
    if (*snow) return cmd_snowsphere(stage, g);
    if (*approx) return cmd_approximate(bundle, g);
    if (*verify)
      return cmd_verify(complex_path, approx_path, verify->count("-K") ? std::optional<double>(K) : std::nullopt,
                        verify->count("-L") ? std::optional<double>(L) : std::nullopt, derived, g);
    if (*modulus)
      return cmd_modulus(complex_path, family_path, crossing,
                         ann_opt->count() ? std::optional<double>(annulus_L) : std::nullopt, centers, scales,
                         expect_opt->count() ? std::optional<double>(expect) : std::nullopt, rel_tol, max_paths, g);
    if (*dist) return cmd_distortion(src_path, dst_path, map_path, budget, g);
    if (*gl) return cmd_glue(glue_input, glue_result, g);
    if (*obj) return cmd_export_obj(complex_path, g);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kInput;
  } catch (const NonConvergence& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
