#include "cfsi/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cfsi {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg, const std::string& path) {
  throw ConfigError(msg, path);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "/" + key;
}

// strict-schema guard: every object must list exactly the keys we understand
void check_keys(const json& obj, const std::string& path, std::set<std::string> allowed) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) fail("unknown key", join(path, item.key()));
}

double get_num(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail("expected a number", join(path, key));
  return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail("expected an integer", join(path, key));
  return v.get<int>();
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail("expected a boolean", join(path, key));
  return v.get<bool>();
}

std::string get_str(const json& obj, const std::string& path, const char* key,
                    const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail("expected a string", join(path, key));
  return v.get<std::string>();
}

std::vector<double> get_vec(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) return {};
  const json& v = obj.at(key);
  if (!v.is_array()) fail("expected an array of numbers", join(path, key));
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail("expected an array of numbers", join(path, key));
    out.push_back(e.get<double>());
  }
  return out;
}

BodyShape parse_shape(const json& b, const std::string& path) {
  if (!b.is_object()) fail("expected an object", path);
  const std::string kind = get_str(b, path, "kind", "ellipse");
  try {
    if (kind == "ellipse") {
      check_keys(b, path, {"kind", "a", "b"});
      return BodyShape::ellipse(get_num(b, path, "a", 0.25), get_num(b, path, "b", 0.25));
    }
    if (kind == "rounded-polygon") {
      check_keys(b, path, {"kind", "vertices", "rounding"});
      if (!b.contains("vertices")) fail("rounded-polygon needs vertices", path);
      const json& vs = b.at("vertices");
      if (!vs.is_array()) fail("expected an array of [x, y] pairs", join(path, "vertices"));
      std::vector<Vec2> pts;
      for (const auto& v : vs) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
          fail("expected an array of [x, y] pairs", join(path, "vertices"));
        pts.push_back({v[0].get<double>(), v[1].get<double>()});
      }
      return BodyShape::rounded_polygon(pts, get_num(b, path, "rounding", -1.0));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(e.what(), path);  // shape-construction preconditions
  }
  fail("unknown shape kind '" + kind + "' (ellipse | rounded-polygon)", join(path, "kind"));
}

InflowProfile build_profile(const ScenarioConfig& cfg) {
  if (cfg.profile_kind == "couette")
    return InflowProfile::couette(static_cast<double>(cfg.U), cfg.channel.H);
  // custom-polynomial; validated by the profile's matching conditions
  const auto mode =
      cfg.symmetric ? InflowProfile::Mode::Symmetric : InflowProfile::Mode::Standard;
  return InflowProfile::polynomial(Poly(cfg.coeffs_in), Poly(cfg.coeffs_out),
                                   static_cast<double>(cfg.U), cfg.channel.H, mode);
}

int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Solve: return "solve";
    case ExperimentKind::Lift: return "lift";
    case ExperimentKind::Equilibrium: return "equilibrium";
    case ExperimentKind::Continuation: return "continuation";
    case ExperimentKind::SweepTheta: return "sweep-theta";
    case ExperimentKind::Asymptotics: return "asymptotics";
    case ExperimentKind::Symmetry: return "symmetry";
    case ExperimentKind::Mms: return "mms";
    case ExperimentKind::MeshDump: return "mesh-dump";
  }
  return "?";
}

ExperimentKind experiment_kind_from(const std::string& name) {
  for (const ExperimentKind k :
       {ExperimentKind::Solve, ExperimentKind::Lift, ExperimentKind::Equilibrium,
        ExperimentKind::Continuation, ExperimentKind::SweepTheta, ExperimentKind::Asymptotics,
        ExperimentKind::Symmetry, ExperimentKind::Mms, ExperimentKind::MeshDump})
    if (name == to_string(k)) return k;
  throw ConfigError("unknown experiment kind '" + name + "'", "experiment/kind");
}

ScenarioConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail("syntax error at line " + std::to_string(line_of_offset(json_text, e.byte)) + ": " +
             e.what(),
         "");
  }
  if (!doc.is_object()) fail("top level must be an object", "");
  check_keys(doc, "",
             {"channel", "fluid", "inflow", "body", "solver", "force", "experiment", "output",
              "seed"});

  ScenarioConfig cfg;

  if (doc.contains("channel")) {
    const json& c = doc.at("channel");
    if (!c.is_object()) fail("expected an object", "channel");
    check_keys(c, "channel", {"H", "Lrect"});
    const double H = get_num(c, "channel", "H", 1.0);
    const double L = get_num(c, "channel", "Lrect", 1.5);
    try {
      cfg.channel = Channel(L, H);
    } catch (const std::exception& e) {
      fail(e.what(), "channel");
    }
  }

  if (doc.contains("fluid")) {
    const json& f = doc.at("fluid");
    if (!f.is_object()) fail("expected an object", "fluid");
    check_keys(f, "fluid", {"mu"});
    cfg.mu = get_num(f, "fluid", "mu", 1.0);
    if (!(cfg.mu > 0.0)) fail("viscosity must be positive", "fluid/mu");
  }

  if (doc.contains("inflow")) {
    const json& in = doc.at("inflow");
    if (!in.is_object()) fail("expected an object", "inflow");
    check_keys(in, "inflow", {"profile", "U", "coeffs_in", "coeffs_out", "symmetric"});
    cfg.profile_kind = get_str(in, "inflow", "profile", "couette");
    if (cfg.profile_kind != "couette" && cfg.profile_kind != "custom-polynomial")
      fail("unknown profile '" + cfg.profile_kind + "' (couette | custom-polynomial)",
           "inflow/profile");
    cfg.U = get_int(in, "inflow", "U", 1);
    if (cfg.U != 0 && cfg.U != 1) fail("wall speed U must be 0 or 1", "inflow/U");
    cfg.coeffs_in = get_vec(in, "inflow", "coeffs_in");
    cfg.coeffs_out = get_vec(in, "inflow", "coeffs_out");
    if (cfg.coeffs_out.empty()) cfg.coeffs_out = cfg.coeffs_in;
    cfg.symmetric = get_bool(in, "inflow", "symmetric", false);
    if (cfg.profile_kind == "couette" && (!cfg.coeffs_in.empty() || cfg.symmetric))
      fail("couette takes no coefficient or symmetric keys", "inflow");
    if (cfg.profile_kind == "custom-polynomial" && cfg.coeffs_in.empty())
      fail("custom-polynomial needs coeffs_in", "inflow/coeffs_in");
  }

  if (doc.contains("body")) {
    const json& b = doc.at("body");
    if (!b.is_object()) fail("expected an object", "body");
    check_keys(b, "body", {"shape", "h", "h_grid", "theta", "theta_grid"});
    if (b.contains("shape")) cfg.shape = parse_shape(b.at("shape"), "body/shape");
    if (b.contains("h") && b.contains("h_grid"))
      fail("give h or h_grid, not both", "body/h");
    if (b.contains("theta") && b.contains("theta_grid"))
      fail("give theta or theta_grid, not both", "body/theta");
    cfg.h = get_num(b, "body", "h", 0.0);
    cfg.h_grid = get_vec(b, "body", "h_grid");
    cfg.theta = get_num(b, "body", "theta", 0.0);
    cfg.theta_grid = get_vec(b, "body", "theta_grid");
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    if (!s.is_object()) fail("expected an object", "solver");
    check_keys(s, "solver",
               {"size", "body_refine", "grading", "gap_refine", "relax_iters", "min_angle_deg",
                "max_points", "newton_tol", "picard_iters", "max_newton", "max_damping"});
    cfg.mesh.size = get_num(s, "solver", "size", cfg.mesh.size);
    if (!(cfg.mesh.size > 0.0)) fail("mesh size must be positive", "solver/size");
    cfg.mesh.body_refine = get_num(s, "solver", "body_refine", cfg.mesh.body_refine);
    cfg.mesh.grading = get_num(s, "solver", "grading", cfg.mesh.grading);
    cfg.mesh.gap_refine = get_num(s, "solver", "gap_refine", cfg.mesh.gap_refine);
    cfg.mesh.relax_iters = get_int(s, "solver", "relax_iters", cfg.mesh.relax_iters);
    cfg.mesh.min_angle_deg = get_num(s, "solver", "min_angle_deg", cfg.mesh.min_angle_deg);
    cfg.mesh.max_points = get_int(s, "solver", "max_points", cfg.mesh.max_points);
    cfg.solver.newton_tol = get_num(s, "solver", "newton_tol", cfg.solver.newton_tol);
    if (!(cfg.solver.newton_tol > 0.0)) fail("tolerance must be positive", "solver/newton_tol");
    cfg.solver.picard_iters = get_int(s, "solver", "picard_iters", cfg.solver.picard_iters);
    cfg.solver.max_newton = get_int(s, "solver", "max_newton", cfg.solver.max_newton);
    cfg.solver.max_damping = get_int(s, "solver", "max_damping", cfg.solver.max_damping);
  }

  if (doc.contains("force")) {
    const json& f = doc.at("force");
    if (!f.is_object()) fail("expected an object", "force");
    check_keys(f, "force", {"gamma", "K_b", "K_t", "c_theta"});
    cfg.gamma = get_num(f, "force", "gamma", cfg.gamma);
    cfg.K_b = get_num(f, "force", "K_b", cfg.K_b);
    cfg.K_t = get_num(f, "force", "K_t", cfg.K_t);
    cfg.c_theta = get_num(f, "force", "c_theta", cfg.c_theta);
    if (!(cfg.gamma > 0.0)) fail("gamma must be positive", "force/gamma");
    if (!(cfg.K_b > 0.0) || !(cfg.K_t > 0.0)) fail("K_b, K_t must be positive", "force/K_b");
    if (cfg.c_theta < 0.0) fail("c_theta must be nonnegative", "force/c_theta");
  }

  if (!doc.contains("experiment")) fail("missing experiment block", "experiment");
  {
    const json& e = doc.at("experiment");
    if (!e.is_object()) fail("expected an object", "experiment");
    check_keys(e, "experiment",
               {"kind", "lambda", "lambda_grid", "gaps", "side", "tol_h", "tol_phi"});
    if (!e.contains("kind")) fail("missing experiment kind", "experiment/kind");
    cfg.kind = experiment_kind_from(get_str(e, "experiment", "kind", ""));
    if (e.contains("lambda") && e.contains("lambda_grid"))
      fail("give lambda or lambda_grid, not both", "experiment/lambda");
    cfg.lambda = get_num(e, "experiment", "lambda", 0.0);
    if (cfg.lambda < 0.0) fail("lambda must be nonnegative", "experiment/lambda");
    cfg.lambda_grid = get_vec(e, "experiment", "lambda_grid");
    cfg.gaps = get_vec(e, "experiment", "gaps");
    cfg.side = get_str(e, "experiment", "side", "bottom");
    if (cfg.side != "bottom" && cfg.side != "top")
      fail("side must be bottom or top", "experiment/side");
    cfg.tol_h = get_num(e, "experiment", "tol_h", -1.0);
    cfg.tol_phi = get_num(e, "experiment", "tol_phi", -1.0);
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    if (!o.is_object()) fail("expected an object", "output");
    check_keys(o, "output", {"directory", "plots"});
    cfg.out_dir = get_str(o, "output", "directory", cfg.out_dir);
    cfg.plots = get_bool(o, "output", "plots", cfg.plots);
  }

  if (doc.contains("seed")) {
    const int s = get_int(doc, "", "seed", 1234);
    if (s < 0) fail("seed must be nonnegative", "seed");
    cfg.seed = static_cast<unsigned>(s);
  }

  // realize the inflow once so matching-condition violations surface here,
  // with config context, rather than mid-run
  try {
    (void)build_profile(cfg);
  } catch (const std::exception& e) {
    fail(e.what(), "inflow");
  }

  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path, "");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_schema() {
  return
      "channel:    H (number, 1.0), Lrect (number, 1.5); requires Lrect > H\n"
      "fluid:      mu (number > 0, 1.0)\n"
      "inflow:     profile (couette | custom-polynomial), U (0 | 1, 1),\n"
      "            coeffs_in / coeffs_out (number arrays, custom-polynomial only),\n"
      "            symmetric (bool, false; both walls driven)\n"
      "body:       shape { kind: ellipse, a, b | kind: rounded-polygon, vertices, rounding },\n"
      "            h | h_grid, theta | theta_grid\n"
      "solver:     size, body_refine, grading, gap_refine, relax_iters, min_angle_deg,\n"
      "            max_points, newton_tol, picard_iters, max_newton, max_damping\n"
      "force:      gamma, K_b, K_t (> 0), c_theta (>= 0)\n"
      "experiment: kind (solve | lift | equilibrium | continuation | sweep-theta |\n"
      "            asymptotics | symmetry | mms | mesh-dump),\n"
      "            lambda | lambda_grid, gaps, side (bottom | top), tol_h, tol_phi\n"
      "output:     directory (string, out), plots (bool, true)\n"
      "seed:       integer >= 0 (1234)\n"
      "Unknown keys are rejected.\n";
}

FlowProblem make_problem(const ScenarioConfig& cfg) {
  return FlowProblem{cfg.channel,
                     cfg.shape,
                     Placement{cfg.h, cfg.theta},
                     build_profile(cfg),
                     cfg.mu,
                     cfg.lambda,
                     cfg.symmetric,
                     nullptr,
                     nullptr};
}

RestoringForce make_model(const ScenarioConfig& cfg) {
  RestoringForce m;
  m.channel = cfg.channel;
  m.shape = cfg.shape;
  m.gamma = cfg.gamma;
  m.K_b = cfg.K_b;
  m.K_t = cfg.K_t;
  m.U = cfg.U;
  m.c_theta = cfg.c_theta;
  return m;
}

FsiOptions make_fsi_options(const ScenarioConfig& cfg) {
  FsiOptions o;
  o.mesh = cfg.mesh;
  o.solver = cfg.solver;
  o.tol_h = cfg.tol_h;
  o.tol_phi = cfg.tol_phi;
  o.threads = cfg.jobs;
  return o;
}

}  // namespace cfsi
