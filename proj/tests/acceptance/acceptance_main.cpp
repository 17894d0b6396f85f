// End-to-end acceptance checks for the assembled toolkit, one per advertised
// guarantee.  Run all (no arguments) or one with --criterion N.  Every check
// prints exactly one line
//
//   criterion NN (<label>): PASS|FAIL -- <measured numbers>
//
// and the process exits 0 only if every selected check passed.  The checks
// re-derive their verdicts from raw numbers wherever practical instead of
// trusting the library's own summary flags.

#include <sys/wait.h>

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cfsi/config.hpp"
#include "cfsi/extension.hpp"
#include "cfsi/fsi.hpp"
#include "cfsi/lift.hpp"
#include "cfsi/mesh.hpp"
#include "cfsi/ns_solver.hpp"
#include "cfsi/profiles.hpp"
#include "cfsi/runner.hpp"
#include "cfsi/sha256.hpp"

using namespace cfsi;

namespace {

// ---------------------------------------------------------------------------
// shared fixtures

const Channel kChan{1.5, 1.0};

BodyShape disk() { return BodyShape::ellipse(0.25, 0.25); }

FlowProblem couette_problem(double lambda, double h) {
  return FlowProblem{kChan,
                     disk(),
                     Placement{h, 0.0},
                     InflowProfile::couette(1.0, kChan.H),
                     1.0,
                     lambda,
                     false,
                     nullptr,
                     nullptr};
}

// even plug flow with both walls moving: the mirror-symmetric configuration
FlowProblem plug_problem(double lambda) {
  return FlowProblem{kChan,
                     disk(),
                     Placement{0.0, 0.0},
                     InflowProfile::uniform(1.0, kChan.H),
                     1.0,
                     lambda,
                     true,
                     nullptr,
                     nullptr};
}

RestoringForce disk_model() {
  RestoringForce m;
  m.channel = kChan;
  m.shape = disk();
  return m;  // gamma 5, K_b = K_t = 0.1, U = 1
}

// acceptance runs favour quick solves; the claims under test are tolerance
// statements that hold at any resolution unless a criterion pins one
MeshOptions coarse_mesh() {
  MeshOptions mo;
  mo.size = 0.16;
  mo.body_refine = 2.0;
  return mo;
}

FsiOptions coarse_fsi() {
  FsiOptions o;
  o.mesh = coarse_mesh();
  return o;
}

const double kTolH = 1e-4 * kChan.H;

// deterministic 53-bit uniform points, identical across platforms
struct PointGen {
  std::mt19937_64 rng;
  explicit PointGen(unsigned seed) : rng(seed) {}
  double unit() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
  Vec2 in_box(const Vec2& lo, const Vec2& hi) {
    return {lo.x + (hi.x - lo.x) * unit(), lo.y + (hi.y - lo.y) * unit()};
  }
};

double slope_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. the analytic boundary extension and the lift test field are exactly
//    divergence-free and take their prescribed traces

bool c01(std::string& detail) {
  const InflowProfile prof = InflowProfile::couette(1.0, kChan.H);
  const BodyShape shape = BodyShape::ellipse(0.3, 0.18);
  const Placement pl{0.15, 0.1};
  const double lambda = 0.7;
  const double H = kChan.H, L = kChan.Lrect;

  const auto s = solenoidal_s(prof, kChan, shape, pl, lambda);
  const auto w = lift_field_w(kChan, shape, pl);

  double div_s = 0.0, div_w = 0.0;
  PointGen gen(101);
  for (int i = 0; i < 10000; ++i) {
    const Vec2 p = gen.in_box({-L, -H}, {L, H});
    div_s = std::max(div_s, std::abs(s->divergence(p)));
    div_w = std::max(div_w, std::abs(w->divergence(p)));
  }

  double tr_s = 0.0, tr_w = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double t = static_cast<double>(i) / 1000.0;
    const double x2 = -H + 2.0 * H * t;
    const double x1 = -L + 2.0 * L * t;
    // s carries the scaled inflow data: profiles on the open sides, the
    // moving top wall, a resting bottom wall and a resting body
    tr_s = std::max(tr_s, (s->eval({-L, x2}).v - Vec2{lambda * prof.V_in(x2), 0.0}).norm());
    tr_s = std::max(tr_s, (s->eval({L, x2}).v - Vec2{lambda * prof.V_out(x2), 0.0}).norm());
    tr_s = std::max(tr_s, (s->eval({x1, H}).v - Vec2{lambda, 0.0}).norm());
    tr_s = std::max(tr_s, s->eval({x1, -H}).v.norm());
    const Vec2 bp = to_channel_frame(pl, shape.boundary(t).p);
    tr_s = std::max(tr_s, s->eval(bp).v.norm());
    // w is e2 on the body and zero on all four channel sides
    tr_w = std::max(tr_w, (w->eval(bp).v - Vec2{0.0, 1.0}).norm());
    for (const Vec2 q : {Vec2{x1, H}, Vec2{x1, -H}, Vec2{-L, x2}, Vec2{L, x2}})
      tr_w = std::max(tr_w, w->eval(q).v.norm());
  }

  const bool ok = div_s <= 1e-10 && div_w <= 1e-10 && tr_s <= 1e-10 && tr_w <= 1e-10;
  detail = fmt("max|div s| %.2e, max|div w| %.2e, trace defects %.2e / %.2e (tol 1e-10)",
               div_s, div_w, tr_s, tr_w);
  return ok;
}

// ---------------------------------------------------------------------------
// 2. manufactured forced flow: quadratic convergence of the H1 velocity and
//    L2 pressure errors over three uniform refinements

bool c02(std::string& detail) {
  TrigVelocity u_ex;
  TrigPressure p_ex;
  const auto forcing = mms_forcing(u_ex, p_ex, 1.0, true);
  FlowProblem prob = couette_problem(0.35, 0.1);
  prob.forcing = forcing.get();
  prob.exact_dirichlet = &u_ex;

  MeshOptions mo;
  mo.body_refine = 1.0;  // uniform refinements: no local grading in the study
  const std::vector<double> sizes{0.2, 0.1, 0.05};
  std::vector<double> eu, ep;
  int unknowns = 0;
  for (const double s : sizes) {
    mo.size = s;
    const Mesh mesh = triangulate(kChan, prob.shape, prob.placement, mo);
    unknowns = std::max(unknowns, 2 * mesh.n_p2_nodes());
    const FlowField field = solve_navier_stokes(prob, mesh);
    if (!field.report.converged) {
      detail = fmt("solve at size %.3g did not converge", s);
      return false;
    }
    const FieldNorms n = diff_norms(field, &u_ex, &p_ex);
    eu.push_back(n.u_h1);
    ep.push_back(n.p_l2);
  }
  const double order_u = slope_loglog(sizes, eu);
  const double order_p = slope_loglog(sizes, ep);
  const bool ok = std::abs(order_u - 2.0) <= 0.2 && std::abs(order_p - 2.0) <= 0.3;
  detail = fmt("H1(u) order %.3f (2.0+-0.2), L2(p) order %.3f (2.0+-0.3), <= %d unknowns",
               order_u, order_p, unknowns);
  return ok;
}

// ---------------------------------------------------------------------------
// 3. zero boundary data: the solver returns the zero flow, both lift
//    evaluations vanish, and the equilibrium sits at the channel axis

bool c03(std::string& detail) {
  const FlowProblem prob = couette_problem(0.0, 0.1);
  const Mesh mesh = triangulate(kChan, prob.shape, prob.placement, coarse_mesh());
  const FlowField field = solve_navier_stokes(prob, mesh);
  const double u_h1 = diff_norms(field, nullptr, nullptr).u_h1;
  const LiftResult lr = evaluate_lift(field, prob);
  const EquilibriumResult eq = find_equilibrium(prob, disk_model(), coarse_fsi());
  const bool ok = u_h1 <= 1e-11 && std::abs(lr.value_boundary) <= 1e-12 &&
                  std::abs(lr.value_volume) <= 1e-12 && std::abs(eq.h_star) <= kTolH;
  detail = fmt("|u|_H1 %.2e (tol 1e-11), lifts %.2e / %.2e (tol 1e-12), |h*| %.2e (tol %.0e)",
               u_h1, std::abs(lr.value_boundary), std::abs(lr.value_volume),
               std::abs(eq.h_star), kTolH);
  return ok;
}

// ---------------------------------------------------------------------------
// 4. the boundary stress integral and the volume identity agree within 2% at
//    the default resolution, and the gap closes under one refinement

bool c04(std::string& detail) {
  FlowProblem prob = couette_problem(0.6, 0.30);
  int n_default = 0, n_refined = 0;
  const auto rel_at = [&](double size, int& unknowns) {
    MeshOptions mo;  // default body_refine
    mo.size = size;
    const Mesh mesh = triangulate(kChan, prob.shape, prob.placement, mo);
    unknowns = 2 * mesh.n_p2_nodes();
    const FlowField field = solve_navier_stokes(prob, mesh);
    const LiftResult lr = evaluate_lift(field, prob);
    return lr.discrepancy / std::max(std::abs(lr.value_volume), 1e-12 * prob.lambda);
  };
  const double r_default = rel_at(0.12, n_default);
  const double r_refined = rel_at(0.06, n_refined);
  const bool ok = r_default <= 0.02 && r_refined < r_default && n_refined <= 60000;
  detail = fmt("default %.3f%% (%d unknowns), refined %.3f%% (%d unknowns)",
               100.0 * r_default, n_default, 100.0 * r_refined, n_refined);
  return ok;
}

// ---------------------------------------------------------------------------
// 5. the volume lift does not depend on which admissible test field carries it

bool c05(std::string& detail) {
  const FlowProblem prob = couette_problem(0.5, 0.2);
  const Mesh mesh = triangulate(kChan, prob.shape, prob.placement, coarse_mesh());
  const FlowField field = solve_navier_stokes(prob, mesh);
  const LiftResult wide = evaluate_lift(field, prob, 1.0);
  const LiftResult narrow = evaluate_lift(field, prob, 0.5);
  const double rel = std::abs(wide.value_volume - narrow.value_volume) /
                     std::max(std::abs(wide.value_volume), 1e-12 * prob.lambda);
  const bool ok = rel <= 0.02;
  detail = fmt("volume lift %.6e vs %.6e, relative gap %.2e (tol 2%%)", wide.value_volume,
               narrow.value_volume, rel);
  return ok;
}

// ---------------------------------------------------------------------------
// 6. mirror-symmetric configuration: no lift, equilibrium on the axis, and
//    mirror-exact discrete fields at small wind

bool c06(std::string& detail) {
  const FlowProblem prob = plug_problem(0.0);
  const SymmetryReport rep =
      symmetry_certificate(prob, disk_model(), {0.01, 0.05}, 0.051, coarse_fsi());
  bool ok = rep.certified && rep.rows.size() == 2;
  double worst_lift = 0.0, worst_h = 0.0, worst_mirror = 0.0;
  for (const SymmetryRow& r : rep.rows) {
    // re-derive the verdict from the raw numbers
    const double lift_tol = 1e-8 * (1.0 + r.lambda);
    const double mirror = std::max({r.sym_u1, r.sym_u2, r.sym_p});
    ok = ok && !r.report_only && r.error.empty();
    ok = ok && std::abs(r.lift_boundary) <= lift_tol && std::abs(r.lift_volume) <= lift_tol;
    ok = ok && std::abs(r.h_star) <= kTolH && mirror <= 1e-9;
    worst_lift = std::max({worst_lift, std::abs(r.lift_boundary), std::abs(r.lift_volume)});
    worst_h = std::max(worst_h, std::abs(r.h_star));
    worst_mirror = std::max(worst_mirror, mirror);
  }
  detail = fmt("max |lift| %.2e (tol ~1e-8), max |h*| %.2e (tol %.0e), mirror defect %.2e "
               "(tol 1e-9)",
               worst_lift, worst_h, kTolH, worst_mirror);
  return ok;
}

// ---------------------------------------------------------------------------
// 7. at small wind the global force is strictly increasing across the whole
//    admissible range and pushes away from both walls at its ends

bool c07(std::string& detail) {
  const double lambda = 0.1;
  const double h0 = 0.375;  // half the smaller resting gap of the disk
  std::vector<double> grid;
  for (int i = 0; i < 11; ++i) grid.push_back(-h0 + 2.0 * h0 * i / 10.0);
  const ScanResult scan =
      monotonicity_scan(couette_problem(lambda, 0.0), disk_model(), lambda, grid, coarse_fsi());
  bool increasing = scan.all_ok;
  for (size_t i = 1; i < scan.rows.size() && increasing; ++i)
    increasing = scan.rows[i].phi > scan.rows[i - 1].phi;
  const double lo = scan.rows.front().phi, hi = scan.rows.back().phi;
  const bool ok = increasing && scan.strictly_increasing && lo < 0.0 && hi > 0.0;
  detail = fmt("phi(%.3f) = %.4f < 0 < phi(%.3f) = %.4f, strictly increasing over 11 points: %s",
               -h0, lo, h0, hi, increasing ? "yes" : "no");
  return ok;
}

// ---------------------------------------------------------------------------
// 8. the root finder agrees with a dense scan of the global force, and the
//    warm-started curve reproduces cold-started roots

bool c08(std::string& detail) {
  const FsiOptions opts = coarse_fsi();
  const RestoringForce model = disk_model();
  FlowProblem prob = couette_problem(0.5, 0.0);

  const EquilibriumResult eq = find_equilibrium(prob, model, opts);

  // 20 offsets, 0.001 apart, straddling the reported root
  const double cell = 1e-3;
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(eq.h_star + (i - 9.5) * cell);
  const ScanResult scan = monotonicity_scan(prob, model, prob.lambda, grid, opts);
  if (!scan.all_ok) {
    detail = "dense scan failed to resolve all offsets";
    return false;
  }
  size_t argmin = 0;
  for (size_t i = 1; i < scan.rows.size(); ++i)
    if (std::abs(scan.rows[i].phi) < std::abs(scan.rows[argmin].phi)) argmin = i;
  const double scan_gap = std::abs(grid[argmin] - eq.h_star);

  // warm-started continuation against cold roots on the same grid
  const std::vector<double> lambdas{0.0, 0.25, 0.5};
  const ContinuationCurve curve = continuation(prob, model, lambdas, opts);
  bool warm_ok = curve.points.size() == lambdas.size() && !curve.truncated;
  double worst_warm = 0.0;
  for (size_t i = 0; i < curve.points.size() && warm_ok; ++i) {
    warm_ok = curve.points[i].ok;
    if (!warm_ok || lambdas[i] == 0.0) continue;
    FlowProblem cold = prob;
    cold.lambda = lambdas[i];
    const EquilibriumResult ceq = find_equilibrium(cold, model, opts);
    worst_warm = std::max(worst_warm, std::abs(curve.points[i].eq.h_star - ceq.h_star));
  }
  const bool ok = scan_gap <= cell + 1e-15 && warm_ok && worst_warm <= kTolH;
  detail = fmt("root %.6f, scan argmin off by %.1e (cell %.0e); warm vs cold %.2e (tol %.0e)",
               eq.h_star, scan_gap, cell, worst_warm, kTolH);
  return ok;
}

// ---------------------------------------------------------------------------
// 9. near-wall lift growth stays within the admissible blow-up rates on both
//    walls and for both wall speeds

bool c09(std::string& detail) {
  FsiOptions opts;
  opts.mesh.size = 0.2;
  opts.mesh.body_refine = 2.0;
  const auto run = [&](const FlowProblem& prob, ApproachSide side) {
    return exponent_experiment(prob, side, {}, opts);
  };
  const ExponentFit bottom = run(couette_problem(0.4, 0.0), ApproachSide::Bottom);
  FlowProblem still_walls{kChan,   disk(), Placement{0.0, 0.0},
                          InflowProfile::poiseuille(1.0, kChan.H),
                          1.0,     0.4,    false,
                          nullptr, nullptr};
  const ExponentFit top_rest = run(still_walls, ApproachSide::Top);
  const ExponentFit top_moving = run(couette_problem(0.4, 0.0), ApproachSide::Top);

  const auto good = [](const ExponentFit& f, double bound) {
    return !f.skipped && f.gaps.size() >= 4 && f.bound == bound && f.slope >= bound - 0.25 &&
           f.within_bound;
  };
  const bool ok = good(bottom, -1.5) && good(top_rest, -1.5) && good(top_moving, -3.0);
  detail = fmt("slopes: bottom %.3f (>= -1.75), top U=0 %.3f (>= -1.75), top U=1 %.3f "
               "(>= -3.25); %zu/%zu/%zu gaps",
               bottom.slope, top_rest.slope, top_moving.slope, bottom.gaps.size(),
               top_rest.gaps.size(), top_moving.gaps.size());
  return ok;
}

// ---------------------------------------------------------------------------
// 10. tiny wind: the velocity norm grows linearly in lambda, and the linear
//     sub-solver is exactly homogeneous

bool c10(std::string& detail) {
  FlowProblem base = couette_problem(0.0, 0.1);
  const Mesh mesh = triangulate(kChan, base.shape, base.placement, coarse_mesh());

  const std::vector<double> lams{1e-3, 2e-3, 4e-3};
  std::vector<double> norms;
  for (const double l : lams) {
    FlowProblem p = base;
    p.lambda = l;
    norms.push_back(diff_norms(solve_navier_stokes(p, mesh), nullptr, nullptr).u_h1);
  }
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < lams.size(); ++i) {
    num += lams[i] * norms[i];
    den += lams[i] * lams[i];
  }
  const double k = num / den;  // best line through the origin
  double dev = 0.0;
  for (size_t i = 0; i < lams.size(); ++i)
    dev = std::max(dev, std::abs(norms[i] - k * lams[i]) / norms[i]);

  // doubling the data must exactly double the linear solution
  FlowProblem pa = base, pb = base;
  pa.lambda = 1e-3;
  pb.lambda = 2e-3;
  const FlowField sa = solve_stokes(pa, mesh);
  FlowField diff = solve_stokes(pb, mesh);
  for (size_t i = 0; i < diff.u.size(); ++i) diff.u[i] -= 2.0 * sa.u[i];
  for (size_t i = 0; i < diff.p.size(); ++i) diff.p[i] -= 2.0 * sa.p[i];
  diff.multiplier -= 2.0 * sa.multiplier;
  const double lin_defect = diff_norms(diff, nullptr, nullptr).u_h1;

  const bool ok = dev <= 0.05 && lin_defect <= 1e-10;
  detail = fmt("max deviation from the through-origin fit %.2f%% (tol 5%%); linear-solver "
               "homogeneity defect %.2e (tol 1e-10)",
               100.0 * dev, lin_defect);
  return ok;
}

// ---------------------------------------------------------------------------
// 11. randomized initial guesses land on one solution at the smallest wind of
//     each scenario family

bool c11(std::string& detail) {
  const FlowProblem shear = couette_problem(1e-3, 0.1);
  const Mesh mesh_a = triangulate(kChan, shear.shape, shear.placement, coarse_mesh());
  const double da = uniqueness_probe(shear, mesh_a, 3, 1234);

  const FlowProblem plug = plug_problem(0.01);
  const Mesh mesh_b = triangulate(kChan, plug.shape, plug.placement, coarse_mesh());
  const double db = uniqueness_probe(plug, mesh_b, 3, 4321);

  const bool ok = da <= 1e-8 && db <= 1e-8;
  detail = fmt("max pairwise H1 distance: shear %.2e, plug %.2e (tol 1e-8)", da, db);
  return ok;
}

// ---------------------------------------------------------------------------
// 12. identical manifests across re-runs, and the CLI writes byte-identical
//     artifacts to a direct library invocation

bool c12(std::string& detail) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cfsi_acceptance_12";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // hash stability and CLI parity must hold for any config, whether its
  // certificate passes or fails; exercise one of each
  const auto check = [&](const std::string& cfg_text, const std::string& stem,
                         std::string& note) {
    const fs::path cfg_file = dir / (stem + ".json");
    std::ofstream(cfg_file) << cfg_text;

    ScenarioConfig cfg = parse_config(cfg_text);
    cfg.out_dir = (dir / (stem + "_a")).string();
    const RunResult ra = run_scenario(cfg);
    cfg.out_dir = (dir / (stem + "_b")).string();
    const RunResult rb = run_scenario(cfg);

    bool rerun = ra.all_pass == rb.all_pass && ra.failures.empty() && rb.failures.empty() &&
                 ra.artifacts.size() == rb.artifacts.size() && !ra.artifacts.empty();
    for (size_t i = 0; rerun && i < ra.artifacts.size(); ++i)
      rerun = ra.artifacts[i].name == rb.artifacts[i].name &&
              ra.artifacts[i].sha256 == rb.artifacts[i].sha256;
    rerun = rerun && sha256_file_hex(ra.out_dir + "/manifest.txt") ==
                         sha256_file_hex(rb.out_dir + "/manifest.txt");

    const fs::path cli_dir = dir / (stem + "_cli");
    const std::string cmd = std::string(CFSI_CLI_PATH) + " run " + cfg_file.string() +
                            " --out " + cli_dir.string() + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
      note = "failed to launch the CLI";
      return false;
    }
    char buf[256];
    while (fgets(buf, sizeof buf, pipe) != nullptr) {
    }
    const int rc = pclose(pipe);
    // exit code mirrors the certificate verdict
    const bool cli_ok =
        rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) == (ra.all_pass ? 0 : 1);

    bool parity = cli_ok;
    for (const Artifact& a : ra.artifacts) {
      if (!parity) break;
      parity = sha256_file_hex((cli_dir / a.name).string()) == a.sha256;
    }
    parity = parity && sha256_file_hex((cli_dir / "manifest.txt").string()) ==
                           sha256_file_hex(ra.out_dir + "/manifest.txt");

    note = fmt("%zu artifacts, verdict %s, re-run %s, CLI parity %s", ra.artifacts.size(),
               ra.all_pass ? "PASS" : "FAIL", rerun ? "identical" : "DIFFERS",
               parity ? "holds" : "BROKEN");
    return rerun && parity;
  };

  // single converged solve: certificate passes
  std::string note_solve;
  const bool ok_solve = check(R"({
  "channel": {"H": 1.0, "Lrect": 1.5},
  "inflow": {"profile": "couette", "U": 1},
  "body": {"shape": {"kind": "ellipse", "a": 0.25, "b": 0.25}, "h": 0.2},
  "solver": {"size": 0.2, "body_refine": 2.0},
  "experiment": {"kind": "solve", "lambda": 0.3},
  "seed": 7
})",
                              "solve", note_solve);

  // coarse lift sweep across a near-zero-lift offset: the 2% agreement line
  // honestly fails at this resolution, and everything must still reproduce
  std::string note_lift;
  const bool ok_lift = check(R"({
  "channel": {"H": 1.0, "Lrect": 1.5},
  "inflow": {"profile": "couette", "U": 1},
  "body": {"shape": {"kind": "ellipse", "a": 0.25, "b": 0.25}, "h_grid": [-0.1, 0.25]},
  "solver": {"size": 0.2, "body_refine": 2.0},
  "experiment": {"kind": "lift", "lambda": 0.3},
  "seed": 7
})",
                             "lift", note_lift);

  detail = fmt("solve: %s; lift: %s", note_solve.c_str(), note_lift.c_str());
  return ok_solve && ok_lift;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }

  struct Row {
    int id;
    const char* label;
    bool (*fn)(std::string&);
  };
  const Row rows[] = {
      {1, "extension exactness", c01},
      {2, "manufactured-solution convergence", c02},
      {3, "zero-data degeneracy", c03},
      {4, "lift formula equivalence", c04},
      {5, "test-field independence", c05},
      {6, "symmetry certificate", c06},
      {7, "monotone global force", c07},
      {8, "equilibrium oracle", c08},
      {9, "near-wall growth bounds", c09},
      {10, "small-data linearity", c10},
      {11, "uniqueness probe", c11},
      {12, "determinism and CLI parity", c12},
  };

  bool all = true, ran_any = false;
  for (const Row& r : rows) {
    if (only != 0 && r.id != only) continue;
    ran_any = true;
    std::string detail;
    bool ok = false;
    try {
      ok = r.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %02d (%s): %s%s%s\n", r.id, r.label, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    all = all && ok;
  }
  if (!ran_any) {
    std::fprintf(stderr, "no such criterion: %d\n", only);
    return 2;
  }
  return all ? 0 : 1;
}
