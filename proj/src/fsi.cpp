#include "cfsi/fsi.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <thread>
#include <utility>

#include "cfsi/lift.hpp"

namespace cfsi {

namespace {

void check_model(const RestoringForce& m) {
  if (!(m.gamma > 0.0)) throw std::invalid_argument("restoring force: gamma must be > 0");
  if (!(m.K_b > 0.0) || !(m.K_t > 0.0))
    throw std::invalid_argument("restoring force: blow-up strengths must be > 0");
  if (m.U != 0 && m.U != 1)
    throw std::invalid_argument("restoring force: U must be 0 or 1");
  if (m.c_theta < 0.0)
    throw std::invalid_argument("restoring force: tilt coupling must be >= 0");
  // the tilt term's h-slope is 2 c_theta theta h; keep it below gamma over the
  // deck range |theta| < pi/4, |h| < H, so f stays strictly increasing
  if (m.c_theta * (M_PI / 2.0) * m.channel.H >= m.gamma)
    throw std::invalid_argument("restoring force: tilt coupling too strong for gamma");
}

double default_tol_h(const FsiOptions& o, const Channel& ch) {
  return o.tol_h > 0.0 ? o.tol_h : 1e-4 * ch.H;
}

double default_tol_phi(const FsiOptions& o, const RestoringForce& m) {
  return o.tol_phi > 0.0 ? o.tol_phi : 1e-8 * std::max(1.0, m.gamma * m.channel.H);
}

double default_margin(const FsiOptions& o, const Channel& ch) {
  return o.admissibility_margin > 0.0 ? o.admissibility_margin : 0.04 * ch.H;
}

// admissible offset window keeping both gaps at least `margin` wide
std::pair<double, double> offset_window(const RestoringForce& m, double theta,
                                        double margin) {
  const Extents e = body_extents(m.shape, theta);
  return {-(m.channel.H - e.delta_b) + margin, (m.channel.H - e.delta_t) - margin};
}

void check_geometry_agrees(const FlowProblem& prob, const RestoringForce& model) {
  if (prob.channel.Lrect != model.channel.Lrect || prob.channel.H != model.channel.H)
    throw std::invalid_argument("global force: flow and force model channels disagree");
  const Extents a = body_extents(prob.shape, prob.placement.theta);
  const Extents b = body_extents(model.shape, prob.placement.theta);
  if (std::abs(a.delta_b - b.delta_b) > 1e-12 || std::abs(a.delta_t - b.delta_t) > 1e-12 ||
      std::abs(a.tau - b.tau) > 1e-12)
    throw std::invalid_argument("global force: flow and force model bodies disagree");
}

// Deterministic worker pool: rows are written by index only, so the merged
// result does not depend on scheduling.  Bodies must not throw.
void parallel_rows(int n, int threads, const std::function<void(int)>& body) {
  int k = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  k = std::max(1, std::min({k, n, 8}));
  if (k == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(k);
  for (int t = 0; t < k; ++t)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) body(i);
    });
  for (auto& th : pool) th.join();
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b);
  return buf;
}

}  // namespace

double restoring_force_theta(const RestoringForce& model, double h, double theta) {
  check_model(model);
  const Extents e = body_extents(model.shape, theta);
  const Gaps g0 = gaps(model.channel, e, 0.0);
  const Gaps g = gaps(model.channel, e, h);
  if (g0.eps_b <= 0.0 || g0.eps_t <= 0.0)
    throw std::domain_error("restoring force: body does not fit the channel at h = 0");
  if (g.eps_b <= 0.0 || g.eps_t <= 0.0)
    throw std::domain_error("restoring force: offset leaves the admissible range");

  const auto gfun = [&](double eps) {
    return std::pow(eps, -1.5) + (model.U ? std::pow(eps, -3.0) : 0.0);
  };
  return model.gamma * h +
         model.K_b * (std::pow(g0.eps_b, -1.5) - std::pow(g.eps_b, -1.5)) +
         model.K_t * (gfun(g.eps_t) - gfun(g0.eps_t)) +
         model.c_theta * theta * (1.0 + h * h);
}

double restoring_force(const RestoringForce& model, double h) {
  return restoring_force_theta(model, h, 0.0);
}

GlobalForce global_force(const FlowProblem& prob, const RestoringForce& model, double h,
                         const FsiOptions& opts) {
  check_geometry_agrees(prob, model);
  GlobalForce out;
  out.f_restoring = restoring_force_theta(model, h, prob.placement.theta);
  out.diag.lambda = prob.lambda;
  out.diag.h = h;

  if (prob.lambda == 0.0) {
    // the zero flow is the unique solution of the no-wind problem, so the
    // lift vanishes without running a solve
    out.diag.from_shortcut = true;
    out.lift = 0.0;
  } else {
    FlowProblem p = prob;
    p.placement.h = h;
    FlowField field;
    try {
      const Mesh mesh = triangulate(p.channel, p.shape, p.placement, opts.mesh);
      field = solve_navier_stokes(p, mesh, opts.solver);
      out.lift = evaluate_lift(field, p).value_volume;
    } catch (const NonConvergence&) {
      // one retry on a finer mesh before giving up on this offset
      MeshOptions finer = opts.mesh;
      finer.size *= 0.5;
      out.diag.retried = true;
      const Mesh mesh = triangulate(p.channel, p.shape, p.placement, finer);
      field = solve_navier_stokes(p, mesh, opts.solver);
      out.lift = evaluate_lift(field, p).value_volume;
    }
    out.diag.newton_iters = field.report.newton_iters;
    out.diag.final_residual = field.report.final_residual;
  }
  out.phi = out.f_restoring - out.lift;
  return out;
}

namespace {

// Bracketed root loop shared by the public entry points.  Endpoint values are
// handed in already evaluated so bracket expansion does not redo solves.
EquilibriumResult solve_bracketed(const FlowProblem& prob, const RestoringForce& model,
                                  double a, double b, GlobalForce ga, GlobalForce gb,
                                  EquilibriumResult res, const FsiOptions& opts) {
  const double tol_h = default_tol_h(opts, prob.channel);
  const double tol_phi = default_tol_phi(opts, model);

  if (!(ga.phi < 0.0 && gb.phi > 0.0)) throw NoSignChange(ga.phi, gb.phi);
  res.lambda = prob.lambda;
  res.history.push_back({a, b, ga.phi, gb.phi});

  // best-so-far among every evaluation, endpoints included
  double h_best, phi_best, lift_best;
  if (std::abs(ga.phi) <= std::abs(gb.phi)) {
    h_best = a, phi_best = ga.phi, lift_best = ga.lift;
  } else {
    h_best = b, phi_best = gb.phi, lift_best = gb.lift;
  }

  int last_side = 0, same_side = 0;
  while (std::abs(phi_best) > tol_phi && b - a > tol_h &&
         res.iterations < opts.max_root_iters) {
    // secant proposal, clipped well inside the bracket; fall back to the
    // midpoint when the previous two updates hit the same side (the classic
    // false-position stall on convex phi)
    double c = 0.5 * (a + b);
    const double denom = gb.phi - ga.phi;
    if (same_side < 2 && denom > 0.0) {
      const double sec = b - gb.phi * (b - a) / denom;
      const double pad = 0.1 * (b - a);
      c = std::min(std::max(sec, a + pad), b - pad);
    }

    const GlobalForce gc = global_force(prob, model, c, opts);
    res.solves.push_back(gc.diag);
    ++res.iterations;
    if (gc.diag.retried) res.warnings.push_back(fmt("solve retried on finer mesh at h=%.6g", c));
    // phi should be strictly increasing between the bracket ends
    if (gc.phi <= ga.phi || gc.phi >= gb.phi)
      res.warnings.push_back(fmt("non-monotone sample: phi(%.6g)=%.6g outside bracket values", c, gc.phi));

    if (std::abs(gc.phi) < std::abs(phi_best)) {
      h_best = c, phi_best = gc.phi, lift_best = gc.lift;
    }
    if (gc.phi == 0.0) break;
    const int side = gc.phi < 0.0 ? -1 : 1;
    same_side = (side == last_side) ? same_side + 1 : 0;
    last_side = side;
    if (side < 0) {
      a = c, ga = gc;
    } else {
      b = c, gb = gc;
    }
    res.history.push_back({a, b, ga.phi, gb.phi});
  }

  if (res.iterations >= opts.max_root_iters && b - a > tol_h &&
      std::abs(phi_best) > tol_phi)
    res.warnings.push_back(fmt("iteration cap hit with bracket width %.3g", b - a));

  res.h_star = h_best;
  res.phi_at_root = phi_best;
  res.lift_at_root = lift_best;
  res.bracket_a = a;
  res.bracket_b = b;
  res.phi_a = ga.phi;
  res.phi_b = gb.phi;
  return res;
}

// Expands [center - w, center + w] by 1.5x (clamped to the admissible window)
// until phi changes sign across it, then hands over to the bracketed loop.
EquilibriumResult bracket_and_solve(const FlowProblem& prob, const RestoringForce& model,
                                    double center, double w0, const FsiOptions& opts) {
  const auto [lo, hi] = offset_window(model, prob.placement.theta,
                                      default_margin(opts, prob.channel));
  if (!(lo < hi))
    throw std::invalid_argument("equilibrium: admissible offset window is empty");

  EquilibriumResult res;
  double w = w0;
  double a = 0.0, b = 0.0;
  GlobalForce ga, gb;
  for (int round = 0;; ++round) {
    a = std::max(center - w, lo);
    b = std::min(center + w, hi);
    ga = global_force(prob, model, a, opts);
    gb = global_force(prob, model, b, opts);
    res.solves.push_back(ga.diag);
    res.solves.push_back(gb.diag);
    if (ga.phi < 0.0 && gb.phi > 0.0) break;
    if ((a == lo && b == hi) || round >= 24) throw NoSignChange(ga.phi, gb.phi);
    w *= 1.5;
  }
  return solve_bracketed(prob, model, a, b, ga, gb, std::move(res), opts);
}

double default_h0(const RestoringForce& model, double theta, const FsiOptions& opts) {
  if (opts.bracket_h0 > 0.0) return opts.bracket_h0;
  const Gaps g0 = gaps(model.channel, body_extents(model.shape, theta), 0.0);
  return 0.5 * std::min(g0.eps_b, g0.eps_t);
}

}  // namespace

EquilibriumResult find_equilibrium(const FlowProblem& prob, const RestoringForce& model,
                                   double a, double b, const FsiOptions& opts) {
  if (!(a < b)) throw std::invalid_argument("equilibrium: bracket must satisfy a < b");
  check_model(model);
  EquilibriumResult res;
  const GlobalForce ga = global_force(prob, model, a, opts);
  const GlobalForce gb = global_force(prob, model, b, opts);
  res.solves.push_back(ga.diag);
  res.solves.push_back(gb.diag);
  return solve_bracketed(prob, model, a, b, ga, gb, std::move(res), opts);
}

EquilibriumResult find_equilibrium(const FlowProblem& prob, const RestoringForce& model,
                                   const FsiOptions& opts) {
  check_model(model);
  return bracket_and_solve(prob, model, 0.0,
                           default_h0(model, prob.placement.theta, opts), opts);
}

ContinuationCurve continuation(const FlowProblem& prob, const RestoringForce& model,
                               const std::vector<double>& lambda_grid,
                               const FsiOptions& opts) {
  check_model(model);
  if (lambda_grid.empty() || lambda_grid.front() != 0.0)
    throw std::invalid_argument("continuation: lambda grid must start at 0");
  for (size_t i = 1; i < lambda_grid.size(); ++i)
    if (!(lambda_grid[i] > lambda_grid[i - 1]))
      throw std::invalid_argument("continuation: lambda grid must be strictly ascending");

  const double h0 = default_h0(model, prob.placement.theta, opts);
  const double tol_h = default_tol_h(opts, prob.channel);
  const double warm_w = std::max(0.05 * h0, 16.0 * tol_h);

  ContinuationCurve curve;
  bool have_prev = false;
  double prev_h = 0.0;
  for (const double lam : lambda_grid) {
    FlowProblem p = prob;
    p.lambda = lam;
    ContinuationPoint pt;
    pt.lambda = lam;
    try {
      pt.eq = have_prev ? bracket_and_solve(p, model, prev_h, warm_w, opts)
                        : bracket_and_solve(p, model, 0.0, h0, opts);
      pt.ok = true;
      if (have_prev)
        curve.max_step = std::max(curve.max_step, std::abs(pt.eq.h_star - prev_h));
      prev_h = pt.eq.h_star;
      have_prev = true;
      curve.points.push_back(std::move(pt));
    } catch (const NoSignChange& e) {
      pt.error = fmt("no sign change: phi ends %.6g / %.6g", e.phi_a, e.phi_b);
      curve.points.push_back(std::move(pt));
      curve.truncated = true;  // empirical end of the followed branch
      break;
    } catch (const std::exception& e) {
      pt.error = e.what();
      curve.points.push_back(std::move(pt));
      // keep following the curve from the last good root
    }
  }
  return curve;
}

ScanResult monotonicity_scan(const FlowProblem& prob, const RestoringForce& model,
                             double lambda, const std::vector<double>& h_grid,
                             const FsiOptions& opts) {
  check_model(model);
  if (h_grid.size() < 2)
    throw std::invalid_argument("monotonicity scan: need at least two offsets");
  for (size_t i = 1; i < h_grid.size(); ++i)
    if (!(h_grid[i] > h_grid[i - 1]))
      throw std::invalid_argument("monotonicity scan: offsets must be strictly ascending");

  FlowProblem p = prob;
  p.lambda = lambda;
  ScanResult scan;
  scan.rows.resize(h_grid.size());
  parallel_rows(static_cast<int>(h_grid.size()), opts.threads, [&](int i) {
    ScanRow& row = scan.rows[i];
    row.h = h_grid[i];
    try {
      const GlobalForce g = global_force(p, model, row.h, opts);
      row.phi = g.phi;
      row.lift = g.lift;
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });

  scan.all_ok = true;
  scan.strictly_increasing = true;
  const ScanRow* prev = nullptr;
  for (const ScanRow& r : scan.rows) {
    if (!r.ok) {
      scan.all_ok = false;
      continue;
    }
    if (prev && !(r.phi > prev->phi)) scan.strictly_increasing = false;
    prev = &r;
  }
  return scan;
}

namespace {

// Largest mirror defects of a discrete field over a bitwise-mirrored mesh.
void mirror_defects(const Mesh& m, const FlowField& f, double& du1, double& du2,
                    double& dp) {
  std::map<std::pair<double, double>, int> at;
  for (int n = 0; n < m.n_p2_nodes(); ++n) {
    const Vec2 x = m.node_pos(n);
    at[{x.x, x.y}] = n;
  }
  du1 = du2 = dp = 0.0;
  for (int n = 0; n < m.n_p2_nodes(); ++n) {
    const Vec2 x = m.node_pos(n);
    const auto it = at.find({x.x, -x.y});
    if (it == at.end()) throw std::logic_error("symmetry: node lacks a mirror partner");
    const int nm = it->second;
    du1 = std::max(du1, std::abs(f.u[2 * n] - f.u[2 * nm]));
    du2 = std::max(du2, std::abs(f.u[2 * n + 1] + f.u[2 * nm + 1]));
    if (n < m.n_vertices()) dp = std::max(dp, std::abs(f.p[n] - f.p[it->second]));
  }
}

}  // namespace

SymmetryReport symmetry_certificate(const FlowProblem& prob, const RestoringForce& model,
                                    const std::vector<double>& lambdas,
                                    double certify_below, const FsiOptions& opts) {
  check_model(model);
  if (!prob.symmetric_mode)
    throw std::invalid_argument("symmetry certificate: data must drive both walls equally");
  if (prob.placement.theta != 0.0)
    throw std::invalid_argument("symmetry certificate: body must be untilted");
  if (!prob.shape.mirror_symmetric())
    throw std::invalid_argument("symmetry certificate: body must be mirror-symmetric");
  if (lambdas.empty())
    throw std::invalid_argument("symmetry certificate: empty lambda sample");

  // one mirror-exact mesh serves every lambda (geometry is fixed at h = 0)
  const Mesh mirror = symmetrize(prob.channel, prob.shape, Placement{0.0, 0.0}, opts.mesh);
  const double tol_h = default_tol_h(opts, prob.channel);

  SymmetryReport rep;
  rep.rows.resize(lambdas.size());
  for (size_t i = 0; i < lambdas.size(); ++i) {
    SymmetryRow& row = rep.rows[i];
    row.lambda = lambdas[i];
    row.report_only = lambdas[i] > certify_below;
    try {
      FlowProblem p = prob;
      p.lambda = lambdas[i];
      p.placement.h = 0.0;
      const FlowField f = solve_navier_stokes(p, mirror, opts.solver);
      const LiftResult lr = evaluate_lift(f, p);
      row.lift_boundary = lr.value_boundary;
      row.lift_volume = lr.value_volume;
      mirror_defects(mirror, f, row.sym_u1, row.sym_u2, row.sym_p);
      row.h_star = find_equilibrium(p, model, opts).h_star;

      const double lift_tol = 1e-8 * (1.0 + lambdas[i]);
      const double mirror_tol = 1e-9;
      row.within_tol = std::abs(row.lift_boundary) <= lift_tol &&
                       std::abs(row.lift_volume) <= lift_tol &&
                       std::abs(row.h_star) <= tol_h && row.sym_u1 <= mirror_tol &&
                       row.sym_u2 <= mirror_tol && row.sym_p <= mirror_tol;
      if (!row.within_tol && !row.report_only)
        rep.violations.push_back(fmt("lambda=%.6g violates the symmetry tolerances", row.lambda));
    } catch (const std::exception& e) {
      row.error = e.what();
      if (!row.report_only)
        rep.violations.push_back(fmt("lambda=%.6g failed: ", row.lambda) + e.what());
    }
  }
  rep.certified = rep.violations.empty();
  return rep;
}

ExponentFit exponent_experiment(const FlowProblem& prob, ApproachSide side,
                                std::vector<double> gap_sequence, const FsiOptions& opts) {
  if (gap_sequence.empty())
    gap_sequence = {0.2 * prob.channel.H, 0.1 * prob.channel.H, 0.05 * prob.channel.H,
                    0.025 * prob.channel.H, 0.0125 * prob.channel.H};
  std::sort(gap_sequence.begin(), gap_sequence.end(), std::greater<double>());
  if (gap_sequence.size() < 4)
    throw std::invalid_argument("exponent experiment: need at least 4 gaps");
  if (!(gap_sequence.front() >= 10.0 * gap_sequence.back()))
    throw std::invalid_argument("exponent experiment: gaps must span a decade");
  if (!(gap_sequence.back() > 0.0))
    throw std::invalid_argument("exponent experiment: gaps must be positive");

  const Extents e = body_extents(prob.shape, prob.placement.theta);
  ExponentFit fit;
  fit.side = side;
  // the -3 rate needs the approached wall to move; only the top one can
  fit.bound = (side == ApproachSide::Top && prob.profile.U() != 0.0) ? -3.0 : -1.5;

  struct Point {
    double gap = 0.0, lift = 0.0;
    bool ok = false;
    SolveDiag diag;
    std::string error;
  };
  std::vector<Point> pts(gap_sequence.size());
  parallel_rows(static_cast<int>(gap_sequence.size()), opts.threads, [&](int i) {
    Point& pt = pts[i];
    pt.gap = gap_sequence[i];
    FlowProblem p = prob;
    p.placement.h = side == ApproachSide::Bottom
                        ? pt.gap - (p.channel.H - e.delta_b)
                        : (p.channel.H - e.delta_t) - pt.gap;
    try {
      const Mesh mesh = triangulate(p.channel, p.shape, p.placement, opts.mesh);
      const FlowField f = solve_navier_stokes(p, mesh, opts.solver);
      pt.lift = std::abs(evaluate_lift(f, p).value_volume);
      pt.diag.lambda = p.lambda;
      pt.diag.h = p.placement.h;
      pt.diag.newton_iters = f.report.newton_iters;
      pt.diag.final_residual = f.report.final_residual;
      pt.ok = true;
    } catch (const std::exception& ex) {
      pt.error = ex.what();
    }
  });

  const double floor = 1e-12 * std::max(1.0, prob.lambda);
  int resolved = 0, above_floor = 0;
  for (const Point& pt : pts) {
    if (!pt.ok) continue;
    ++resolved;
    fit.gaps.push_back(pt.gap);
    fit.lifts.push_back(pt.lift);
    fit.solves.push_back(pt.diag);
    if (pt.lift > floor) ++above_floor;
  }
  if (above_floor == 0) {
    // nothing but noise (the no-wind case): there is no blow-up to measure
    fit.skipped = true;
    fit.within_bound = true;
    return fit;
  }
  if (resolved < 4 || above_floor < 4)
    throw std::runtime_error("exponent experiment: fewer than 4 resolved gaps");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < fit.gaps.size(); ++i) {
    if (fit.lifts[i] <= floor) continue;
    const double x = std::log(fit.gaps[i]), y = std::log(fit.lifts[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++n;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (size_t i = 0; i < fit.gaps.size(); ++i) {
    if (fit.lifts[i] <= floor) continue;
    const double r = std::log(fit.lifts[i]) - (intercept + fit.slope * std::log(fit.gaps[i]));
    ss += r * r;
  }
  fit.fit_rms = std::sqrt(ss / n);
  fit.within_bound = fit.slope >= fit.bound - 0.25;
  return fit;
}

std::vector<BridgeRow> bridge_sweep(const FlowProblem& prob, const RestoringForce& model,
                                    const std::vector<double>& theta_grid, double lambda,
                                    const FsiOptions& opts) {
  check_model(model);
  if (theta_grid.empty()) throw std::invalid_argument("bridge sweep: empty tilt grid");
  for (const double th : theta_grid)
    if (!(std::abs(th) < M_PI / 4.0))
      throw std::invalid_argument("bridge sweep: tilts must lie in (-pi/4, pi/4)");

  const double margin = default_margin(opts, prob.channel);
  std::vector<BridgeRow> rows(theta_grid.size());
  parallel_rows(static_cast<int>(theta_grid.size()), opts.threads, [&](int i) {
    BridgeRow& row = rows[i];
    row.theta = theta_grid[i];
    const Extents e = body_extents(prob.shape, row.theta);
    row.delta_b = e.delta_b;
    row.delta_t = e.delta_t;
    const Gaps g0 = gaps(prob.channel, e, 0.0);
    row.admissible = g0.eps_b > margin && g0.eps_t > margin;
    if (!row.admissible) {
      row.error = "tilted deck leaves no admissible offset window";
      return;
    }
    FlowProblem p = prob;
    p.lambda = lambda;
    p.placement.theta = row.theta;
    try {
      row.eq = bracket_and_solve(p, model, 0.0, default_h0(model, row.theta, opts), opts);
      row.ok = true;
    } catch (const NoSignChange& e2) {
      row.error = fmt("no sign change: phi ends %.6g / %.6g", e2.phi_a, e2.phi_b);
    } catch (const std::exception& e2) {
      row.error = e2.what();
    }
  });
  return rows;
}

void dump_continuation_csv(const ContinuationCurve& curve, std::ostream& os) {
  os << "lambda,h_star,phi_at_root,lift_at_root,iterations,solves,ok,error\n";
  char buf[320];
  for (const auto& pt : curve.points) {
    if (pt.ok) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%d,%zu,1,\n", pt.lambda,
                    pt.eq.h_star, pt.eq.phi_at_root, pt.eq.lift_at_root, pt.eq.iterations,
                    pt.eq.solves.size());
      os << buf;
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g,nan,nan,nan,0,0,0,", pt.lambda);
      os << buf << pt.error << "\n";
    }
  }
}

void dump_scan_csv(const ScanResult& scan, std::ostream& os) {
  os << "h,phi,lift,ok\n";
  char buf[240];
  for (const auto& r : scan.rows) {
    if (r.ok)
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,1\n", r.h, r.phi, r.lift);
    else
      std::snprintf(buf, sizeof(buf), "%.17g,nan,nan,0\n", r.h);
    os << buf;
  }
}

void dump_exponent_csv(const ExponentFit& fit, std::ostream& os) {
  os << "gap,lift_abs,newton_iters\n";
  char buf[240];
  for (size_t i = 0; i < fit.gaps.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d\n", fit.gaps[i], fit.lifts[i],
                  i < fit.solves.size() ? fit.solves[i].newton_iters : -1);
    os << buf;
  }
}

void dump_bridge_csv(const std::vector<BridgeRow>& rows, std::ostream& os) {
  os << "theta,delta_b,delta_t,admissible,ok,h_star,lift_at_root,iterations,error\n";
  char buf[360];
  for (const auto& r : rows) {
    if (r.ok) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d,1,%.17g,%.17g,%d,\n", r.theta,
                    r.delta_b, r.delta_t, r.admissible ? 1 : 0, r.eq.h_star,
                    r.eq.lift_at_root, r.eq.iterations);
      os << buf;
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d,0,nan,nan,0,", r.theta,
                    r.delta_b, r.delta_t, r.admissible ? 1 : 0);
      os << buf << r.error << "\n";
    }
  }
}

void dump_symmetry_csv(const SymmetryReport& report, std::ostream& os) {
  os << "lambda,lift_boundary,lift_volume,h_star,sym_u1,sym_u2,sym_p,within_tol,report_only\n";
  char buf[400];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n",
                  r.lambda, r.lift_boundary, r.lift_volume, r.h_star, r.sym_u1, r.sym_u2,
                  r.sym_p, r.within_tol ? 1 : 0, r.report_only ? 1 : 0);
    os << buf;
  }
}

}  // namespace cfsi
