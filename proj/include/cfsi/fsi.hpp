#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfsi/geometry.hpp"
#include "cfsi/mesh.hpp"
#include "cfsi/ns_solver.hpp"

namespace cfsi {

// Thrown by the root finder when an interval fails to enclose a sign change
// of the global force; carries the offending endpoint values.
struct NoSignChange : std::runtime_error {
  NoSignChange(double pa, double pb)
      : std::runtime_error("no sign change of the global force across the bracket"),
        phi_a(pa),
        phi_b(pb) {}
  double phi_a;
  double phi_b;
};

// Elastic restoring force acting on the body's vertical offset.  The family
//
//   f(h) = gamma h + K_b [e_b(0)^{-3/2} - e_b(h)^{-3/2}]
//               + K_t [g(e_t(h)) - g(e_t(0))],   g(e) = e^{-3/2} + U e^{-3},
//
// where e_b, e_t are the wall gaps, vanishes at h = 0, grows at slope >= gamma,
// and blows up near either wall at the same rate the lift does on that side --
// which is what keeps equilibria strictly inside the channel.  A deck tilted
// by theta additionally feels c_theta * theta * (1 + h^2).
struct RestoringForce {
  Channel channel{1.5, 1.0};
  BodyShape shape = BodyShape::ellipse(0.25, 0.25);
  double gamma = 5.0;    // minimal slope in h
  double K_b = 0.1;      // bottom blow-up strength
  double K_t = 0.1;      // top blow-up strength
  int U = 1;             // 1 when the top wall moves (selects the e^{-3} rate)
  double c_theta = 0.0;  // tilt coupling for deck sweeps
};

double restoring_force(const RestoringForce& model, double h);
double restoring_force_theta(const RestoringForce& model, double h, double theta);

// Knobs shared by the equilibrium operations.  Negative tolerances select the
// defaults, which scale with the channel and the force model:
//   tol_h  = 1e-4 * H,   tol_phi = 1e-8 * max(1, gamma * H).
struct FsiOptions {
  MeshOptions mesh{};
  SolverOptions solver{};
  double tol_h = -1.0;
  double tol_phi = -1.0;
  double bracket_h0 = -1.0;            // <0: half the smaller centered gap
  double admissibility_margin = -1.0;  // <0: 0.04 * H; floor kept under each gap
  int max_root_iters = 80;
  int threads = 0;  // 0: hardware concurrency; sweeps merge rows by index
};

struct SolveDiag {
  double lambda = 0.0;
  double h = 0.0;
  int newton_iters = 0;
  double final_residual = 0.0;
  bool retried = false;        // mesh was refined once after a failed solve
  bool from_shortcut = false;  // lambda = 0: zero flow assumed, no solve run
};

// phi = f(h) - lift(lambda, h); equilibria are the zeros of phi in h.
struct GlobalForce {
  double phi = 0.0;
  double f_restoring = 0.0;
  double lift = 0.0;
  SolveDiag diag;
};

GlobalForce global_force(const FlowProblem& prob, const RestoringForce& model, double h,
                         const FsiOptions& opts = {});

struct BracketStep {
  double a, b;
  double phi_a, phi_b;
};

struct EquilibriumResult {
  double lambda = 0.0;
  double h_star = 0.0;
  double phi_at_root = 0.0;
  double lift_at_root = 0.0;
  double bracket_a = 0.0, bracket_b = 0.0;  // final enclosure, phi_a < 0 < phi_b
  double phi_a = 0.0, phi_b = 0.0;
  int iterations = 0;
  std::vector<BracketStep> history;
  std::vector<SolveDiag> solves;
  std::vector<std::string> warnings;  // non-monotone phi samples, retries, ...
};

// Root of phi on [a, b]; requires phi(a) < 0 < phi(b).
EquilibriumResult find_equilibrium(const FlowProblem& prob, const RestoringForce& model,
                                   double a, double b, const FsiOptions& opts = {});
// Same, but the bracket starts at +-bracket_h0 around 0 and expands (factor
// 1.5, capped by the admissibility margin) until it straddles the root.
EquilibriumResult find_equilibrium(const FlowProblem& prob, const RestoringForce& model,
                                   const FsiOptions& opts = {});

struct ContinuationPoint {
  double lambda = 0.0;
  bool ok = false;
  EquilibriumResult eq;
  std::string error;
};

struct ContinuationCurve {
  std::vector<ContinuationPoint> points;
  double max_step = 0.0;  // max |h*(next) - h*(prev)| over adjacent ok points
  bool truncated = false;  // stopped at the first bracket without a sign change
};

// Warm-started path following along an ascending lambda grid starting at 0.
ContinuationCurve continuation(const FlowProblem& prob, const RestoringForce& model,
                               const std::vector<double>& lambda_grid,
                               const FsiOptions& opts = {});

struct ScanRow {
  double h = 0.0;
  double phi = 0.0;
  double lift = 0.0;
  bool ok = false;
  std::string error;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  bool all_ok = false;
  bool strictly_increasing = false;  // certificate over consecutive resolved rows
};

ScanResult monotonicity_scan(const FlowProblem& prob, const RestoringForce& model,
                             double lambda, const std::vector<double>& h_grid,
                             const FsiOptions& opts = {});

struct SymmetryRow {
  double lambda = 0.0;
  double lift_boundary = 0.0;
  double lift_volume = 0.0;
  double h_star = 0.0;
  double sym_u1 = 0.0;  // max |u1(x,y) - u1(x,-y)| over mirrored node pairs
  double sym_u2 = 0.0;  // max |u2(x,y) + u2(x,-y)|
  double sym_p = 0.0;   // max |p(x,y) - p(x,-y)|
  bool within_tol = false;
  bool report_only = false;  // moderate lambda: recorded, not certified
  std::string error;
};

struct SymmetryReport {
  std::vector<SymmetryRow> rows;
  bool certified = false;
  std::vector<std::string> violations;
};

// Certifies that a mirror-symmetric configuration carries no lift, equilibrates
// at h* = 0, and produces mirror-symmetric discrete fields on a mirror-exact
// mesh.  Rows with lambda above `certify_below` are informational only.
SymmetryReport symmetry_certificate(const FlowProblem& prob, const RestoringForce& model,
                                    const std::vector<double>& lambdas = {0.0, 0.01, 0.05},
                                    double certify_below = 0.051,
                                    const FsiOptions& opts = {});

enum class ApproachSide { Bottom, Top };

struct ExponentFit {
  ApproachSide side = ApproachSide::Bottom;
  std::vector<double> gaps;   // resolved gap widths
  std::vector<double> lifts;  // |lift| at each gap
  double slope = 0.0;         // least-squares slope of log|lift| vs log(gap)
  double fit_rms = 0.0;
  double bound = 0.0;  // admissible blow-up: -1.5, or -3 when the moving top wall is approached
  bool within_bound = false;  // slope >= bound - 0.25
  bool skipped = false;       // all lifts at the noise floor (lambda = 0)
  std::vector<SolveDiag> solves;
};

// Measures how fast the lift blows up as the body approaches a wall.  Gaps
// default to {0.2, 0.1, 0.05, 0.025, 0.0125} * H; at least 4 resolved points
// spanning a decade are required.
ExponentFit exponent_experiment(const FlowProblem& prob, ApproachSide side,
                                std::vector<double> gap_sequence = {},
                                const FsiOptions& opts = {});

struct BridgeRow {
  double theta = 0.0;
  double delta_b = 0.0, delta_t = 0.0;  // extents of the tilted deck
  bool admissible = false;
  bool ok = false;
  EquilibriumResult eq;
  std::string error;
};

// Equilibrium offset per deck tilt over a grid in (-pi/4, pi/4); inadmissible
// tilts are flagged in their row rather than aborting the sweep.
std::vector<BridgeRow> bridge_sweep(const FlowProblem& prob, const RestoringForce& model,
                                    const std::vector<double>& theta_grid, double lambda,
                                    const FsiOptions& opts = {});

void dump_continuation_csv(const ContinuationCurve& curve, std::ostream& os);
void dump_scan_csv(const ScanResult& scan, std::ostream& os);
void dump_exponent_csv(const ExponentFit& fit, std::ostream& os);
void dump_bridge_csv(const std::vector<BridgeRow>& rows, std::ostream& os);
void dump_symmetry_csv(const SymmetryReport& report, std::ostream& os);

}  // namespace cfsi
