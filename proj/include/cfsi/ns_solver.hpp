#pragma once

#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfsi/extension.hpp"
#include "cfsi/geometry.hpp"
#include "cfsi/mesh.hpp"
#include "cfsi/profiles.hpp"

namespace cfsi {

struct NonConvergence : std::runtime_error {
  NonConvergence(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

struct SingularJacobian : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Smooth vector field with first and second derivatives; the interface a
/// manufactured velocity must provide.
struct SmoothSample {
  Vec2 v{};
  Mat2 grad{};  // rows components, columns derivatives
  Vec2 lap{};   // componentwise Laplacian
};
class SmoothVecField {
 public:
  virtual ~SmoothVecField() = default;
  virtual SmoothSample eval(const Vec2& p) const = 0;
};

/// Stationary flow problem: channel + body geometry, wall-driven boundary
/// data scaled by lambda, optional body force.  When `exact_dirichlet` is
/// set (manufactured solutions), its trace replaces the wall/body data.
struct FlowProblem {
  Channel channel;
  BodyShape shape;
  Placement placement;
  InflowProfile profile;
  double mu = 1.0;
  double lambda = 0.0;
  bool symmetric_mode = false;  // both walls moving; must match the profile
  const AnalyticField* forcing = nullptr;
  const SmoothVecField* exact_dirichlet = nullptr;
};

struct SolverOptions {
  int picard_iters = 3;
  double newton_tol = 1e-10;  // absolute residual norm
  int max_newton = 25;
  int max_damping = 6;  // step halvings per Newton iteration
};

struct ConvergenceReport {
  bool converged = false;
  int newton_iters = 0;
  double final_residual = 0.0;
  std::vector<double> residual_history;  // one entry per linear solve
};

/// Discrete solution: quadratic nodal velocity (dof = 2*node + component,
/// nodes = vertices then edges), linear vertex pressure with zero mean, and
/// the gauge multiplier from the mean constraint.
struct FlowField {
  const Mesh* mesh = nullptr;
  std::vector<double> u;
  std::vector<double> p;
  double multiplier = 0.0;
  double lambda = 0.0;
  double mu = 1.0;  // viscosity the field was solved with (stress needs it)
  ConvergenceReport report;

  Vec2 velocity_node(int node) const { return {u[2 * node], u[2 * node + 1]}; }
};

/// Strong Dirichlet values for every boundary velocity node.
struct DirichletData {
  std::vector<char> fixed;    // per velocity dof
  std::vector<double> value;  // prescribed value where fixed
};
DirichletData apply_dirichlet(const FlowProblem& prob, const Mesh& mesh);

FlowField solve_stokes(const FlowProblem& prob, const Mesh& mesh);

/// Picard warm-up followed by damped Newton.  `initial` (optional) replaces
/// the Stokes seed and skips the Picard sweeps (a warm start goes straight
/// to Newton), e.g. for continuation in lambda or basin probing.
FlowField solve_navier_stokes(const FlowProblem& prob, const Mesh& mesh,
                              const SolverOptions& opts = {},
                              const FlowField* initial = nullptr);

/// Weak-form residual of a discrete field, reassembled from scratch: the
/// 2-norm over free momentum rows, continuity rows, and the mean constraint.
double residual_norm(const FlowField& field, const FlowProblem& prob);

/// Max pairwise discrete H1 velocity distance between solves started from
/// `n_starts` randomized perturbations of the Stokes seed.
double uniqueness_probe(const FlowProblem& prob, const Mesh& mesh, int n_starts,
                        unsigned seed = 1234, const SolverOptions& opts = {});

// --- manufactured solutions ------------------------------------------------

/// Divergence-free trigonometric velocity (componentwise Laplace
/// eigenfunction) and a matching smooth pressure.
class TrigVelocity : public SmoothVecField {
 public:
  SmoothSample eval(const Vec2& p) const override;
};
class TrigPressure : public ScalarField {
 public:
  ScalarSample eval(const Vec2& p) const override;
};

/// Body force reproducing (u*, p*): f = -mu lap(u*) [+ u*.grad(u*)] + grad(p*).
std::unique_ptr<AnalyticField> mms_forcing(const SmoothVecField& u, const ScalarField& p,
                                           double mu, bool include_convection = true);

struct FieldNorms {
  double u_l2 = 0.0;
  double u_h1 = 0.0;  // full H1 norm
  double p_l2 = 0.0;  // after aligning means
};
/// Norms of (field - exact); null exact terms mean "against zero".
FieldNorms diff_norms(const FlowField& field, const SmoothVecField* u_exact,
                      const ScalarField* p_exact);

/// CSV rows (x1, x2, u1, u2, p) at mesh vertices.
void dump_field_csv(const FlowField& field, std::ostream& os);

}  // namespace cfsi
