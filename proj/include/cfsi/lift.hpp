#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cfsi/extension.hpp"
#include "cfsi/ns_solver.hpp"

namespace cfsi {

/// Vertical fluid force on the body, evaluated two independent ways: the
/// boundary stress integral and the volume identity through a divergence-free
/// test field.  The volume value is the better-behaved reference; the
/// discrepancy between the two is recorded, never hidden.
struct LiftResult {
  double value_boundary = 0.0;
  double value_volume = 0.0;
  double discrepancy = 0.0;  // |value_boundary - value_volume|
  double mesh_size = 0.0;
  Placement placement;
  double lambda = 0.0;
};

/// Fluid stress mu (grad u + grad u^T) - p I, from the one-sided trace of the
/// element containing `point`.  Throws std::domain_error outside the mesh.
Mat2 stress_tensor(const FlowField& field, const Vec2& point);

/// -e2 . integral of T n over the body boundary, with n pointing into the
/// body (outward for the fluid hole).
double lift_boundary(const FlowField& field);

/// Volume identity  -int u.grad u . w - mu int grad u : grad w + int p div w,
/// valid for any divergence-free w equal to e2 on the body and 0 on the
/// channel walls.  Evaluated against the quadratic interpolant of w with the
/// assembly quadrature, which makes it the discrete reaction force: exact
/// w-independence up to solver tolerance, and the divergence term (zero for w
/// itself, not for its interpolant) must be kept.
double lift_volume(const FlowField& field, const AnalyticField& w);

/// Both evaluations on one field; `collar_fraction` picks the test-field
/// collar width (the value must not depend on it beyond discretization error).
LiftResult evaluate_lift(const FlowField& field, const FlowProblem& prob,
                         double collar_fraction = 1.0);

struct LiftCurveRow {
  double h = 0.0;
  double eps_b = 0.0, eps_t = 0.0;  // wall gaps at this offset
  double lift_boundary = 0.0;
  double lift_volume = 0.0;
  double discrepancy = 0.0;
  int newton_iters = -1;
  bool ok = false;
  std::string error;  // failure note when !ok
};

/// One mesh and one converged solve per offset; meshing or solver failures
/// are recorded in the affected row and the sweep continues.
std::vector<LiftCurveRow> lift_curve(const FlowProblem& prob, const std::vector<double>& h_grid,
                                     const MeshOptions& mesh_opts = {},
                                     const SolverOptions& solver_opts = {});

void dump_lift_curve_csv(const std::vector<LiftCurveRow>& rows, std::ostream& os);

}  // namespace cfsi
