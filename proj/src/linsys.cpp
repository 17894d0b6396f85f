/// Sparse assembly and the two solve paths (direct LU, preconditioned
/// Krylov).  The heavy lifting is delegated to Eigen; everything observable
/// (CSR layout, residuals) is recomputed locally so reports stay honest.

#include "cfsi/linsys.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

namespace cfsi {

namespace {

// SparseLU only accepts column-major storage, so both paths share it.
using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor>;

EigenSparse to_eigen(const SparseMatrix& A) {
  const int n = A.dimension();
  EigenSparse M(n, n);
  std::vector<Eigen::Triplet<double>> ts;
  ts.reserve(A.nonzeros());
  const auto& row = A.row_offsets();
  const auto& col = A.column_indices();
  const auto& val = A.values();
  for (int i = 0; i < n; ++i)
    for (int k = row[i]; k < row[i + 1]; ++k) ts.emplace_back(i, col[k], val[k]);
  M.setFromTriplets(ts.begin(), ts.end());
  M.makeCompressed();
  return M;
}

}  // namespace

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("linsys: dimension mismatch in multiply");
  std::vector<double> y(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int k = row_[i]; k < row_[i + 1]; ++k) s += vals_[k] * x[col_[k]];
    y[i] = s;
  }
  return y;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (const double v : vals_) m = std::max(m, std::abs(v));
  return m;
}

SparseMatrix assemble(int dimension, const std::vector<Triplet>& triplets) {
  if (dimension < 0) throw std::invalid_argument("linsys: negative dimension");
  for (const Triplet& t : triplets)
    if (t.row < 0 || t.row >= dimension || t.col < 0 || t.col >= dimension) {
      std::ostringstream msg;
      msg << "linsys: triplet (" << t.row << ", " << t.col << ") out of range for n="
          << dimension;
      throw std::out_of_range(msg.str());
    }

  // bucket by row, then sort and sum duplicates within each row
  std::vector<int> count(dimension + 1, 0);
  for (const Triplet& t : triplets) ++count[t.row + 1];
  for (int i = 0; i < dimension; ++i) count[i + 1] += count[i];
  std::vector<std::pair<int, double>> slot(triplets.size());
  {
    std::vector<int> cursor(count.begin(), count.end() - 1);
    for (const Triplet& t : triplets) slot[cursor[t.row]++] = {t.col, t.value};
  }

  SparseMatrix A;
  A.n_ = dimension;
  A.row_.assign(dimension + 1, 0);
  A.col_.reserve(triplets.size());
  A.vals_.reserve(triplets.size());
  for (int i = 0; i < dimension; ++i) {
    const auto begin = slot.begin() + count[i], end = slot.begin() + count[i + 1];
    std::sort(begin, end,
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = begin; it != end;) {
      const int c = it->first;
      double s = 0.0;
      for (; it != end && it->first == c; ++it) s += it->second;
      A.col_.push_back(c);
      A.vals_.push_back(s);
    }
    A.row_[i + 1] = static_cast<int>(A.col_.size());
  }
  return A;
}

double residual_norm(const SparseMatrix& A, const std::vector<double>& x,
                     const std::vector<double>& b) {
  const std::vector<double> ax = A.multiply(x);
  double s = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double r = ax[i] - b[i];
    s += r * r;
  }
  return std::sqrt(s);
}

std::vector<double> solve_direct(const SparseMatrix& A, const std::vector<double>& b,
                                 LinearSolveReport* report) {
  if (static_cast<int>(b.size()) != A.dimension())
    throw std::invalid_argument("linsys: rhs dimension mismatch");
  const EigenSparse M = to_eigen(A);
  Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(M);
  lu.factorize(M);
  if (lu.info() != Eigen::Success)
    throw SingularMatrix("linsys: LU factorization failed: " + lu.lastErrorMessage());
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
  const Eigen::VectorXd sol = lu.solve(rhs);
  std::vector<double> x(sol.data(), sol.data() + sol.size());
  if (report) {
    report->method = "sparse-lu";
    report->converged = true;
    report->iterations = 0;
    report->residual = residual_norm(A, x, b);
  }
  return x;
}

std::vector<double> solve_iterative(const SparseMatrix& A, const std::vector<double>& b,
                                    double tol, int max_iterations,
                                    LinearSolveReport* report) {
  if (tol <= 0.0) throw std::invalid_argument("linsys: tolerance must be positive");
  if (static_cast<int>(b.size()) != A.dimension())
    throw std::invalid_argument("linsys: rhs dimension mismatch");
  const EigenSparse M = to_eigen(A);
  Eigen::GMRES<EigenSparse, Eigen::IncompleteLUT<double>> gmres(M);
  gmres.setTolerance(tol);
  gmres.setMaxIterations(max_iterations);
  gmres.set_restart(80);
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
  const Eigen::VectorXd sol = gmres.solve(rhs);
  std::vector<double> x(sol.data(), sol.data() + sol.size());

  const double res = residual_norm(A, x, b);
  double bnorm = 0.0;
  for (const double v : b) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  const bool ok = res <= tol * std::max(bnorm, 1e-300);
  if (report) {
    report->method = "gmres-ilu";
    report->converged = ok;
    report->iterations = static_cast<int>(gmres.iterations());
    report->residual = res;
  }
  if (!ok)
    throw MaxIterations("linsys: iterative solve did not reach tolerance", std::move(x));
  return x;
}

void dump_matrix_market(const SparseMatrix& A, std::ostream& os) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.dimension() << ' ' << A.dimension() << ' ' << A.nonzeros() << '\n';
  os << std::setprecision(17);
  const auto& row = A.row_offsets();
  const auto& col = A.column_indices();
  const auto& val = A.values();
  for (int i = 0; i < A.dimension(); ++i)
    for (int k = row[i]; k < row[i + 1]; ++k)
      os << i + 1 << ' ' << col[k] + 1 << ' ' << val[k] << '\n';
}

}  // namespace cfsi
