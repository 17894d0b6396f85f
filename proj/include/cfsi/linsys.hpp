#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cfsi {

struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MaxIterations : std::runtime_error {
  MaxIterations(const std::string& what, std::vector<double> best)
      : std::runtime_error(what), best_iterate(std::move(best)) {}
  std::vector<double> best_iterate;
};

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Square sparse matrix in compressed sparse row layout.  Column indices are
/// sorted within each row and duplicates have been summed at assembly.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  int dimension() const { return n_; }
  std::size_t nonzeros() const { return vals_.size(); }
  const std::vector<int>& row_offsets() const { return row_; }
  const std::vector<int>& column_indices() const { return col_; }
  const std::vector<double>& values() const { return vals_; }

  std::vector<double> multiply(const std::vector<double>& x) const;

  // Largest absolute entry; cheap stand-in for a norm in residual scaling.
  double max_abs() const;

 private:
  friend SparseMatrix assemble(int dimension, const std::vector<Triplet>& triplets);
  int n_ = 0;
  std::vector<int> row_;   // size n+1
  std::vector<int> col_;   // size nnz
  std::vector<double> vals_;
};

SparseMatrix assemble(int dimension, const std::vector<Triplet>& triplets);

struct LinearSolveReport {
  std::string method;      // "sparse-lu" or "gmres-ilu"
  bool converged = false;
  int iterations = 0;      // 0 for the direct path
  double residual = 0.0;   // ||Ax-b||_2, recomputed from the CSR data
};

std::vector<double> solve_direct(const SparseMatrix& A, const std::vector<double>& b,
                                 LinearSolveReport* report = nullptr);

std::vector<double> solve_iterative(const SparseMatrix& A, const std::vector<double>& b,
                                    double tol, int max_iterations,
                                    LinearSolveReport* report = nullptr);

/// Plain CSR residual ||Ax-b||_2 evaluated without any solver machinery.
double residual_norm(const SparseMatrix& A, const std::vector<double>& x,
                     const std::vector<double>& b);

void dump_matrix_market(const SparseMatrix& A, std::ostream& os);

}  // namespace cfsi
