#pragma once

#include <complex>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>

namespace qrinv {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using SparseComplexMatrix = Eigen::SparseMatrix<Complex>;
using SparseRealMatrix = Eigen::SparseMatrix<double>;

/// Reusable sparse LU of a complex square matrix (partial pivoting, COLAMD
/// column ordering). Immutable once built; solves may run concurrently.
class Factorization {
 public:
  /// `label` names the system for factorization instrumentation.
  explicit Factorization(const SparseComplexMatrix& a, std::string label = "unnamed");

  ComplexVector solve(const ComplexVector& rhs) const;
  std::vector<ComplexVector> solve_many(std::span<const ComplexVector> rhs) const;

  Eigen::Index dimension() const { return dimension_; }
  const std::string& label() const { return label_; }
  /// Smallest and largest |U_jj|.
  double min_pivot() const { return min_pivot_; }
  double max_pivot() const { return max_pivot_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  Eigen::Index dimension_ = 0;
  std::string label_;
  double min_pivot_ = 0.0;
  double max_pivot_ = 0.0;
};

/// Number of factorizations performed per label since the last reset.
std::map<std::string, int> factorization_counts();
void reset_factorization_counts();

/// max |a_ij - a_ji|.
double symmetry_defect(const SparseComplexMatrix& a);

}  // namespace qrinv
