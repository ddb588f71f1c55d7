#include "qrinv/sparse.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include <Eigen/SparseLU>

#include "qrinv/error.hpp"

namespace qrinv {

namespace {

std::mutex& counts_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, int>& counts() {
  static std::map<std::string, int> c;
  return c;
}

// Pivots below this fraction of the largest one are treated as zero.
constexpr double kSingularPivotRatio = 64.0 * std::numeric_limits<double>::epsilon();

}  // namespace

struct Factorization::Impl {
  Eigen::SparseLU<SparseComplexMatrix, Eigen::COLAMDOrdering<int>> lu;
};

Factorization::Factorization(const SparseComplexMatrix& a, std::string label) : label_(std::move(label)) {
  if (a.rows() != a.cols()) throw FactorizationFailure("factorize: matrix is not square");
  dimension_ = a.rows();
  auto impl = std::make_shared<Impl>();
  SparseComplexMatrix compressed = a;
  compressed.makeCompressed();
  impl->lu.compute(compressed);
  if (impl->lu.info() != Eigen::Success) {
    throw FactorizationFailure("factorize(" + label_ + "): " + impl->lu.lastErrorMessage());
  }

  // The diagonal of the supernodal L storage holds the pivots of U.
  const auto& stored = impl->lu.matrixL().m_mapL;
  min_pivot_ = std::numeric_limits<double>::infinity();
  max_pivot_ = 0.0;
  Eigen::Index worst = -1;
  for (Eigen::Index j = 0; j < dimension_; ++j) {
    for (typename std::decay_t<decltype(stored)>::InnerIterator it(stored, j); it; ++it) {
      if (it.row() == j) {
        const double p = std::abs(it.value());
        if (p < min_pivot_) {
          min_pivot_ = p;
          worst = j;
        }
        max_pivot_ = std::max(max_pivot_, p);
      }
    }
  }
  if (dimension_ > 0 && !(min_pivot_ > kSingularPivotRatio * max_pivot_)) {
    std::ostringstream msg;
    msg << "factorize(" << label_ << "): numerically singular, |pivot| " << min_pivot_ << " at permuted column "
        << worst << " vs max " << max_pivot_;
    throw FactorizationFailure(msg.str());
  }
  impl_ = std::move(impl);
  std::lock_guard lock(counts_mutex());
  ++counts()[label_];
}

ComplexVector Factorization::solve(const ComplexVector& rhs) const {
  if (rhs.size() != dimension_) throw InvalidArgument("solve: right-hand side has the wrong size");
  ComplexVector x = impl_->lu.solve(rhs);
  return x;
}

std::vector<ComplexVector> Factorization::solve_many(std::span<const ComplexVector> rhs) const {
  std::vector<ComplexVector> out;
  out.reserve(rhs.size());
  for (const auto& b : rhs) out.push_back(solve(b));
  return out;
}

std::map<std::string, int> factorization_counts() {
  std::lock_guard lock(counts_mutex());
  return counts();
}

void reset_factorization_counts() {
  std::lock_guard lock(counts_mutex());
  counts().clear();
}

double symmetry_defect(const SparseComplexMatrix& a) {
  SparseComplexMatrix diff = a - SparseComplexMatrix(a.transpose());
  double m = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseComplexMatrix::InnerIterator it(diff, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

}  // namespace qrinv
