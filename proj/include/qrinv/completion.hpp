#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qrinv/fem.hpp"
#include "qrinv/forward.hpp"

namespace qrinv {

struct QRConfig {
  double delta = 0.1;
  int max_iters = 50;
  double rel_change_tol = 1e-3;
  bool scaled_variant = false;

  void validate() const;
};

/// Iterate of the quasi-reversibility sequence: E on edges, F on nodes.
struct QRState {
  ComplexVector e;
  ComplexVector f;
  /// ||A x_M - y||_Y after each iteration.
  std::vector<double> residual_history;
  int iterations = 0;
  /// Steps where the residual grew by more than round-off.
  int residual_increases = 0;
};

/// Norms of the four residual blocks of A x - y.
struct ResidualBlocks {
  double volume_curl_f = 0.0;  // curl F - c1 E
  double volume_curl_e = 0.0;  // curl E - c2 F
  double trace_e = 0.0;        // E x n - g_D on the data curve
  double trace_f = 0.0;        // F x n - g_N (scaled) on the data curve

  double total() const;
};

/// Cauchy data on the accessible curve, one sample per tagged edge.
struct CauchyData {
  std::vector<Complex> dirichlet;  // g_D = E . tau
  std::vector<Complex> neumann;    // g_N = curl E
};

/// Discrete operator (E, F) -> (curl F - k^2 kappa0 E, curl E - F, E x n|G0, F x n|G0)
/// on the known neighborhood, stored through the Gram forms of its blocks.
/// The scaled variant uses curl F - k sqrt(kappa0) E, curl E - k sqrt(kappa0) F and
/// divides the Neumann data by k sqrt(kappa0).
class QROperator {
 public:
  QROperator(std::shared_ptr<const Mesh2D> mesh, const MediumConfig& medium, std::string data_tag, bool scaled);

  const EdgeSpace& edge_space() const { return edge_; }
  const NodalSpace& nodal_space() const { return nodal_; }
  const std::string& data_tag() const { return data_tag_; }
  bool scaled() const { return scaled_; }
  Eigen::Index size() const { return edge_.dof_count() + nodal_.dof_count(); }

  /// Hermitian Gram matrix G with <A x, A x'>_Y = x'^H G x.
  const SparseComplexMatrix& gram() const { return gram_; }
  /// Block-diagonal L2 pair inner product, b(x, x') = x'^H P x.
  const SparseComplexMatrix& penalty() const { return penalty_; }

  /// A^* y, with y = (0, 0, g_D, g_N / scale).
  ComplexVector adjoint_data(const CauchyData& data) const;
  /// ||y||_Y^2
  double data_norm2(const CauchyData& data) const;
  ResidualBlocks residual(const ComplexVector& e, const ComplexVector& f, const CauchyData& data) const;

  /// Multiplier of E in the first block and of F in the second.
  Complex first_block_factor() const { return c1_; }
  Complex second_block_factor() const { return c2_; }
  /// F unknown = curl E / neumann_scale.
  Complex neumann_scale() const { return c2_; }

 private:
  std::shared_ptr<const Mesh2D> mesh_;
  EdgeSpace edge_;
  NodalSpace nodal_;
  std::string data_tag_;
  bool scaled_;
  Complex c1_;
  Complex c2_;
  SparseComplexMatrix mass_e_, stiff_n_, mass_n_, curl_mixed_, curl_nodal_, trace_e_, trace_n_, curlcurl_;
  SparseComplexMatrix gram_;
  SparseComplexMatrix penalty_;
};

/// Iterated quasi-reversibility solver: one factorization of
/// N = G + delta P, then x_M = N^{-1} (A^* y + delta P x_{M-1}), x_{-1} = 0.
class QRSolver {
 public:
  QRSolver(std::shared_ptr<const QROperator> op, const QRConfig& cfg);

  /// Stops at max_iters or when ||x_M - x_{M-1}|| / ||x_M|| < tol.
  /// `forced_iterations` disables the relative-change stop.
  QRState iterate(const CauchyData& data, std::optional<int> forced_iterations = std::nullopt) const;

  const QROperator& op() const { return *op_; }
  const QRConfig& config() const { return cfg_; }
  const Factorization& factorization() const { return factorization_; }

 private:
  std::shared_ptr<const QROperator> op_;
  QRConfig cfg_;
  Factorization factorization_;
};

/// Tangential trace of the E component on a curve of the neighborhood mesh.
ComplexVector completed_trace(const QROperator& op, const QRState& state, const std::string& curve);

/// Transmits difference data (delta g_D, 0) from the accessible curve to the
/// interior curve for every wave. Returns the completed traces.
struct CompletionReport {
  TraceData traces;
  std::vector<int> iterations;
  std::vector<std::vector<double>> residuals;
  int residual_increases = 0;
};

CompletionReport complete_traces(const QRSolver& solver, const TraceData& delta_on_data_curve,
                                 const std::string& interior_tag);

}  // namespace qrinv
