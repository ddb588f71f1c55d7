#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qrinv/forward.hpp"
#include "qrinv/support.hpp"

namespace qrinv {

/// Background fields E[kappa0] for every incident wave plus the stored
/// factorization of S - k^2 kappa0 M.
struct BackgroundSolution {
  std::shared_ptr<const DirectSolver> solver;
  std::vector<IncidentWave> waves;
  std::vector<ComplexVector> fields;
  Complex kappa0;

  const EdgeSpace& space() const { return solver->space(); }
};

BackgroundSolution solve_background(std::shared_ptr<const Mesh2D> mesh, const MediumConfig& medium,
                                    const std::vector<IncidentWave>& waves, const std::string& boundary_tag = "Gamma",
                                    const std::string& label = "inverse:kappa0");

/// Derivatives E^(n) of a -> E[kappa0 (1 + a chi_D)] at a = 0, n = 0..order,
/// and their traces T^(n) on one curve.
struct SensitivityChain {
  std::vector<TriangleWeight> weights;  // kappa0 * chi_D on covered triangles
  std::string curve;
  /// fields[w][n], n = 0..order (n = 0 is the background field).
  std::vector<std::vector<ComplexVector>> fields;
  /// traces[w][n - 1], n = 1..order.
  std::vector<std::vector<ComplexVector>> traces;

  int order() const { return fields.empty() ? 0 : static_cast<int>(fields.front().size()) - 1; }
};

/// kappa0 * coverage weights of a support; throws DegenerateSupport when the
/// support misses every triangle.
std::vector<TriangleWeight> support_weights(const Mesh2D& mesh, Complex kappa0, const Support& support);

SensitivityChain sensitivity_chain(const BackgroundSolution& bg, std::vector<TriangleWeight> weights, int order,
                                   const std::string& curve);
SensitivityChain sensitivity_chain(const BackgroundSolution& bg, const Support& support, int order,
                                   const std::string& curve);
/// Adds one order: rhs = n k^2 M_D E^(n-1), reusing the background factorization.
void extend_chain(SensitivityChain& chain, const BackgroundSolution& bg);

/// Traces of the Taylor expansion, terms[w][n - 1] = T^(n).
struct TaylorTrace {
  std::string curve;
  std::vector<std::vector<ComplexVector>> terms;

  int order() const { return terms.empty() ? 0 : static_cast<int>(terms.front().size()); }
};

TaylorTrace taylor_trace(const SensitivityChain& chain);
/// Truncated to the first `order` terms.
TaylorTrace taylor_trace(const SensitivityChain& chain, int order);

/// sum_{n=1..N} a^n / n! T^(n) per wave; |a| >= 1 throws InvalidArgument.
std::vector<ComplexVector> taylor_trace_eval(const TaylorTrace& tt, double a);

}  // namespace qrinv
