#include "qrinv/sensitivity.hpp"

#include <cmath>

#include "qrinv/error.hpp"

namespace qrinv {

BackgroundSolution solve_background(std::shared_ptr<const Mesh2D> mesh, const MediumConfig& medium,
                                    const std::vector<IncidentWave>& waves, const std::string& boundary_tag,
                                    const std::string& label) {
  const EdgeSpace space(mesh);
  BackgroundSolution bg;
  bg.kappa0 = background_kappa(medium);
  bg.solver = std::make_shared<const DirectSolver>(space, CoefficientField::uniform(*mesh, bg.kappa0), medium,
                                                   boundary_tag, label);
  bg.waves = waves;
  bg.fields = bg.solver->solve_waves(waves);
  return bg;
}

std::vector<TriangleWeight> support_weights(const Mesh2D& mesh, Complex kappa0, const Support& support) {
  const std::vector<double> frac = coverage(mesh, support);
  std::vector<TriangleWeight> weights;
  for (std::size_t t = 0; t < frac.size(); ++t) {
    if (frac[t] > 0.0) weights.push_back({static_cast<Index>(t), kappa0 * frac[t]});
  }
  if (weights.empty()) throw DegenerateSupport("support does not overlap the mesh: " + support.describe());
  return weights;
}

void extend_chain(SensitivityChain& chain, const BackgroundSolution& bg) {
  const double k = bg.solver->medium().wavenumber();
  const EdgeSpace& space = bg.space();
  for (std::size_t w = 0; w < chain.fields.size(); ++w) {
    auto& f = chain.fields[w];
    const double n = static_cast<double>(f.size());
    const ComplexVector rhs = (n * k * k) * apply_weighted_mass(space, chain.weights, f.back());
    f.push_back(bg.solver->solve_load(rhs));
    chain.traces[w].push_back(tangential_trace(space, f.back(), chain.curve));
  }
}

SensitivityChain sensitivity_chain(const BackgroundSolution& bg, std::vector<TriangleWeight> weights, int order,
                                   const std::string& curve) {
  if (order < 1) throw InvalidArgument("sensitivity order must be at least 1");
  if (weights.empty()) throw DegenerateSupport("empty perturbation support");
  bg.space().mesh().curve(curve);
  SensitivityChain chain;
  chain.weights = std::move(weights);
  chain.curve = curve;
  for (const auto& e0 : bg.fields) chain.fields.push_back({e0});
  chain.traces.resize(bg.fields.size());
  for (int n = 1; n <= order; ++n) extend_chain(chain, bg);
  return chain;
}

SensitivityChain sensitivity_chain(const BackgroundSolution& bg, const Support& support, int order,
                                   const std::string& curve) {
  return sensitivity_chain(bg, support_weights(bg.space().mesh(), bg.kappa0, support), order, curve);
}

TaylorTrace taylor_trace(const SensitivityChain& chain) { return taylor_trace(chain, chain.order()); }

TaylorTrace taylor_trace(const SensitivityChain& chain, int order) {
  if (order < 1 || order > chain.order()) throw InvalidArgument("Taylor order out of range of the chain");
  TaylorTrace tt;
  tt.curve = chain.curve;
  for (const auto& t : chain.traces) tt.terms.emplace_back(t.begin(), t.begin() + order);
  return tt;
}

std::vector<ComplexVector> taylor_trace_eval(const TaylorTrace& tt, double a) {
  if (!(std::abs(a) < 1.0)) throw InvalidArgument("amplitude must satisfy |a| < 1");
  std::vector<ComplexVector> out;
  for (const auto& terms : tt.terms) {
    ComplexVector v = ComplexVector::Zero(terms.empty() ? 0 : terms.front().size());
    double coeff = 1.0;
    for (std::size_t n = 0; n < terms.size(); ++n) {
      coeff *= a / static_cast<double>(n + 1);
      v += coeff * terms[n];
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace qrinv
