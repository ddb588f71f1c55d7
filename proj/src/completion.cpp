#include "qrinv/completion.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "qrinv/error.hpp"

namespace qrinv {

namespace {

using Triplet = Eigen::Triplet<Complex>;

void append_block(std::vector<Triplet>& trips, const SparseComplexMatrix& m, Eigen::Index row0, Eigen::Index col0,
                  Complex factor) {
  if (factor == Complex(0.0)) return;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseComplexMatrix::InnerIterator it(m, k); it; ++it) {
      trips.emplace_back(row0 + it.row(), col0 + it.col(), factor * it.value());
    }
  }
}

double quadratic_form(const SparseComplexMatrix& m, const ComplexVector& x) { return x.dot(m * x).real(); }

ComplexVector stack(const ComplexVector& e, const ComplexVector& f) {
  ComplexVector x(e.size() + f.size());
  x << e, f;
  return x;
}

}  // namespace

void QRConfig::validate() const {
  if (!(delta > 0.0)) throw InvalidArgument("QR penalty delta must be positive");
  if (max_iters < 1) throw InvalidArgument("QR max_iters must be at least 1");
  if (!(rel_change_tol > 0.0)) throw InvalidArgument("QR rel_change_tol must be positive");
}

double ResidualBlocks::total() const {
  return std::sqrt(volume_curl_f * volume_curl_f + volume_curl_e * volume_curl_e + trace_e * trace_e +
                   trace_f * trace_f);
}

QROperator::QROperator(std::shared_ptr<const Mesh2D> mesh, const MediumConfig& medium, std::string data_tag,
                       bool scaled)
    : mesh_(std::move(mesh)), edge_(mesh_), nodal_(mesh_), data_tag_(std::move(data_tag)), scaled_(scaled) {
  medium.validate();
  mesh_->curve(data_tag_);
  const double k = medium.wavenumber();
  const Complex kappa0 = background_kappa(medium);
  if (scaled_) {
    c1_ = k * std::sqrt(kappa0);
    c2_ = c1_;
  } else {
    c1_ = k * k * kappa0;
    c2_ = 1.0;
  }

  const std::vector<Complex> ones(mesh_->triangle_count(), Complex(1.0));
  mass_e_ = assemble_weighted_mass(edge_, ones);
  curlcurl_ = assemble_curlcurl(edge_);
  stiff_n_ = assemble_nodal_stiffness(nodal_);
  mass_n_ = assemble_nodal_mass(nodal_);
  curl_mixed_ = assemble_mixed_curl(nodal_, edge_);
  curl_nodal_ = assemble_curl_nodal(edge_, nodal_);
  trace_e_ = assemble_boundary_mass(edge_, data_tag_);
  trace_n_ = assemble_nodal_boundary_mass(nodal_, data_tag_);

  const Eigen::Index ne = edge_.dof_count(), n = size();
  std::vector<Triplet> trips;
  // curl F - c1 E
  append_block(trips, mass_e_, 0, 0, std::norm(c1_));
  append_block(trips, curl_mixed_, 0, ne, -std::conj(c1_));
  append_block(trips, SparseComplexMatrix(curl_mixed_.transpose()), ne, 0, -c1_);
  append_block(trips, stiff_n_, ne, ne, 1.0);
  // curl E - c2 F
  append_block(trips, curlcurl_, 0, 0, 1.0);
  append_block(trips, curl_nodal_, 0, ne, -c2_);
  append_block(trips, SparseComplexMatrix(curl_nodal_.transpose()), ne, 0, -std::conj(c2_));
  append_block(trips, mass_n_, ne, ne, std::norm(c2_));
  // traces on the data curve
  append_block(trips, trace_e_, 0, 0, 1.0);
  append_block(trips, trace_n_, ne, ne, 1.0);
  gram_.resize(n, n);
  gram_.setFromTriplets(trips.begin(), trips.end());
  gram_.makeCompressed();

  trips.clear();
  append_block(trips, mass_e_, 0, 0, 1.0);
  append_block(trips, mass_n_, ne, ne, 1.0);
  penalty_.resize(n, n);
  penalty_.setFromTriplets(trips.begin(), trips.end());
  penalty_.makeCompressed();
}

ComplexVector QROperator::adjoint_data(const CauchyData& data) const {
  const auto& curve = mesh_->curve(data_tag_);
  if (data.dirichlet.size() != curve.size() || data.neumann.size() != curve.size()) {
    throw InvalidArgument("Cauchy data must have one sample per edge of the data curve");
  }
  std::vector<Complex> neumann_scaled(data.neumann.size());
  for (std::size_t i = 0; i < neumann_scaled.size(); ++i) neumann_scaled[i] = data.neumann[i] / c2_;
  return stack(assemble_boundary_load(edge_, data_tag_, data.dirichlet),
               assemble_nodal_boundary_load(nodal_, data_tag_, neumann_scaled));
}

double QROperator::data_norm2(const CauchyData& data) const {
  const auto& curve = mesh_->curve(data_tag_);
  double acc = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    acc += (std::norm(data.dirichlet[i]) + std::norm(data.neumann[i] / c2_)) * curve[i].length;
  }
  return acc;
}

ResidualBlocks QROperator::residual(const ComplexVector& e, const ComplexVector& f, const CauchyData& data) const {
  ResidualBlocks r;
  const double r1 = std::norm(c1_) * quadratic_form(mass_e_, e) -
                    2.0 * (std::conj(c1_) * e.dot(curl_mixed_ * f)).real() + quadratic_form(stiff_n_, f);
  const double r2 = quadratic_form(curlcurl_, e) - 2.0 * (c2_ * e.dot(curl_nodal_ * f)).real() +
                    std::norm(c2_) * quadratic_form(mass_n_, f);
  r.volume_curl_f = std::sqrt(std::max(0.0, r1));
  r.volume_curl_e = std::sqrt(std::max(0.0, r2));

  const auto& curve = mesh_->curve(data_tag_);
  const ComplexVector trace = tangential_trace(edge_, e, data_tag_);
  double t3 = 0.0, t4 = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double len = curve[i].length;
    t3 += std::norm(trace[static_cast<Eigen::Index>(i)] - data.dirichlet[i]) * len;
    const Complex g = data.neumann[i] / c2_;
    const auto& ed = mesh_->edges[curve[i].edge];
    const Complex a = f[ed[0]] - g, b = f[ed[1]] - g;
    t4 += len / 3.0 * (std::norm(a) + std::norm(b) + (a * std::conj(b)).real());
  }
  r.trace_e = std::sqrt(t3);
  r.trace_f = std::sqrt(t4);
  return r;
}

QRSolver::QRSolver(std::shared_ptr<const QROperator> op, const QRConfig& cfg)
    : op_(std::move(op)),
      cfg_((cfg.validate(), cfg)),
      factorization_(SparseComplexMatrix(op_->gram() + cfg.delta * op_->penalty()), "qr:normal") {}

QRState QRSolver::iterate(const CauchyData& data, std::optional<int> forced_iterations) const {
  const ComplexVector rhs = op_->adjoint_data(data);
  const double y2 = op_->data_norm2(data);
  const auto& gram = op_->gram();
  const auto& penalty = op_->penalty();
  const int iters = forced_iterations.value_or(cfg_.max_iters);

  ComplexVector x = ComplexVector::Zero(op_->size());
  QRState state;
  for (int m = 0; m < iters; ++m) {
    const ComplexVector x_new = factorization_.solve(rhs + cfg_.delta * (penalty * x));
    const double res2 = quadratic_form(gram, x_new) - 2.0 * x_new.dot(rhs).real() + y2;
    const double res = std::sqrt(std::max(0.0, res2));
    if (!state.residual_history.empty()) {
      const double prev = state.residual_history.back();
      const double scale = std::max(state.residual_history.front(), std::sqrt(y2));
      if (res > prev + 1e-12 * scale) {
        ++state.residual_increases;
        spdlog::warn("QR residual increased at iteration {}: {} -> {}", m, prev, res);
      }
    }
    state.residual_history.push_back(res);
    const ComplexVector dx = x_new - x;
    const double change = std::sqrt(std::max(0.0, quadratic_form(penalty, dx)));
    const double size = std::sqrt(std::max(0.0, quadratic_form(penalty, x_new)));
    x = x_new;
    state.iterations = m + 1;
    if (size == 0.0) break;
    if (!forced_iterations && change / size < cfg_.rel_change_tol) break;
  }
  const Eigen::Index ne = op_->edge_space().dof_count();
  state.e = x.head(ne);
  state.f = x.tail(op_->nodal_space().dof_count());
  return state;
}

ComplexVector completed_trace(const QROperator& op, const QRState& state, const std::string& curve) {
  return tangential_trace(op.edge_space(), state.e, curve);
}

CompletionReport complete_traces(const QRSolver& solver, const TraceData& delta_on_data_curve,
                                 const std::string& interior_tag) {
  const Mesh2D& mesh = solver.op().edge_space().mesh();
  CompletionReport report;
  report.traces.curve = interior_tag;
  report.traces.samples = curve_samples(mesh, interior_tag);
  for (const auto& wave : delta_on_data_curve.waves) {
    CauchyData data;
    data.dirichlet.assign(wave.data(), wave.data() + wave.size());
    data.neumann.assign(data.dirichlet.size(), Complex(0.0));
    QRState state = solver.iterate(data);
    report.traces.waves.push_back(completed_trace(solver.op(), state, interior_tag));
    report.iterations.push_back(state.iterations);
    report.residual_increases += state.residual_increases;
    report.residuals.push_back(std::move(state.residual_history));
  }
  return report;
}

}  // namespace qrinv
