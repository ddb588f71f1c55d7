#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qrinv/completion.hpp"
#include "qrinv/error.hpp"

using namespace qrinv;

namespace {

const MediumConfig unit_medium{};

std::shared_ptr<const Mesh2D> annulus(double h) {
  return std::make_shared<const Mesh2D>(tag_patches(mesh_annulus(0.7, 1.0, h, {0.8}), "Gamma_outer", {}));
}

// Cauchy data of the exact plane wave on the accessible patches.
CauchyData plane_wave_data(const Mesh2D& mesh, const IncidentWave& w) {
  CauchyData d;
  for (const auto& ce : mesh.curve("Gamma0")) {
    const Point x = mesh.edge_midpoint(ce.edge);
    const ComplexPoint e = plane_wave_field(w, unit_medium, x);
    const Point tau = perp(ce.normal);
    d.dirichlet.push_back(e.x * tau.x + e.y * tau.y);
    d.neumann.push_back(plane_wave_curl(w, unit_medium, x));
  }
  return d;
}

ComplexVector stack(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector x(a.size() + b.size());
  x << a, b;
  return x;
}

}  // namespace

TEST_CASE("operator of the zero state") {
  const auto mesh = annulus(0.1);
  const QROperator op(mesh, unit_medium, "Gamma0", false);
  CauchyData zero;
  zero.dirichlet.assign(mesh->curve("Gamma0").size(), 0.0);
  zero.neumann = zero.dirichlet;
  const ResidualBlocks r = op.residual(ComplexVector::Zero(op.edge_space().dof_count()),
                                       ComplexVector::Zero(op.nodal_space().dof_count()), zero);
  CHECK(r.total() == 0.0);
  CHECK(op.adjoint_data(zero).norm() == 0.0);
  CHECK_THROWS_AS(QROperator(mesh, unit_medium, "missing", false), UnknownTag);
}

TEST_CASE("Gram form reproduces the residual blocks") {
  const auto mesh = annulus(0.1);
  for (bool scaled : {false, true}) {
    const QROperator op(mesh, unit_medium, "Gamma0", scaled);
    const CauchyData data = plane_wave_data(*mesh, IncidentWave::from_angle(0.7));
    std::mt19937 rng(1);
    std::normal_distribution<double> nd;
    ComplexVector e(op.edge_space().dof_count()), f(op.nodal_space().dof_count());
    for (auto& v : e) v = Complex(nd(rng), nd(rng));
    for (auto& v : f) v = Complex(nd(rng), nd(rng));
    const ComplexVector x = stack(e, f);
    const double via_gram =
        x.dot(op.gram() * x).real() - 2.0 * x.dot(op.adjoint_data(data)).real() + op.data_norm2(data);
    const double blocks = std::pow(op.residual(e, f, data).total(), 2);
    CHECK(via_gram == doctest::Approx(blocks).epsilon(1e-10));
    const SparseComplexMatrix g = op.gram();
    CHECK(symmetry_defect(SparseComplexMatrix(g - SparseComplexMatrix(g.adjoint()))) <= 1e-14 * g.norm());
  }
}

TEST_CASE("normal matrix is Hermitian positive definite") {
  const auto mesh = std::make_shared<const Mesh2D>(tag_patches(mesh_annulus(0.7, 1.0, 0.12, {}), "Gamma_outer", {}));
  const QROperator op(mesh, unit_medium, "Gamma0", false);
  const Eigen::MatrixXcd n = oracle::dense(op.gram()) + 0.1 * oracle::dense(op.penalty());
  CHECK((n - n.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(oracle::min_hermitian_eigenvalue(n) > 0.0);
}

TEST_CASE("interpolated plane wave has first-order volume residual") {
  std::vector<double> res;
  for (double h : {0.1, 0.05}) {
    const auto mesh = annulus(h);
    const QROperator op(mesh, unit_medium, "Gamma0", false);
    const IncidentWave w = IncidentWave::from_angle(0.4);
    const ComplexVector e = interpolate_edge(op.edge_space(), [&](Point x) { return plane_wave_field(w, unit_medium, x); });
    ComplexVector f(op.nodal_space().dof_count());
    for (std::size_t v = 0; v < mesh->vertex_count(); ++v) f[v] = plane_wave_curl(w, unit_medium, mesh->vertices[v]);
    const ResidualBlocks r = op.residual(e, f, plane_wave_data(*mesh, w));
    const ComplexVector e0 = stack(e, ComplexVector::Zero(f.size()));
    const double scale = std::abs(op.first_block_factor()) * std::sqrt(e0.dot(op.penalty() * e0).real());
    res.push_back(std::hypot(r.volume_curl_f, r.volume_curl_e) / scale);
  }
  CHECK(res[0] < 0.1);
  CHECK(oracle::rate(res[0], res[1]) > 0.8);
}

TEST_CASE("QR iteration") {
  const auto mesh = annulus(0.08);
  const auto op = std::make_shared<const QROperator>(mesh, unit_medium, "Gamma0", false);
  const QRSolver solver(op, QRConfig{});
  const CauchyData data = plane_wave_data(*mesh, IncidentWave::from_angle(2.0));

  SUBCASE("zero data") {
    CauchyData zero = data;
    std::fill(zero.dirichlet.begin(), zero.dirichlet.end(), 0.0);
    std::fill(zero.neumann.begin(), zero.neumann.end(), 0.0);
    const QRState s = solver.iterate(zero, 5);
    CHECK(s.e.norm() == 0.0);
    CHECK(s.f.norm() == 0.0);
  }
  SUBCASE("monotone residual and completion of a consistent field") {
    const QRState s = solver.iterate(data);
    CHECK(s.residual_increases == 0);
    for (std::size_t m = 1; m < s.residual_history.size(); ++m) {
      CHECK(s.residual_history[m] <= s.residual_history[m - 1] + 1e-12 * s.residual_history[0]);
    }
    const ComplexVector trace = completed_trace(*op, s, "r=0.8");
    ComplexVector exact(trace.size());
    const auto& curve = mesh->curve("r=0.8");
    for (std::size_t i = 0; i < curve.size(); ++i) {
      const ComplexPoint e = plane_wave_field(IncidentWave::from_angle(2.0), unit_medium, mesh->edge_midpoint(curve[i].edge));
      const Point tau = perp(curve[i].normal);
      exact[i] = e.x * tau.x + e.y * tau.y;
    }
    CHECK((trace - exact).norm() / exact.norm() < 0.15);
  }
  SUBCASE("linearity with forced iterations") {
    const Complex alpha(0.3, -1.7);
    CauchyData scaled = data;
    for (auto& v : scaled.dirichlet) v *= alpha;
    for (auto& v : scaled.neumann) v *= alpha;
    const QRState a = solver.iterate(data, 7), b = solver.iterate(scaled, 7);
    CHECK(a.iterations == 7);
    CHECK((b.e - alpha * a.e).norm() <= 1e-10 * b.e.norm());
    CHECK((b.f - alpha * a.f).norm() <= 1e-10 * b.f.norm());
  }
  SUBCASE("scaled and unscaled variants agree after the change of variable") {
    const auto op_s = std::make_shared<const QROperator>(mesh, unit_medium, "Gamma0", true);
    const QRSolver solver_s(op_s, QRConfig{0.1, 50, 1e-3, true});
    const QRState a = solver.iterate(data), b = solver_s.iterate(data);
    const ComplexVector ta = completed_trace(*op, a, "r=0.8"), tb = completed_trace(*op_s, b, "r=0.8");
    CHECK((ta - tb).norm() / ta.norm() < 0.1);
    // F scaled = F / (k sqrt(kappa0)).
    const Complex c = op_s->neumann_scale();
    CHECK((a.f - c * b.f).norm() / a.f.norm() < 0.2);
  }
  CHECK_THROWS_AS(QRSolver(op, QRConfig{0.0, 50, 1e-3, false}), InvalidArgument);
}
