#include <doctest.h>

#include "oracles.hpp"
#include "qrinv/error.hpp"
#include "qrinv/inversion.hpp"

using namespace qrinv;

namespace {

const MediumConfig unit_medium{};

struct Model {
  std::shared_ptr<const Mesh2D> mesh = std::make_shared<const Mesh2D>(mesh_disk(1.0, 0.08, {0.8}));
  BackgroundSolution bg = solve_background(mesh, unit_medium, equispaced_waves(4));

  // Difference traces manufactured by the Taylor model itself.
  TraceData taylor_data(const Support& s, double a, int order = 4) const {
    const auto chain = sensitivity_chain(bg, s, order, "r=0.8");
    TraceData d;
    d.curve = "r=0.8";
    d.samples = curve_samples(*mesh, "r=0.8");
    d.waves = taylor_trace_eval(taylor_trace(chain), a);
    return d;
  }

  InversionSettings fixed_order() const {
    InversionSettings s;
    s.auto_order = false;
    s.powell = {1e-10, 100, 1e-8};
    return s;
  }
};

TraceData scale(TraceData d, Complex c) {
  for (auto& w : d.waves) w *= c;
  return d;
}

}  // namespace

TEST_CASE("peak localization") {
  Model m;
  const Support ball(Ball{{-0.4, 0.0}, 0.2});
  SUBCASE("single ball") {
    const PeakSet p = locate_peaks(m.taylor_data(ball, 0.1));
    REQUIRE(p.peaks.size() == 1);
    CHECK(norm(p.peaks[0].x - Point{-0.8, 0.0}) < 3 * 0.08);
    CHECK(dot(p.peaks[0].normal, Point{-1.0, 0.0}) > 0.99);
  }
  SUBCASE("two balls") {
    const auto mesh = std::make_shared<const Mesh2D>(mesh_disk(1.0, 0.05, {0.9}));
    const auto bg = solve_background(mesh, unit_medium, equispaced_waves(8));
    const Support two(UnionSupport{{Support(Ball{{-0.55, -0.45}, 0.1}), Support(Ball{{0.4, 0.6}, 0.07})}});
    const auto chain = sensitivity_chain(bg, two, 2, "r=0.9");
    TraceData d;
    d.curve = "r=0.9";
    d.samples = curve_samples(*mesh, "r=0.9");
    d.waves = taylor_trace_eval(taylor_trace(chain), 0.1);
    const PeakSet p = locate_peaks(d, 0.2);
    REQUIRE(p.peaks.size() == 2);
    const double angles[2] = {angle_of({-0.55, -0.45}), angle_of({0.4, 0.6})};
    for (int k = 0; k < 2; ++k) {
      double best = 10.0;
      for (const auto& pk : p.peaks) best = std::min(best, angular_distance(angle_of(pk.x), angles[k]));
      CHECK(best < 0.1);
    }
  }
  SUBCASE("flat and zero indicators") {
    TraceData flat = m.taylor_data(ball, 0.1);
    for (auto& w : flat.waves) w.setConstant(Complex(1.0, 0.5));
    CHECK_THROWS_AS(locate_peaks(flat), NoPeak);
    for (auto& w : flat.waves) w.setZero();
    CHECK_THROWS_AS(locate_peaks(flat), NoPeak);
  }
}

TEST_CASE("cost function") {
  Model m;
  const Support ball(Ball{{-0.4, 0.0}, 0.2});
  const TraceData data = m.taylor_data(ball, 0.1);
  const auto chain = sensitivity_chain(m.bg, ball, 4, "r=0.8");
  const TaylorTrace tt = taylor_trace(chain);

  double energy = 0.0;
  for (const auto& w : data.waves) {
    for (Eigen::Index i = 0; i < w.size(); ++i) energy += 0.5 * std::norm(w[i]) * data.samples.lengths[i];
  }
  CHECK(cost_J(data, tt, 0.0) == doctest::Approx(energy).epsilon(1e-14));
  CHECK(cost_J(data, tt, 0.1) <= 1e-20);

  const TraceData other = m.taylor_data(Support(Ball{{-0.35, 0.1}, 0.15}), 0.2);
  const CostPolynomial poly(other, tt);
  for (double a : {-0.7, -0.1, 0.0, 0.05, 0.33, 0.9}) {
    CHECK(std::abs(poly(a) - cost_J(other, tt, a)) <= 1e-12 * std::max(1.0, cost_J(other, tt, 0.0)));
  }
  TraceData wrong = data;
  wrong.curve = "Gamma";
  CHECK_THROWS_AS(cost_J(wrong, tt, 0.1), MeshMismatch);
}

TEST_CASE("amplitude optimization") {
  Model m;
  const Support ball(Ball{{-0.4, 0.0}, 0.2});
  const TaylorTrace tt = taylor_trace(sensitivity_chain(m.bg, ball, 4, "r=0.8"));
  const AmplitudeFit fit = amplitude_opt(m.taylor_data(ball, 0.1), tt);
  CHECK(std::abs(fit.amplitude - 0.1) <= 1e-4);

  TraceData zero = m.taylor_data(ball, 0.1);
  for (auto& w : zero.waves) w.setZero();
  const AmplitudeFit z = amplitude_opt(zero, tt);
  CHECK(z.cost <= 1e-12);
  CHECK(std::abs(z.amplitude) < 1e-3);

  // Scaling data and model by a common complex factor keeps the argmin.
  const TraceData other = m.taylor_data(Support(Ball{{-0.38, 0.05}, 0.18}), -0.15);
  const AmplitudeFit base = amplitude_opt(other, tt);
  TaylorTrace tts = tt;
  for (auto& w : tts.terms) {
    for (auto& t : w) t *= Complex(2.0, -3.0);
  }
  const AmplitudeFit scaled = amplitude_opt(scale(other, Complex(2.0, -3.0)), tts);
  CHECK(std::abs(scaled.amplitude - base.amplitude) <= 1e-5);
  CHECK(scaled.cost == doctest::Approx(13.0 * base.cost).epsilon(1e-6));
}

TEST_CASE("support evaluation") {
  Model m;
  const Support ball(Ball{{-0.4, 0.0}, 0.2});
  const InverseProblem problem(m.bg, m.taylor_data(ball, 0.1), m.fixed_order());
  const SupportEvaluation ev = problem.evaluate(ball);
  CHECK(ev.admissible);
  CHECK(ev.cost <= 1e-10 * problem.data_energy());
  CHECK(std::abs(ev.amplitude - 0.1) <= 1e-4);

  SUBCASE("penalties") {
    CHECK(problem.evaluate(Support(Ball{{-0.6, 0.0}, 0.2})).cost == problem.penalty());
    CHECK(problem.evaluate(Support(Ball{{-0.4, 0.0}, -0.1})).cost == problem.penalty());
    CHECK(problem.penalty() == doctest::Approx(1e6 * problem.data_energy()));
    // A star whose radius function dips below zero is pinched, not rejected.
    const Support pinched(FourierStar{{-0.4, 0.0}, 0.1, {0.15}, {}});
    CHECK(!pinched.well_formed());
    CHECK(pinched.well_formed(true));
    CHECK(problem.evaluate(pinched).cost < problem.penalty());
    const auto rings = pinched.boundary(90);
    for (const auto& p : rings[0]) CHECK(norm(p - Point{-0.4, 0.0}) <= 0.25 + 1e-12);
  }
  SUBCASE("reductions") {
    const double c_ellipse = problem.evaluate(Support(Ellipse{{-0.38, 0.02}, 0.17, 0.17})).cost;
    const double c_ball = problem.evaluate(Support(Ball{{-0.38, 0.02}, 0.17})).cost;
    CHECK(c_ellipse == doctest::Approx(c_ball).epsilon(1e-6));
    const double c_star = problem.evaluate(Support(FourierStar{{-0.38, 0.02}, 0.17, {0.0, 0.0}, {0.0, 0.0}})).cost;
    CHECK(c_star == doctest::Approx(c_ball).epsilon(1e-6));
    const double c_union = problem.evaluate(Support(UnionSupport{{Support(Ball{{-0.38, 0.02}, 0.17})}})).cost;
    CHECK(c_union == doctest::Approx(c_ball).epsilon(1e-12));
  }
  SUBCASE("automatic order raises the truncation for large amplitudes") {
    InversionSettings s = m.fixed_order();
    s.auto_order = true;
    s.order = 2;
    const InverseProblem p2(m.bg, m.taylor_data(ball, 0.5, 6), s);
    const SupportEvaluation e2 = p2.evaluate(ball);
    CHECK(e2.order > 2);
    CHECK(p2.max_order_used() == e2.order);
  }
}

TEST_CASE("self-consistent reconstructions") {
  Model m;
  Peak peak;
  peak.x = {-0.8, 0.0};
  peak.normal = {-1.0, 0.0};
  BallSearch search{0.42, 0.17, 0.05, 0.05};

  SUBCASE("ball") {
    const InverseProblem problem(m.bg, m.taylor_data(Support(Ball{{-0.4, 0.0}, 0.2}), 0.1), m.fixed_order());
    const auto r = reconstruct_ball(problem, peak, search);
    CHECK(std::abs(r.parameters[0] - 0.4) <= 1e-3);
    CHECK(std::abs(r.parameters[1] - 0.2) <= 1e-3);
    CHECK(std::abs(r.amplitude - 0.1) <= 1e-3);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);

    const auto one = reconstruct_multi(problem, {peak}, search);
    CHECK(std::abs(one.parameters[0] - r.parameters[0]) <= 1e-3);
    CHECK(std::abs(one.parameters[1] - r.parameters[1]) <= 1e-3);
  }
  SUBCASE("ellipse") {
    const InverseProblem problem(m.bg, m.taylor_data(Support(Ellipse{{-0.42, 0.0}, 0.15, 0.22}), 0.1),
                                 m.fixed_order());
    const auto r = reconstruct_ellipse(problem, peak, search);
    CHECK(std::abs(r.parameters[0] - 0.38) <= 1e-3);
    CHECK(std::abs(r.parameters[1] - 0.15) <= 1e-3);
    CHECK(std::abs(r.parameters[2] - 0.22) <= 1e-3);
  }
  SUBCASE("two balls") {
    Peak p2;
    p2.x = {0.0, 0.8};
    p2.normal = {0.0, 1.0};
    const Support two(UnionSupport{{Support(Ball{{-0.4, 0.0}, 0.18}), Support(Ball{{0.0, 0.42}, 0.15})}});
    const InverseProblem problem(m.bg, m.taylor_data(two, 0.1), m.fixed_order());
    const auto r = reconstruct_multi(problem, {peak, p2}, {0.4, 0.16, 0.05, 0.05});
    REQUIRE(r.parameters.size() == 4);
    CHECK(std::abs(r.parameters[0] - 0.4) <= 1e-3);
    CHECK(std::abs(r.parameters[1] - 0.18) <= 1e-3);
    CHECK(std::abs(r.parameters[2] - 0.38) <= 1e-3);
    CHECK(std::abs(r.parameters[3] - 0.15) <= 1e-3);
  }
}
