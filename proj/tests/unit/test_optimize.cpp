#include <doctest.h>

#include <cmath>
#include <limits>

#include "qrinv/error.hpp"
#include "qrinv/optimize.hpp"

using namespace qrinv;

TEST_CASE("golden section") {
  SUBCASE("quadratic") {
    const auto m = golden_section([](double x) { return (x - 0.3) * (x - 0.3); }, -1.0, 1.0, 1e-6);
    CHECK(std::abs(m.x - 0.3) <= 1e-6);
    CHECK(m.value == doctest::Approx((m.x - 0.3) * (m.x - 0.3)));
  }
  SUBCASE("boundary minimum") {
    const auto m = golden_section([](double x) { return x; }, 0.0, 1.0, 1e-6);
    CHECK(m.x <= 1e-6);
  }
  SUBCASE("evaluation count bound") {
    const double rho = (std::sqrt(5.0) - 1.0) / 2.0;
    for (double tol : {1e-2, 1e-5, 1e-9}) {
      int calls = 0;
      const auto m = golden_section(
          [&](double x) {
            ++calls;
            return std::cos(3 * x);
          },
          0.0, 2.0, tol);
      const int bound = static_cast<int>(std::ceil(std::log(2.0 / tol) / std::log(1.0 / rho))) + 2;
      CHECK(calls == m.evaluations);
      CHECK(calls <= bound);
      CHECK(golden_section_max_evaluations(0.0, 2.0, tol) <= bound);
      // Below sqrt(eps) the objective is flat to round-off, so position accuracy saturates.
      CHECK(std::abs(m.x - M_PI / 3) <= std::max(tol, 1e-7));
    }
  }
  CHECK_THROWS_AS(golden_section([](double) { return std::numeric_limits<double>::quiet_NaN(); }, 0, 1, 1e-3),
                  NonFinite);
}

TEST_CASE("powell on a separable quadratic") {
  const auto r = powell_minimize(
      [](const std::vector<double>& x) { return (x[0] - 1) * (x[0] - 1) + 10 * (x[1] + 2) * (x[1] + 2); }, {0.0, 0.0},
      {0.1, 0.1}, {1e-12, 100, 1e-8});
  CHECK(std::abs(r.x[0] - 1) <= 1e-4);
  CHECK(std::abs(r.x[1] + 2) <= 1e-4);
}

TEST_CASE("powell on Rosenbrock") {
  const auto r = powell_minimize(
      [](const std::vector<double>& x) {
        return (1 - x[0]) * (1 - x[0]) + 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]);
      },
      {-1.2, 1.0}, {0.1, 0.1}, {1e-14, 200, 1e-10});
  CHECK(r.iterations <= 200);
  CHECK(std::abs(r.x[0] - 1) <= 1e-3);
  CHECK(std::abs(r.x[1] - 1) <= 1e-3);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
}

TEST_CASE("powell on coupled quadratics") {
  for (int n : {2, 3, 4}) {
    // f = sum_i i (x_i - x_{i-1} - 1)^2 + x_0^2 has minimizer x_i = i.
    auto f = [n](const std::vector<double>& x) {
      double v = x[0] * x[0];
      for (int i = 1; i < n; ++i) v += (i + 1.0) * std::pow(x[i] - x[i - 1] - 1.0, 2);
      return v;
    };
    const auto r = powell_minimize(f, std::vector<double>(n, 0.5), std::vector<double>(n, 0.2), {1e-16, 100, 1e-10});
    for (int i = 0; i < n; ++i) CHECK(std::abs(r.x[i] - i) <= 1e-8 * 1e3);
    CHECK(r.value <= 1e-8);
    // Direction discarding gives up exact quadratic termination; keep a loose cost bound.
    CHECK(r.line_searches <= 10 * n * (n + 2));
  }
}

TEST_CASE("powell rejects non-finite objectives") {
  CHECK_THROWS_AS(powell_minimize([](const std::vector<double>&) { return INFINITY; }, {0.0}, {1.0}), NonFinite);
}
