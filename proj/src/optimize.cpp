#include "qrinv/optimize.hpp"

#include <cmath>
#include <utility>

#include "qrinv/error.hpp"

namespace qrinv {

namespace {

const double kRho = (std::sqrt(5.0) - 1.0) / 2.0;
const double kGold = 1.0 + kRho;

double checked(double v, const char* where, double at) {
  if (!std::isfinite(v)) {
    throw NonFinite(std::string(where) + ": objective is not finite at " + std::to_string(at));
  }
  return v;
}

}  // namespace

int golden_section_max_evaluations(double lo, double hi, double tol) {
  return static_cast<int>(std::ceil(std::log((hi - lo) / tol) / std::log(1.0 / kRho))) + 2;
}

ScalarMinimum golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo < hi)) throw InvalidArgument("golden_section: lo must be below hi");
  if (!(tol > 0.0)) throw InvalidArgument("golden_section: tol must be positive");
  ScalarMinimum out;
  auto eval = [&](double x) {
    ++out.evaluations;
    return checked(f(x), "golden_section", x);
  };
  double a = lo, b = hi;
  if (b - a >= tol) {
    double c = b - kRho * (b - a), d = a + kRho * (b - a);
    double fc = eval(c), fd = eval(d);
    for (;;) {
      if (fc <= fd) {
        b = d;
        if (b - a < tol) break;
        d = c;
        fd = fc;
        c = b - kRho * (b - a);
        fc = eval(c);
      } else {
        a = c;
        if (b - a < tol) break;
        c = d;
        fc = fd;
        d = a + kRho * (b - a);
        fd = eval(d);
      }
    }
  }
  out.x = 0.5 * (a + b);
  out.value = eval(out.x);
  return out;
}

PowellResult powell_minimize(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const std::vector<double>& step0, const PowellOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0 || step0.size() != n) throw InvalidArgument("powell_minimize: x0 and step0 must have equal nonzero size");
  PowellResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    return checked(f(x), "powell_minimize", x.empty() ? 0.0 : x[0]);
  };
  auto along = [](const std::vector<double>& x, const std::vector<double>& dir, double t) {
    std::vector<double> y(x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += t * dir[i];
    return y;
  };

  // Minimizes along dir from x (value fx); updates both when it improves.
  auto line_min = [&](std::vector<double>& x, double& fx, const std::vector<double>& dir) {
    ++res.line_searches;
    auto g = [&](double t) { return t == 0.0 ? fx : eval(along(x, dir, t)); };
    double a = 0.0, b = 1.0, fa = fx, fb = g(b);
    if (fb > fa) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
    double c = b + kGold * (b - a), fc = g(c);
    for (int k = 0; k < 60 && fc < fb; ++k) {
      a = b;
      fa = fb;
      b = c;
      fb = fc;
      c = b + kGold * (b - a);
      fc = g(c);
    }
    const double lo = std::min(a, c), hi = std::max(a, c);
    const ScalarMinimum m = golden_section(g, lo, hi, opts.line_tol * std::max(1.0, std::abs(b)));
    double best_t = m.x, best_f = m.value;
    if (fb < best_f) {
      best_t = b;
      best_f = fb;
    }
    if (best_f < fx) {
      x = along(x, dir, best_t);
      fx = best_f;
      return best_t;
    }
    return 0.0;
  };

  std::vector<std::vector<double>> dirs(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) dirs[i][i] = step0[i];

  std::vector<double> x = std::move(x0);
  double fx = eval(x);
  res.trace.push_back(fx);
  std::vector<double> pt = x;
  for (res.iterations = 0; res.iterations < opts.max_iter;) {
    ++res.iterations;
    const double fp = fx;
    std::size_t ibig = 0;
    double del = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double before = fx;
      line_min(x, fx, dirs[i]);
      if (before - fx > del) {
        del = before - fx;
        ibig = i;
      }
    }
    res.trace.push_back(fx);
    if (2.0 * (fp - fx) <= opts.ftol * (std::abs(fp) + std::abs(fx)) + 1e-300) break;

    std::vector<double> ptt(n), xit(n);
    for (std::size_t j = 0; j < n; ++j) {
      ptt[j] = 2.0 * x[j] - pt[j];
      xit[j] = x[j] - pt[j];
    }
    pt = x;
    const double fptt = eval(ptt);
    if (fptt < fp) {
      const double t = 2.0 * (fp - 2.0 * fx + fptt) * (fp - fx - del) * (fp - fx - del) - del * (fp - fptt) * (fp - fptt);
      if (t < 0.0) {
        line_min(x, fx, xit);
        res.trace.back() = fx;
        dirs[ibig] = dirs[n - 1];
        dirs[n - 1] = xit;
      }
    }
  }
  res.x = std::move(x);
  res.value = fx;
  return res;
}

}  // namespace qrinv
