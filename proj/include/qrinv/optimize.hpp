#pragma once

#include <functional>
#include <vector>

namespace qrinv {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search on [lo, hi]; returns the midpoint of the final
/// bracket (width < tol) and f there. Non-finite values throw NonFinite.
ScalarMinimum golden_section(const std::function<double(double)>& f, double lo, double hi, double tol);

/// Upper bound on golden_section evaluations for the given bracket and tol.
int golden_section_max_evaluations(double lo, double hi, double tol);

struct PowellOptions {
  double ftol = 1e-6;
  int max_iter = 100;
  /// Golden-section tolerance along a direction, in units of its length.
  double line_tol = 1e-6;
};

struct PowellResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  int line_searches = 0;
  /// Best value after each iteration; trace[0] is f(x0).
  std::vector<double> trace;
};

/// Powell's direction-set method. Directions start as step0 along the axes;
/// each line minimization brackets then runs golden_section. Stops when
/// 2 (f_prev - f) <= ftol (|f_prev| + |f|) or after max_iter iterations.
PowellResult powell_minimize(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const std::vector<double>& step0, const PowellOptions& opts = {});

}  // namespace qrinv
