#include "qrinv/inversion.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "qrinv/error.hpp"

namespace qrinv {

namespace {

double weighted_norm2(const ComplexVector& v, const std::vector<double>& lengths) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::norm(v[i]) * lengths[static_cast<std::size_t>(i)];
  return acc;
}

Complex weighted_dot(const ComplexVector& u, const ComplexVector& v, const std::vector<double>& lengths) {
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * v[i] * lengths[static_cast<std::size_t>(i)];
  return acc;
}

void check_compatible(const TraceData& data, const TaylorTrace& tt) {
  if (data.curve != tt.curve) throw MeshMismatch("data on '" + data.curve + "' but Taylor traces on '" + tt.curve + "'");
  if (data.waves.size() != tt.terms.size()) throw MeshMismatch("data and Taylor traces differ in wave count");
  for (std::size_t w = 0; w < tt.terms.size(); ++w) {
    for (const auto& t : tt.terms[w]) {
      if (t.size() != data.waves[w].size()) throw MeshMismatch("data and Taylor traces differ in sample count");
    }
  }
}

// ||a^N/N! T^(N)|| / ||a T^(1)|| over all waves.
double truncation_ratio(const SensitivityChain& chain, const std::vector<double>& lengths, double a) {
  if (a == 0.0) return 0.0;
  const int n = chain.order();
  double coeff = 1.0;
  for (int i = 1; i <= n; ++i) coeff *= a / i;
  double num = 0.0, den = 0.0;
  for (const auto& t : chain.traces) {
    num += weighted_norm2(t.back(), lengths);
    den += weighted_norm2(t.front(), lengths);
  }
  if (den == 0.0) return 0.0;
  return std::abs(coeff) * std::sqrt(num) / (std::abs(a) * std::sqrt(den));
}

ReconstructionResult finish(const InverseProblem& problem, std::string stage, Support support,
                            const PowellResult& pr) {
  const SupportEvaluation ev = problem.evaluate(support);
  ReconstructionResult r;
  r.stage = std::move(stage);
  r.support = std::move(support);
  r.amplitude = ev.amplitude;
  r.cost = ev.cost;
  r.order = ev.order;
  r.evaluations = pr.evaluations;
  r.iterations = pr.iterations;
  r.parameters = pr.x;
  r.trace = pr.trace;
  return r;
}

FourierStar make_star(const Peak& peak, const std::vector<double>& x) {
  FourierStar s;
  s.center = peak_center(peak, x[0]);
  s.r0 = x[1];
  const std::size_t terms = (x.size() - 2) / 2;
  s.cos_coeffs.assign(x.begin() + 2, x.begin() + 2 + static_cast<std::ptrdiff_t>(terms));
  s.sin_coeffs.assign(x.begin() + 2 + static_cast<std::ptrdiff_t>(terms), x.end());
  return s;
}

}  // namespace

PeakSet locate_peaks(const TraceData& traces, double rel_threshold) {
  const std::size_t n = traces.samples.size();
  if (n < 3 || traces.waves.empty()) throw NoPeak("peak search needs at least three samples and one wave");
  std::vector<double> p(n, 0.0);
  for (const auto& w : traces.waves) {
    for (std::size_t i = 0; i < n; ++i) p[i] += std::norm(w[static_cast<Eigen::Index>(i)]);
  }
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = (p[(i + n - 1) % n] + p[i] + p[(i + 1) % n]) / 3.0;
  const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
  if (!(*mx > 0.0)) throw NoPeak("trace indicator is identically zero");
  if (*mx < 1.2 * *mn) throw NoPeak("trace indicator is flat (max/min < 1.2)");

  const auto& mid = traces.samples.midpoints;
  PeakSet out;
  for (std::size_t i = 0; i < n; ++i) {
    const double prev = s[(i + n - 1) % n], next = s[(i + 1) % n];
    if (!(s[i] > prev && s[i] >= next && s[i] >= rel_threshold * *mx)) continue;
    const double curv = prev - 2.0 * s[i] + next;
    const double t = curv < 0.0 ? std::clamp(0.5 * (prev - next) / curv, -0.5, 0.5) : 0.0;
    // Outward normals from central differences, interpolated to the refined point.
    auto normal_at = [&](std::size_t j) {
      const Point tau = normalized(mid[(j + 1) % n] - mid[(j + n - 1) % n]);
      return Point{tau.y, -tau.x};
    };
    const Point tau = normalized(mid[(i + 1) % n] - mid[(i + n - 1) % n]);
    const std::size_t side = t >= 0.0 ? (i + 1) % n : (i + n - 1) % n;
    Peak pk;
    pk.x = mid[i] + (t * traces.samples.lengths[i]) * tau;
    pk.normal = normalized((1.0 - std::abs(t)) * normal_at(i) + std::abs(t) * normal_at(side));
    pk.height = s[i];
    pk.sample = i;
    out.peaks.push_back(pk);
  }
  if (out.peaks.empty()) throw NoPeak("no local maximum above the threshold");
  std::stable_sort(out.peaks.begin(), out.peaks.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
  return out;
}

double cost_J(const TraceData& data, const TaylorTrace& tt, double a) {
  check_compatible(data, tt);
  const auto model = taylor_trace_eval(tt, a);
  double acc = 0.0;
  for (std::size_t w = 0; w < model.size(); ++w) acc += weighted_norm2(data.waves[w] - model[w], data.samples.lengths);
  return 0.5 * acc;
}

CostPolynomial::CostPolynomial(const TraceData& data, const TaylorTrace& tt) : order_(tt.order()) {
  check_compatible(data, tt);
  const std::size_t m = static_cast<std::size_t>(order_) + 1;
  gram_.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t w = 0; w < data.waves.size(); ++w) {
    std::vector<const ComplexVector*> v{&data.waves[w]};
    for (const auto& t : tt.terms[w]) v.push_back(&t);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) {
        const double g = weighted_dot(*v[i], *v[j], data.samples.lengths).real();
        gram_[i][j] += g;
        if (j != i) gram_[j][i] += g;
      }
    }
  }
}

double CostPolynomial::operator()(double a) const {
  std::vector<double> c(gram_.size());
  c[0] = 1.0;
  double coeff = 1.0;
  for (std::size_t n = 1; n < c.size(); ++n) {
    coeff *= a / static_cast<double>(n);
    c[n] = -coeff;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) acc += c[i] * c[j] * gram_[i][j];
  }
  return 0.5 * std::max(0.0, acc);
}

AmplitudeFit amplitude_opt(const TraceData& data, const TaylorTrace& tt, const AmplitudeSearch& search) {
  const CostPolynomial poly(data, tt);
  double lo = search.lo, hi = search.hi;
  if (search.scan_points >= 3) {
    const int m = search.scan_points;
    const double step = (search.hi - search.lo) / (m - 1);
    int best = 0;
    double best_v = poly(search.lo);
    for (int i = 1; i < m; ++i) {
      const double v = poly(search.lo + i * step);
      if (v < best_v) {
        best_v = v;
        best = i;
      }
    }
    lo = search.lo + std::max(0, best - 1) * step;
    hi = search.lo + std::min(m - 1, best + 1) * step;
  }
  const ScalarMinimum g = golden_section([&](double a) { return poly(a); }, lo, hi, search.tol);
  return {g.x, cost_J(data, tt, g.x)};
}

InverseProblem::InverseProblem(BackgroundSolution background, TraceData data, InversionSettings settings)
    : bg_(std::move(background)),
      data_(std::move(data)),
      settings_(settings),
      max_order_used_(std::make_shared<int>(settings.order)) {
  if (settings_.order < 1 || settings_.max_order < settings_.order) {
    throw InvalidArgument("Taylor order must satisfy 1 <= order <= max_order");
  }
  const auto& curve = bg_.space().mesh().curve(data_.curve);
  if (curve.size() != data_.samples.size()) throw MeshMismatch("data samples do not match the inverse-mesh curve");
  if (data_.waves.size() != bg_.waves.size()) throw MeshMismatch("data and background differ in wave count");
  for (const auto& w : data_.waves) data_energy_ += 0.5 * weighted_norm2(w, data_.samples.lengths);
}

SupportEvaluation InverseProblem::evaluate(const Support& support) const {
  SupportEvaluation ev;
  ev.cost = penalty();
  // Pinched stars keep the cost continuous where a Fourier radius crosses zero.
  if (!support.well_formed(true) || support.max_radius() >= settings_.admissible_radius) return ev;
  std::vector<TriangleWeight> weights;
  try {
    weights = support_weights(bg_.space().mesh(), bg_.kappa0, support);
  } catch (const DegenerateSupport&) {
    return ev;
  }
  SensitivityChain chain = sensitivity_chain(bg_, std::move(weights), settings_.order, data_.curve);
  AmplitudeFit fit = amplitude_opt(data_, taylor_trace(chain), settings_.amplitude);
  if (settings_.auto_order) {
    while (chain.order() < settings_.max_order &&
           truncation_ratio(chain, data_.samples.lengths, fit.amplitude) > settings_.order_tol) {
      extend_chain(chain, bg_);
      fit = amplitude_opt(data_, taylor_trace(chain), settings_.amplitude);
    }
    if (chain.order() > *max_order_used_) {
      *max_order_used_ = chain.order();
      spdlog::warn("Taylor order raised to {} (amplitude {:.4g})", chain.order(), fit.amplitude);
    }
  }
  ev.admissible = true;
  ev.cost = fit.cost;
  ev.amplitude = fit.amplitude;
  ev.order = chain.order();
  return ev;
}

ReconstructionResult reconstruct_ball(const InverseProblem& problem, const Peak& peak, const BallSearch& search) {
  auto support = [&](const std::vector<double>& x) { return Support(Ball{peak_center(peak, x[0]), x[1]}); };
  const PowellResult pr = powell_minimize([&](const std::vector<double>& x) { return problem.evaluate(support(x)).cost; },
                                          {search.d0, search.r0}, {search.step_d, search.step_r},
                                          problem.settings().powell);
  return finish(problem, "ball", support(pr.x), pr);
}

ReconstructionResult reconstruct_multi(const InverseProblem& problem, const std::vector<Peak>& peaks,
                                       const BallSearch& search) {
  if (peaks.empty()) throw InvalidArgument("reconstruct_multi needs at least one peak");
  auto support = [&](const std::vector<double>& x) {
    if (peaks.size() == 1) return Support(Ball{peak_center(peaks[0], x[0]), x[1]});
    UnionSupport u;
    for (std::size_t i = 0; i < peaks.size(); ++i) u.parts.emplace_back(Ball{peak_center(peaks[i], x[2 * i]), x[2 * i + 1]});
    return Support(std::move(u));
  };
  std::vector<double> x0, step;
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    x0.insert(x0.end(), {search.d0, search.r0});
    step.insert(step.end(), {search.step_d, search.step_r});
  }
  const PowellResult pr = powell_minimize([&](const std::vector<double>& x) { return problem.evaluate(support(x)).cost; },
                                          x0, step, problem.settings().powell);
  return finish(problem, "multi", support(pr.x), pr);
}

ReconstructionResult reconstruct_ellipse(const InverseProblem& problem, const Peak& peak, const BallSearch& search,
                                         const std::optional<ReconstructionResult>& ball_init) {
  std::vector<double> x0{search.d0, search.r0, search.r0};
  if (ball_init && ball_init->parameters.size() == 2) {
    x0 = {ball_init->parameters[0], ball_init->parameters[1], ball_init->parameters[1]};
  }
  auto support = [&](const std::vector<double>& x) { return Support(Ellipse{peak_center(peak, x[0]), x[1], x[2]}); };
  const PowellResult pr = powell_minimize([&](const std::vector<double>& x) { return problem.evaluate(support(x)).cost; },
                                          x0, {search.step_d, search.step_r, search.step_r}, problem.settings().powell);
  return finish(problem, "ellipse", support(pr.x), pr);
}

ReconstructionResult refine_fourier(const InverseProblem& problem, const Peak& peak, const BallSearch& search,
                                    const ReconstructionResult& ball_init, const FourierSearch& fourier) {
  if (fourier.max_terms < 1) throw InvalidArgument("Fourier refinement needs at least one mode");
  auto objective = [&](const std::vector<double>& x) { return problem.evaluate(Support(make_star(peak, x))).cost; };
  auto run = [&](std::vector<double> x0, int terms) {
    std::vector<double> step{search.step_d, search.step_r};
    step.resize(2 + 2 * static_cast<std::size_t>(terms), fourier.step_coeff);
    x0.resize(step.size(), 0.0);
    // Shape coefficients only need resolving to ~1e-5; a coarse line search halves the cost.
    PowellOptions opts = problem.settings().powell;
    opts.line_tol = std::max(opts.line_tol, 1e-3);
    const PowellResult pr = powell_minimize(objective, std::move(x0), step, opts);
    return finish(problem, "fourier", Support(make_star(peak, pr.x)), pr);
  };

  if (!fourier.warm_start) return run({search.d0, search.r0}, fourier.max_terms);

  if (ball_init.parameters.size() != 2) throw InvalidArgument("Fourier refinement must start from a ball result");
  ReconstructionResult best = ball_init;
  std::vector<double> x{ball_init.parameters[0], ball_init.parameters[1]};
  int evaluations = 0;
  std::vector<double> trace;
  for (int terms = 1; terms <= fourier.max_terms; ++terms) {
    std::vector<double> x0{x[0], x[1]};
    const std::size_t prev = (x.size() - 2) / 2;
    for (std::size_t i = 0; i < static_cast<std::size_t>(terms); ++i) x0.push_back(i < prev ? x[2 + i] : 0.0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(terms); ++i) x0.push_back(i < prev ? x[2 + prev + i] : 0.0);
    ReconstructionResult r = run(x0, terms);
    evaluations += r.evaluations;
    trace.insert(trace.end(), r.trace.begin(), r.trace.end());
    const double improvement = (best.cost - r.cost) / best.cost;
    spdlog::info("Fourier stage with {} modes: cost {:.6e} (relative improvement {:.3e})", terms, r.cost, improvement);
    if (r.cost < best.cost) {
      best = std::move(r);
      x = best.parameters;
    }
    // Mode 1 is close to a translation of the ball, so its gain says little about higher modes.
    if (terms > 1 && !(improvement >= fourier.improve_tol)) break;
  }
  if (best.stage != "fourier") {
    // No mode improved on the ball: report it as a zero-mode star.
    std::vector<double> z{x[0], x[1], 0.0, 0.0};
    best.support = Support(make_star(peak, z));
    best.parameters = z;
    best.stage = "fourier";
  }
  best.evaluations = evaluations;
  best.trace = trace;
  return best;
}

}  // namespace qrinv
