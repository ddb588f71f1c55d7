#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qrinv/optimize.hpp"
#include "qrinv/sensitivity.hpp"

namespace qrinv {

/// A localized surface peak on the interior curve.
struct Peak {
  Point x;       // on the curve polyline
  Point normal;  // outward unit normal
  double height = 0.0;
  std::size_t sample = 0;  // index of the edge carrying x
};

struct PeakSet {
  std::vector<Peak> peaks;  // heights descending
};

/// Indicator P = sum_m |trace_m|^2 per sample, smoothed by a 3-point moving
/// average around the closed curve; local maxima above rel_threshold * max.
/// Throws NoPeak on zero or flat (max/min < 1.2) indicators.
PeakSet locate_peaks(const TraceData& traces, double rel_threshold = 0.5);

/// 1/2 sum_m ||delta_m - sum_n a^n/n! T_m^(n)||^2, arc-length weighted.
double cost_J(const TraceData& data, const TaylorTrace& tt, double a);

/// J(a) through the Gram matrix of {delta, T^(1), ..., T^(N)} summed over waves.
class CostPolynomial {
 public:
  CostPolynomial(const TraceData& data, const TaylorTrace& tt);
  double operator()(double a) const;
  int order() const { return order_; }

 private:
  int order_ = 0;
  std::vector<std::vector<double>> gram_;  // real part of the Hermitian Gram matrix
};

struct AmplitudeSearch {
  double lo = -0.99;
  double hi = 0.99;
  double tol = 1e-5;
  /// Coarse samples used to pick the golden-section bracket.
  int scan_points = 41;
};

struct AmplitudeFit {
  double amplitude = 0.0;
  double cost = 0.0;
};

/// min_a J(D, a) by golden section; the reported cost is cost_J at the argmin.
AmplitudeFit amplitude_opt(const TraceData& data, const TaylorTrace& tt, const AmplitudeSearch& search = {});

struct InversionSettings {
  int order = 4;
  bool auto_order = true;
  int max_order = 10;
  /// Largest accepted ||a^N/N! T^(N)|| / ||a T^(1)|| at the fitted amplitude.
  double order_tol = 0.01;
  AmplitudeSearch amplitude;
  PowellOptions powell;
  /// Supports must satisfy max |x| < admissible_radius.
  double admissible_radius = 0.7;
  double penalty_factor = 1e6;
};

struct SupportEvaluation {
  bool admissible = false;
  double cost = 0.0;
  double amplitude = 0.0;
  int order = 0;
};

/// Linearized inverse problem on a fixed mesh: difference data on one curve,
/// one background factorization for every candidate support.
class InverseProblem {
 public:
  InverseProblem(BackgroundSolution background, TraceData data, InversionSettings settings);

  SupportEvaluation evaluate(const Support& support) const;
  double data_energy() const { return data_energy_; }
  double penalty() const { return settings_.penalty_factor * data_energy_; }

  const BackgroundSolution& background() const { return bg_; }
  const TraceData& data() const { return data_; }
  const InversionSettings& settings() const { return settings_; }
  const std::string& curve() const { return data_.curve; }
  /// Largest Taylor order used by any evaluation so far.
  int max_order_used() const { return *max_order_used_; }

 private:
  BackgroundSolution bg_;
  TraceData data_;
  InversionSettings settings_;
  double data_energy_ = 0.0;
  std::shared_ptr<int> max_order_used_;
};

struct ReconstructionResult {
  std::string stage;
  Support support;
  double amplitude = 0.0;
  double cost = 0.0;
  int evaluations = 0;
  int iterations = 0;
  int order = 0;
  std::vector<double> parameters;
  /// Best cost after each optimizer iteration.
  std::vector<double> trace;
};

struct BallSearch {
  double d0 = 0.4;
  double r0 = 0.15;
  double step_d = 0.05;
  double step_r = 0.05;
};

ReconstructionResult reconstruct_ball(const InverseProblem& problem, const Peak& peak, const BallSearch& search);
/// One ball per peak, sharing one amplitude.
ReconstructionResult reconstruct_multi(const InverseProblem& problem, const std::vector<Peak>& peaks,
                                       const BallSearch& search);
/// Axis-aligned ellipse centred at x - d n; starts from (d0, r0, r0) or from a ball result.
ReconstructionResult reconstruct_ellipse(const InverseProblem& problem, const Peak& peak, const BallSearch& search,
                                         const std::optional<ReconstructionResult>& ball_init = std::nullopt);

struct FourierSearch {
  int max_terms = 4;
  double improve_tol = 0.01;
  double step_coeff = 0.02;
  /// false: start from the default ball guess with all max_terms modes at once.
  bool warm_start = true;
};

/// Star-shaped refinement about x - d n, r(t) = r0 + sum a_n cos nt + b_n sin nt.
ReconstructionResult refine_fourier(const InverseProblem& problem, const Peak& peak, const BallSearch& search,
                                    const ReconstructionResult& ball_init, const FourierSearch& fourier);

/// Ball centre for depth d below the peak.
inline Point peak_center(const Peak& p, double d) { return p.x - d * p.normal; }

}  // namespace qrinv
