#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrinv/fem.hpp"
#include "qrinv/support.hpp"

namespace qrinv {

/// Physical constants of the medium. All fields must be positive.
struct MediumConfig {
  double omega = 1.0;
  double eps0 = 1.0;
  double mu0 = 1.0;
  double eps = 1.0;
  double sigma = 1.0;

  /// k = omega sqrt(mu0 eps0)
  double wavenumber() const;
  void validate() const;
};

/// kappa0 = (eps + i sigma / omega) / eps0
Complex background_kappa(const MediumConfig& m);

struct IncidentWave {
  Point direction{1.0, 0.0};

  static IncidentWave from_angle(double theta);
  Point polarization() const { return perp(direction); }
};

/// Directions (cos t_m, sin t_m), t_m = 2 pi m / count.
std::vector<IncidentWave> equispaced_waves(int count);

/// E(x) = perp(eta) exp(i k sqrt(kappa0) eta . x), principal square root.
ComplexPoint plane_wave_field(const IncidentWave& w, const MediumConfig& m, Point x);
/// Scalar curl of the plane wave: i k sqrt(kappa0) exp(i k sqrt(kappa0) eta . x).
Complex plane_wave_curl(const IncidentWave& w, const MediumConfig& m, Point x);
/// Neumann data curl E sampled at the tagged edge midpoints.
std::vector<Complex> plane_wave_neumann(const IncidentWave& w, const MediumConfig& m, const Mesh2D& mesh,
                                        const std::string& tag);

/// Midpoints and arc lengths of the tagged edges of a curve.
struct CurveSamples {
  std::vector<Point> midpoints;
  std::vector<double> lengths;

  std::size_t size() const { return midpoints.size(); }
  friend bool operator==(const CurveSamples&, const CurveSamples&) = default;
};

CurveSamples curve_samples(const Mesh2D& mesh, const std::string& tag);

/// Tangential traces on a curve, one complex vector per incident wave.
struct TraceData {
  std::string curve;
  CurveSamples samples;
  std::vector<ComplexVector> waves;

  /// Arc-length weighted discrete L2 norm of one wave.
  double l2_norm(std::size_t wave) const;
};

/// Midpoint tangential component E . tau on each tagged edge (dof / length,
/// tau counterclockwise).
ComplexVector tangential_trace(const EdgeSpace& space, const ComplexVector& field, const std::string& tag);

/// Sesquilinear direct problem (S - k^2 M(kappa)) x = load of g_N on the boundary
/// tag, with the factorization kept for further right-hand sides.
class DirectSolver {
 public:
  DirectSolver(const EdgeSpace& space, const CoefficientField& kappa, const MediumConfig& medium,
               std::string boundary_tag = "Gamma", std::string label = "direct");

  ComplexVector solve(std::span<const Complex> neumann) const;
  ComplexVector solve_load(const ComplexVector& load) const;
  std::vector<ComplexVector> solve_waves(const std::vector<IncidentWave>& waves) const;

  const EdgeSpace& space() const { return *space_; }
  const MediumConfig& medium() const { return medium_; }
  const Factorization& factorization() const { return factorization_; }
  const std::string& boundary_tag() const { return boundary_tag_; }

 private:
  std::shared_ptr<const EdgeSpace> space_;
  MediumConfig medium_;
  std::string boundary_tag_;
  Factorization factorization_;
};

/// One-shot direct solve.
ComplexVector solve_direct(const EdgeSpace& space, const CoefficientField& kappa, std::span<const Complex> neumann,
                           const MediumConfig& medium, const std::string& boundary_tag = "Gamma");

/// Adds one uniform complex sample from the unit disk per trace value, scaled
/// so that every wave has relative L2 error exactly eta.
TraceData add_noise(const TraceData& t, double eta, std::uint64_t seed);

enum class AmplitudeProfile { constant, bump };

/// Ground truth kappa = kappa0 (1 + a chi_D); the bump profile multiplies a by
/// exp(-rc^2 / (1 - rc^2)) with rc the normalized distance to a ball center.
struct Perturbation {
  Support support;
  double amplitude = 0.0;
  AmplitudeProfile profile = AmplitudeProfile::constant;
};

/// Per-triangle kappa0 (1 + a * coverage * profile).
CoefficientField perturbed_kappa(const Mesh2D& mesh, Complex kappa0, const Perturbation& p);

struct SynthesisSpec {
  std::shared_ptr<const Mesh2D> mesh;
  MediumConfig medium;
  Perturbation truth;
  std::vector<IncidentWave> waves;
  std::string boundary_tag = "Gamma";
  std::string measurement_tag = "Gamma0";
  std::string interior_tag;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

/// Synthetic measurements: E[kappa_ex] x n and E[kappa0] x n on the
/// measurement curve (the former possibly noisy), plus the exact difference
/// trace on the interior curve for diagnostics.
struct Dataset {
  std::vector<double> wave_angles;
  std::uint64_t mesh_checksum = 0;
  double mesh_h = 0.0;
  std::uint64_t seed = 0;
  double noise = 0.0;
  TraceData measured;
  TraceData background;
  TraceData exact_interior_delta;

  /// measured - background on the measurement curve.
  TraceData measured_delta() const;
};

Dataset synthesize_dataset(const SynthesisSpec& spec);

/// Linear interpolation of curve samples by polar angle onto new midpoints.
/// Closed curves interpolate periodically; on open arcs a target between two
/// samples separated by more than `gap_factor` times the median spacing takes
/// the nearer sample.
ComplexVector resample_by_angle(const CurveSamples& from, const ComplexVector& values, const CurveSamples& to,
                                bool closed, double gap_factor = 2.5);

TraceData resample_trace(const TraceData& from, const CurveSamples& to, const std::string& curve, bool closed);

}  // namespace qrinv
