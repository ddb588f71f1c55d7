#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qrinv/completion.hpp"
#include "qrinv/forward.hpp"
#include "qrinv/inversion.hpp"
#include "qrinv/mesh.hpp"

namespace qrinv {

struct GeometryConfig {
  double domain_radius = 1.0;
  double v_inner_radius = 0.7;
  double gamma_int_radius = 0.8;
  PatchSpec patches;
};

struct MeshConfig {
  double h_data = 0.03;
  double h_v = 0.03;
  double h_inverse = 0.05;
  /// Allows h_data >= h_inverse.
  bool allow_inverse_crime = false;
};

struct TruthConfig {
  Support support;
  double amplitude = 0.0;
  AmplitudeProfile profile = AmplitudeProfile::constant;
};

struct WaveConfig {
  int count = 8;
  /// Explicit directions (radians); overrides count when nonempty.
  std::vector<double> angles;

  std::vector<IncidentWave> waves() const;
};

struct NoiseConfig {
  double eta = 0.0;
  std::uint64_t seed = 1;
};

/// Where the linearized problem is posed: the whole domain (known background
/// in the neighborhood) or the disk bounded by the interior curve.
enum class InverseDomain { full, interior };

struct InversionConfig {
  std::vector<std::string> stages{"ball"};
  InverseDomain domain = InverseDomain::full;
  int order = 4;
  bool auto_order = true;
  int max_order = 10;
  double peak_threshold = 0.5;
  /// Defaults: half the interior radius, 0.15 times the domain radius.
  std::optional<double> d0;
  std::optional<double> r0;
  double step_d = 0.05;
  double step_r = 0.05;
  double ftol = 1e-6;
  int max_iter = 100;
  double golden_tol = 1e-5;
  double amplitude_lo = -0.99;
  double amplitude_hi = 0.99;
  FourierSearch fourier;
};

struct ExperimentConfig {
  std::string name = "experiment";
  GeometryConfig geometry;
  MediumConfig medium;
  std::optional<TruthConfig> truth;
  WaveConfig waves;
  MeshConfig meshes;
  QRConfig qr;
  InversionConfig inversion;
  NoiseConfig noise;
  bool skip_completion = false;
  /// Amplitude sweep: one full run per truth amplitude.
  std::vector<double> sweep_amplitudes;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  /// FNV-1a of the canonical JSON dump.
  std::uint64_t checksum() const;

  InversionSettings inversion_settings() const;
  BallSearch ball_search() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Missing fields take defaults; unknown keys and type errors throw ValidationError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

nlohmann::json support_to_json(const Support& s);
Support support_from_json(const nlohmann::json& j, const std::string& where = "support");

/// Built-in experiment names.
std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);
/// Mesh sizes of the original study.
void apply_paper_scale(ExperimentConfig& cfg);

}  // namespace qrinv
