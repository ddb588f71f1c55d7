#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "qrinv/config.hpp"
#include "qrinv/io.hpp"

namespace qrinv {

/// Fine disk mesh with the neighborhood and interior circles embedded and the
/// accessible patches tagged "Gamma0".
std::shared_ptr<const Mesh2D> build_data_mesh(const ExperimentConfig& cfg);
/// Annulus mesh of the known neighborhood, patches tagged on the outer circle.
std::shared_ptr<const Mesh2D> build_neighborhood_mesh(const ExperimentConfig& cfg);
/// Mesh the linearized problem is posed on, and the tag of its data curve.
std::shared_ptr<const Mesh2D> build_inverse_mesh(const ExperimentConfig& cfg);
std::string inverse_curve(const ExperimentConfig& cfg);

/// Synthetic measurements; throws ValidationError without a ground truth.
Dataset run_synthesis(const ExperimentConfig& cfg);

/// Difference traces on the interior curve: QR completion of the measured
/// difference data, or the exact diagnostic traces when skip_completion is set.
TraceFile run_completion(const ExperimentConfig& cfg, const Dataset& ds);

struct ErrorRow {
  std::string parameter;
  std::string exact;
  std::string approximation;
  double relative_error = 0.0;
};

struct StageOutcome {
  ReconstructionResult result;
  /// cost_J re-evaluated at the reported optimum.
  double cost_recheck = 0.0;
  std::vector<ErrorRow> errors;
  /// Boundary Hausdorff distance to the ground truth (negative when unknown).
  double hausdorff = -1.0;
};

struct InversionOutcome {
  PeakSet peaks;
  std::vector<StageOutcome> stages;
  std::uint64_t inverse_mesh_checksum = 0;
  std::shared_ptr<const Mesh2D> inverse_mesh;
  Complex kappa0;
};

InversionOutcome run_inversion(const ExperimentConfig& cfg, const TraceFile& completed);

/// Relative-error rows of a reconstruction against the configured truth.
std::vector<ErrorRow> compare_with_truth(const ExperimentConfig& cfg, const ReconstructionResult& r);

void write_result(std::ostream& out, const ExperimentConfig& cfg, const InversionOutcome& outcome);
void write_peaks(std::ostream& out, const ExperimentConfig& cfg, const PeakSet& peaks);
/// Rows: centroid x, centroid y, Re kappa, Im kappa of the last stage.
void write_field_dump(std::ostream& out, const ExperimentConfig& cfg, const InversionOutcome& outcome);

struct SweepRow {
  double exact_amplitude = 0.0;
  double amplitude = 0.0;
  double amplitude_error = 0.0;
  double depth = 0.0;
  double radius = 0.0;
};

struct SweepSummary {
  std::vector<SweepRow> rows;
  double mean_amplitude_error = 0.0;
  double std_depth = 0.0;
  double std_radius = 0.0;
};

SweepSummary summarize_sweep(std::vector<SweepRow> rows);

// Commands: each writes its artifacts into `out_dir` and returns the main path.
std::filesystem::path cmd_synth(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
std::filesystem::path cmd_complete(const ExperimentConfig& cfg, const std::filesystem::path& dataset,
                                   const std::filesystem::path& out_dir);
std::filesystem::path cmd_invert(const ExperimentConfig& cfg, const std::filesystem::path& completed,
                                 const std::filesystem::path& out_dir);
/// synth -> complete -> invert; with sweep_amplitudes, one run per amplitude
/// in sweep_<k>/ plus sweep.txt.
std::filesystem::path cmd_pipeline(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace qrinv
