#include "qrinv/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <spdlog/spdlog.h>

#include "qrinv/error.hpp"

namespace qrinv {

namespace fs = std::filesystem;

namespace {

class Timer {
 public:
  explicit Timer(std::string what) : what_(std::move(what)), start_(std::chrono::steady_clock::now()) {}
  ~Timer() {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    spdlog::info("{} took {:.2f} s", what_, s);
  }

 private:
  std::string what_;
  std::chrono::steady_clock::time_point start_;
};

std::string fmt_point(Point p) { return "(" + format_double(p.x) + ", " + format_double(p.y) + ")"; }

double rel(double approx, double exact) { return std::abs(approx - exact) / std::abs(exact); }
double rel(Point approx, Point exact) { return norm(approx - exact) / norm(exact); }

std::vector<Point> flatten(const std::vector<std::vector<Point>>& polys) {
  std::vector<Point> out;
  for (const auto& p : polys) out.insert(out.end(), p.begin(), p.end());
  return out;
}

void open_for_write(std::ofstream& out, const fs::path& path) {
  out.open(path);
  if (!out) throw ValidationError("cannot write " + path.string());
}

void log_factorizations() {
  for (const auto& [label, n] : factorization_counts()) spdlog::info("factorizations[{}] = {}", label, n);
}

}  // namespace

std::shared_ptr<const Mesh2D> build_data_mesh(const ExperimentConfig& cfg) {
  const auto& g = cfg.geometry;
  return std::make_shared<const Mesh2D>(
      tag_patches(mesh_disk(g.domain_radius, cfg.meshes.h_data, {g.v_inner_radius, g.gamma_int_radius}), "Gamma",
                  g.patches));
}

std::shared_ptr<const Mesh2D> build_neighborhood_mesh(const ExperimentConfig& cfg) {
  const auto& g = cfg.geometry;
  return std::make_shared<const Mesh2D>(tag_patches(
      mesh_annulus(g.v_inner_radius, g.domain_radius, cfg.meshes.h_v, {g.gamma_int_radius}), "Gamma_outer", g.patches));
}

std::shared_ptr<const Mesh2D> build_inverse_mesh(const ExperimentConfig& cfg) {
  const auto& g = cfg.geometry;
  if (cfg.inversion.domain == InverseDomain::full) {
    return std::make_shared<const Mesh2D>(
        mesh_disk(g.domain_radius, cfg.meshes.h_inverse, {g.v_inner_radius, g.gamma_int_radius}));
  }
  return std::make_shared<const Mesh2D>(mesh_disk(g.gamma_int_radius, cfg.meshes.h_inverse, {g.v_inner_radius}));
}

std::string inverse_curve(const ExperimentConfig& cfg) {
  return cfg.inversion.domain == InverseDomain::full ? radius_tag(cfg.geometry.gamma_int_radius) : "Gamma";
}

Dataset run_synthesis(const ExperimentConfig& cfg) {
  if (!cfg.truth) throw ValidationError("synth requires a ground truth (truth is none)");
  Timer timer("synthesis");
  SynthesisSpec spec;
  spec.mesh = build_data_mesh(cfg);
  spec.medium = cfg.medium;
  spec.truth = {cfg.truth->support, cfg.truth->amplitude, cfg.truth->profile};
  spec.waves = cfg.waves.waves();
  spec.interior_tag = radius_tag(cfg.geometry.gamma_int_radius);
  spec.noise = cfg.noise.eta;
  spec.seed = cfg.noise.seed;
  spdlog::info("data mesh: {} triangles, h = {}, seed = {}, noise = {}", spec.mesh->triangle_count(), spec.mesh->h,
               spec.seed, spec.noise);
  return synthesize_dataset(spec);
}

TraceFile run_completion(const ExperimentConfig& cfg, const Dataset& ds) {
  Timer timer("completion");
  const std::string tag = radius_tag(cfg.geometry.gamma_int_radius);
  TraceFile f;
  f.kind = "completed";
  f.set("config_checksum", format_hex(cfg.checksum()));
  f.set("dataset_mesh_checksum", format_hex(ds.mesh_checksum));
  if (cfg.skip_completion) {
    f.set("source", "exact");
    f.blocks = {{"completed", ds.exact_interior_delta}};
    spdlog::info("completion skipped: exact interior traces used");
    return f;
  }
  const auto mesh = build_neighborhood_mesh(cfg);
  spdlog::info("neighborhood mesh: {} triangles, h = {}", mesh->triangle_count(), mesh->h);
  auto op = std::make_shared<const QROperator>(mesh, cfg.medium, "Gamma0", cfg.qr.scaled_variant);
  const QRSolver solver(op, cfg.qr);
  const TraceData delta = resample_trace(ds.measured_delta(), curve_samples(*mesh, "Gamma0"), "Gamma0", false);
  const CompletionReport rep = complete_traces(solver, delta, tag);
  std::string iters;
  for (std::size_t i = 0; i < rep.iterations.size(); ++i) iters += (i ? " " : "") + std::to_string(rep.iterations[i]);
  for (std::size_t w = 0; w < rep.residuals.size(); ++w) {
    spdlog::info("wave {}: {} QR iterations, final residual {:.6e}", w, rep.iterations[w], rep.residuals[w].back());
  }
  if (rep.residual_increases > 0) spdlog::warn("QR residual increased {} times", rep.residual_increases);
  f.set("source", "qr");
  f.set("mesh_checksum", format_hex(mesh->checksum()));
  f.set("qr_delta", format_double(cfg.qr.delta));
  f.set("qr_max_iters", std::to_string(cfg.qr.max_iters));
  f.set("qr_rel_change_tol", format_double(cfg.qr.rel_change_tol));
  f.set("qr_scaled", cfg.qr.scaled_variant ? "true" : "false");
  f.set("qr_iterations", iters);
  f.set("qr_residual_increases", std::to_string(rep.residual_increases));
  f.blocks = {{"completed", rep.traces}};
  return f;
}

std::vector<ErrorRow> compare_with_truth(const ExperimentConfig& cfg, const ReconstructionResult& r) {
  std::vector<ErrorRow> rows;
  if (!cfg.truth) return rows;
  const auto& truth = *cfg.truth;
  const auto& ts = truth.support.shape();
  const auto& rs = r.support.shape();
  const double gi = cfg.geometry.gamma_int_radius;
  auto add = [&](std::string name, double exact, double approx) {
    rows.push_back({std::move(name), format_double(exact), format_double(approx), rel(approx, exact)});
  };
  auto add_point = [&](std::string name, Point exact, Point approx) {
    rows.push_back({std::move(name), fmt_point(exact), fmt_point(approx), rel(approx, exact)});
  };
  if (const auto* tb = std::get_if<Ball>(&ts)) {
    if (const auto* b = std::get_if<Ball>(&rs)) {
      add_point("center", tb->center, b->center);
      add("radius", tb->radius, b->radius);
    } else if (const auto* e = std::get_if<Ellipse>(&rs)) {
      add_point("center", tb->center, e->center);
    } else if (const auto* s = std::get_if<FourierStar>(&rs)) {
      add_point("center", tb->center, s->center);
    }
    if (!r.parameters.empty() && r.stage != "multi") add("depth", gi - norm(tb->center), r.parameters[0]);
  } else if (const auto* te = std::get_if<Ellipse>(&ts)) {
    if (const auto* e = std::get_if<Ellipse>(&rs)) {
      add_point("center", te->center, e->center);
      add("x-radius", te->rx, e->rx);
      add("y-radius", te->ry, e->ry);
    } else if (const auto* b = std::get_if<Ball>(&rs)) {
      add_point("center", te->center, b->center);
    }
  } else if (const auto* ts_star = std::get_if<FourierStar>(&ts)) {
    if (const auto* b = std::get_if<Ball>(&rs)) add_point("center", ts_star->center, b->center);
    if (const auto* s = std::get_if<FourierStar>(&rs)) add_point("center", ts_star->center, s->center);
  } else if (std::get_if<UnionSupport>(&ts)) {
    const auto truth_parts = truth.support.components();
    const auto rec_parts = r.support.components();
    std::vector<bool> taken(rec_parts.size(), false);
    for (std::size_t i = 0; i < truth_parts.size(); ++i) {
      const auto* tb = std::get_if<Ball>(&truth_parts[i].shape());
      if (!tb) continue;
      std::size_t best = rec_parts.size();
      double best_d = 0.0;
      for (std::size_t j = 0; j < rec_parts.size(); ++j) {
        const auto* b = std::get_if<Ball>(&rec_parts[j].shape());
        if (!b || taken[j]) continue;
        const double d = norm(b->center - tb->center);
        if (best == rec_parts.size() || d < best_d) {
          best = j;
          best_d = d;
        }
      }
      if (best == rec_parts.size()) continue;
      taken[best] = true;
      const auto& b = std::get<Ball>(rec_parts[best].shape());
      add_point("center " + std::to_string(i + 1), tb->center, b.center);
      add("radius " + std::to_string(i + 1), tb->radius, b.radius);
    }
  }
  if (truth.profile == AmplitudeProfile::constant) add("amplitude", truth.amplitude, r.amplitude);
  return rows;
}

InversionOutcome run_inversion(const ExperimentConfig& cfg, const TraceFile& completed) {
  Timer timer("inversion");
  if (completed.kind != "completed") throw ValidationError("expected a completed-trace file, got '" + completed.kind + "'");
  if (completed.get("config_checksum") != format_hex(cfg.checksum())) {
    spdlog::warn("completed traces were produced under a different configuration");
  }
  InversionOutcome out;
  out.inverse_mesh = build_inverse_mesh(cfg);
  out.inverse_mesh_checksum = out.inverse_mesh->checksum();
  const std::string curve = inverse_curve(cfg);
  spdlog::info("inverse mesh: {} triangles, h = {}, data curve {}", out.inverse_mesh->triangle_count(),
               out.inverse_mesh->h, curve);
  const TraceData data =
      resample_trace(completed.block("completed"), curve_samples(*out.inverse_mesh, curve), curve, true);
  out.peaks = locate_peaks(data, cfg.inversion.peak_threshold);
  for (const auto& p : out.peaks.peaks) {
    spdlog::info("peak at ({:.5f}, {:.5f}), height {:.4e}", p.x.x, p.x.y, p.height);
  }

  BackgroundSolution bg = solve_background(out.inverse_mesh, cfg.medium, cfg.waves.waves(), "Gamma");
  out.kappa0 = bg.kappa0;
  const InverseProblem problem(std::move(bg), data, cfg.inversion_settings());
  const BallSearch search = cfg.ball_search();
  const Peak& top = out.peaks.peaks.front();

  std::optional<ReconstructionResult> last_ball;
  for (const auto& stage : cfg.inversion.stages) {
    Timer stage_timer("stage " + stage);
    ReconstructionResult r;
    if (stage == "ball") {
      r = reconstruct_ball(problem, top, search);
      last_ball = r;
    } else if (stage == "multi") {
      r = reconstruct_multi(problem, out.peaks.peaks, search);
    } else if (stage == "ellipse") {
      r = reconstruct_ellipse(problem, top, search, last_ball);
    } else {
      r = refine_fourier(problem, top, search, last_ball.value_or(ReconstructionResult{}), cfg.inversion.fourier);
    }
    StageOutcome so;
    so.cost_recheck = problem.evaluate(r.support).cost;
    so.errors = compare_with_truth(cfg, r);
    if (cfg.truth) so.hausdorff = hausdorff_distance(flatten(cfg.truth->support.boundary()), flatten(r.support.boundary()));
    spdlog::info("stage {}: {} a = {:.6f} cost = {:.6e} ({} evaluations, Taylor order {})", stage, r.support.describe(),
                 r.amplitude, r.cost, r.evaluations, r.order);
    so.result = std::move(r);
    out.stages.push_back(std::move(so));
  }
  if (problem.max_order_used() > cfg.inversion.order) {
    spdlog::warn("Taylor order raised up to {} during the run", problem.max_order_used());
  }
  return out;
}

void write_peaks(std::ostream& out, const ExperimentConfig& cfg, const PeakSet& peaks) {
  out << "# qrinv-peaks v1\nconfig_checksum " << format_hex(cfg.checksum()) << "\ncount " << peaks.peaks.size()
      << "\n# x y normal_x normal_y height\n";
  for (const auto& p : peaks.peaks) {
    out << format_double(p.x.x) << ' ' << format_double(p.x.y) << ' ' << format_double(p.normal.x) << ' '
        << format_double(p.normal.y) << ' ' << format_double(p.height) << '\n';
  }
}

void write_result(std::ostream& out, const ExperimentConfig& cfg, const InversionOutcome& o) {
  out << "# qrinv-result v1\n";
  out << "config_checksum " << format_hex(cfg.checksum()) << '\n';
  out << "config " << to_json(cfg).dump() << '\n';
  out << "inverse_mesh_checksum " << format_hex(o.inverse_mesh_checksum) << '\n';
  out << "peaks " << o.peaks.peaks.size() << '\n';
  for (const auto& s : o.stages) {
    const auto& r = s.result;
    out << "\nstage " << r.stage << '\n';
    out << "support " << support_to_json(r.support).dump() << '\n';
    out << "parameters";
    for (double p : r.parameters) out << ' ' << format_double(p);
    out << '\n';
    out << "amplitude " << format_double(r.amplitude) << '\n';
    out << "cost " << format_double(r.cost) << '\n';
    out << "cost_recheck " << format_double(s.cost_recheck) << '\n';
    out << "evaluations " << r.evaluations << '\n';
    out << "iterations " << r.iterations << '\n';
    out << "taylor_order " << r.order << '\n';
    out << "cost_history";
    for (double c : r.trace) out << ' ' << format_double(c);
    out << '\n';
    if (s.hausdorff >= 0.0) out << "hausdorff " << format_double(s.hausdorff) << '\n';
    if (!s.errors.empty()) {
      out << "table parameter | exact | approximation | relative_error\n";
      for (const auto& e : s.errors) {
        out << "row " << e.parameter << " | " << e.exact << " | " << e.approximation << " | "
            << format_double(e.relative_error) << '\n';
      }
    }
    out << "end_stage\n";
  }
}

void write_field_dump(std::ostream& out, const ExperimentConfig& cfg, const InversionOutcome& o) {
  out << "# qrinv-field v1\nconfig_checksum " << format_hex(cfg.checksum()) << "\n# centroid_x centroid_y re_kappa im_kappa\n";
  if (o.stages.empty()) return;
  const auto& r = o.stages.back().result;
  const Mesh2D& mesh = *o.inverse_mesh;
  const std::vector<double> frac = coverage(mesh, r.support);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const Complex k = o.kappa0 * (1.0 + r.amplitude * frac[t]);
    const Point c = mesh.centroid(static_cast<Index>(t));
    out << format_double(c.x) << ' ' << format_double(c.y) << ' ' << format_double(k.real()) << ' '
        << format_double(k.imag()) << '\n';
  }
}

SweepSummary summarize_sweep(std::vector<SweepRow> rows) {
  SweepSummary s;
  s.rows = std::move(rows);
  const double n = static_cast<double>(s.rows.size());
  if (s.rows.empty()) return s;
  double md = 0.0, mr = 0.0;
  for (const auto& r : s.rows) {
    s.mean_amplitude_error += r.amplitude_error / n;
    md += r.depth / n;
    mr += r.radius / n;
  }
  for (const auto& r : s.rows) {
    s.std_depth += (r.depth - md) * (r.depth - md) / n;
    s.std_radius += (r.radius - mr) * (r.radius - mr) / n;
  }
  s.std_depth = std::sqrt(s.std_depth);
  s.std_radius = std::sqrt(s.std_radius);
  return s;
}

fs::path cmd_synth(const ExperimentConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const Dataset ds = run_synthesis(cfg);
  const fs::path path = out_dir / "dataset.txt";
  save_trace_file(path, dataset_to_file(ds, cfg.checksum()));
  log_factorizations();
  spdlog::info("wrote {}", path.string());
  return path;
}

fs::path cmd_complete(const ExperimentConfig& cfg, const fs::path& dataset, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const TraceFile in = load_trace_file(dataset);
  if (in.get("config_checksum") != format_hex(cfg.checksum())) {
    spdlog::warn("dataset was produced under a different configuration");
  }
  const fs::path path = out_dir / "completed.txt";
  save_trace_file(path, run_completion(cfg, dataset_from_file(in)));
  log_factorizations();
  spdlog::info("wrote {}", path.string());
  return path;
}

fs::path cmd_invert(const ExperimentConfig& cfg, const fs::path& completed, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const InversionOutcome o = run_inversion(cfg, load_trace_file(completed));
  std::ofstream out;
  open_for_write(out, out_dir / "peaks.txt");
  write_peaks(out, cfg, o.peaks);
  out.close();
  open_for_write(out, out_dir / "field.txt");
  write_field_dump(out, cfg, o);
  out.close();
  const fs::path path = out_dir / "result.txt";
  open_for_write(out, path);
  write_result(out, cfg, o);
  log_factorizations();
  spdlog::info("wrote {}", path.string());
  return path;
}

fs::path cmd_pipeline(const ExperimentConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  if (cfg.sweep_amplitudes.empty()) {
    const fs::path ds = cmd_synth(cfg, out_dir);
    const fs::path completed = cmd_complete(cfg, ds, out_dir);
    return cmd_invert(cfg, completed, out_dir);
  }
  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < cfg.sweep_amplitudes.size(); ++k) {
    ExperimentConfig sub = cfg;
    sub.sweep_amplitudes.clear();
    sub.truth->amplitude = cfg.sweep_amplitudes[k];
    sub.name = cfg.name + "_" + std::to_string(k);
    spdlog::info("sweep run {} with amplitude {}", k, sub.truth->amplitude);
    const fs::path dir = out_dir / ("sweep_" + std::to_string(k));
    fs::create_directories(dir);
    const fs::path ds = cmd_synth(sub, dir);
    const fs::path completed = cmd_complete(sub, ds, dir);
    const InversionOutcome o = run_inversion(sub, load_trace_file(completed));
    std::ofstream out;
    open_for_write(out, dir / "result.txt");
    write_result(out, sub, o);
    const auto& r = o.stages.front().result;
    const auto* b = std::get_if<Ball>(&r.support.shape());
    rows.push_back({sub.truth->amplitude, r.amplitude, rel(r.amplitude, sub.truth->amplitude), r.parameters.at(0),
                    b ? b->radius : 0.0});
  }
  const SweepSummary s = summarize_sweep(rows);
  const fs::path path = out_dir / "sweep.txt";
  std::ofstream out;
  open_for_write(out, path);
  out << "# qrinv-sweep v1\nconfig_checksum " << format_hex(cfg.checksum())
      << "\n# exact_amplitude amplitude relative_error depth radius\n";
  for (const auto& r : s.rows) {
    out << format_double(r.exact_amplitude) << ' ' << format_double(r.amplitude) << ' '
        << format_double(r.amplitude_error) << ' ' << format_double(r.depth) << ' ' << format_double(r.radius) << '\n';
  }
  out << "mean_amplitude_error " << format_double(s.mean_amplitude_error) << '\n'
      << "std_depth " << format_double(s.std_depth) << '\n'
      << "std_radius " << format_double(s.std_radius) << '\n';
  return path;
}

}  // namespace qrinv
