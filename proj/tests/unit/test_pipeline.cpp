#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qrinv/error.hpp"
#include "qrinv/pipeline.hpp"

using namespace qrinv;
namespace fs = std::filesystem;

namespace {

// Coarse configuration that runs in seconds.
ExperimentConfig small_config() {
  ExperimentConfig c = preset("table5");
  c.meshes = {0.06, 0.06, 0.1, false};
  c.waves.count = 4;
  c.inversion.ftol = 1e-4;
  c.inversion.max_iter = 5;
  c.validate();
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qrinv_unit_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("synthesis requires a ground truth") {
  ExperimentConfig c = small_config();
  c.truth.reset();
  CHECK_THROWS_AS(run_synthesis(c), ValidationError);
}

TEST_CASE("synthesis output") {
  const ExperimentConfig c = small_config();
  const Dataset ds = run_synthesis(c);
  CHECK(ds.measured.waves.size() == 4);
  CHECK(ds.measured.curve == "Gamma0");
  CHECK(ds.exact_interior_delta.curve == "r=0.8");
  for (const auto& w : ds.measured.waves) CHECK(w.norm() > 0.0);

  SUBCASE("dataset file round-trips bitwise") {
    const fs::path dir = scratch("synth");
    const fs::path path = cmd_synth(c, dir);
    const std::string text = slurp(path);
    save_trace_file(dir / "again.txt", load_trace_file(path));
    CHECK(slurp(dir / "again.txt") == text);
    fs::remove_all(dir);
  }
  SUBCASE("seed only matters with noise") {
    ExperimentConfig other = c;
    other.noise.seed = 99;
    const Dataset clean = run_synthesis(other);
    CHECK((clean.measured.waves[0] - ds.measured.waves[0]).norm() == 0.0);
    ExperimentConfig noisy_a = c, noisy_b = c;
    noisy_a.noise.eta = noisy_b.noise.eta = 0.02;
    noisy_b.noise.seed = 99;
    const Dataset na = run_synthesis(noisy_a), na2 = run_synthesis(noisy_a), nb = run_synthesis(noisy_b);
    CHECK((na.measured.waves[0] - na2.measured.waves[0]).norm() == 0.0);
    CHECK((na.measured.waves[0] - nb.measured.waves[0]).norm() > 0.0);
  }
}

TEST_CASE("completion") {
  ExperimentConfig c = small_config();
  const Dataset ds = run_synthesis(c);
  SUBCASE("skip mode copies the exact interior traces") {
    const TraceFile f = run_completion(c, ds);
    CHECK(f.get("source") == "exact");
    CHECK((f.block("completed").waves[1] - ds.exact_interior_delta.waves[1]).norm() == 0.0);
  }
  SUBCASE("QR mode records its settings") {
    c.skip_completion = false;
    const TraceFile f = run_completion(c, ds);
    CHECK(f.get("source") == "qr");
    CHECK(f.get("qr_delta") == format_double(0.1));
    CHECK(f.get("qr_max_iters") == "50");
    CHECK(f.get("qr_residual_increases") == "0");
    CHECK(f.block("completed").waves.size() == 4);
  }
  SUBCASE("zero difference data gives zero traces") {
    c.skip_completion = false;
    Dataset zero = ds;
    zero.measured = zero.background;
    const TraceFile f = run_completion(c, zero);
    for (const auto& w : f.block("completed").waves) CHECK(w.norm() == 0.0);
  }
}

TEST_CASE("pipeline artifacts are deterministic") {
  const ExperimentConfig c = small_config();
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  cmd_pipeline(c, a);
  cmd_pipeline(c, b);
  for (const char* name : {"dataset.txt", "completed.txt", "peaks.txt", "field.txt", "result.txt"}) {
    REQUIRE(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }
  const std::string result = slurp(a / "result.txt");
  CHECK(result.find("stage ball") != std::string::npos);
  CHECK(result.find("cost_recheck") != std::string::npos);
  // The cost recheck reproduces the optimizer's cost.
  std::istringstream in(result);
  std::string key, cost, recheck;
  for (std::string line; std::getline(in, line);) {
    std::istringstream ls(line);
    ls >> key;
    if (key == "cost") ls >> cost;
    if (key == "cost_recheck") ls >> recheck;
  }
  CHECK(cost == recheck);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("sweep summary") {
  const SweepSummary s = summarize_sweep({{0.1, 0.09, 0.1, 0.41, 0.2}, {-0.1, -0.08, 0.2, 0.43, 0.22}});
  CHECK(s.mean_amplitude_error == doctest::Approx(0.15));
  CHECK(s.std_depth == doctest::Approx(0.01));
  CHECK(s.std_radius == doctest::Approx(0.01));
}

TEST_CASE("inverse mesh geometry") {
  ExperimentConfig c = small_config();
  const auto full = build_inverse_mesh(c);
  CHECK(full->has_curve(inverse_curve(c)));
  CHECK(full->has_curve("Gamma"));
  c.inversion.domain = InverseDomain::interior;
  const auto inner = build_inverse_mesh(c);
  CHECK(mesh_area(*inner) < mesh_area(*full));
}
