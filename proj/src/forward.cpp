#include "qrinv/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "qrinv/error.hpp"

namespace qrinv {

namespace {

Complex sqrt_kappa0(const MediumConfig& m) { return std::sqrt(background_kappa(m)); }

// Deterministic double in [0, 1) from the raw 64-bit engine output.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Complex unit_disk_sample(std::mt19937_64& rng) {
  for (;;) {
    const double u = 2.0 * unit_uniform(rng) - 1.0;
    const double v = 2.0 * unit_uniform(rng) - 1.0;
    if (u * u + v * v < 1.0) return {u, v};
  }
}

}  // namespace

double MediumConfig::wavenumber() const { return omega * std::sqrt(mu0 * eps0); }

void MediumConfig::validate() const {
  if (!(omega > 0.0 && eps0 > 0.0 && mu0 > 0.0 && eps > 0.0 && sigma > 0.0)) {
    throw InvalidCoefficient("medium constants omega, eps0, mu0, eps, sigma must all be positive");
  }
}

Complex background_kappa(const MediumConfig& m) { return Complex(m.eps, m.sigma / m.omega) / m.eps0; }

IncidentWave IncidentWave::from_angle(double theta) { return {{std::cos(theta), std::sin(theta)}}; }

std::vector<IncidentWave> equispaced_waves(int count) {
  std::vector<IncidentWave> waves;
  for (int m = 0; m < count; ++m) waves.push_back(IncidentWave::from_angle(2.0 * M_PI * m / count));
  return waves;
}

ComplexPoint plane_wave_field(const IncidentWave& w, const MediumConfig& m, Point x) {
  const Complex phase = std::exp(Complex(0.0, 1.0) * m.wavenumber() * sqrt_kappa0(m) * dot(w.direction, x));
  const Point pol = w.polarization();
  return {pol.x * phase, pol.y * phase};
}

Complex plane_wave_curl(const IncidentWave& w, const MediumConfig& m, Point x) {
  const Complex ikc = Complex(0.0, 1.0) * m.wavenumber() * sqrt_kappa0(m);
  return ikc * std::exp(ikc * dot(w.direction, x));
}

std::vector<Complex> plane_wave_neumann(const IncidentWave& w, const MediumConfig& m, const Mesh2D& mesh,
                                        const std::string& tag) {
  std::vector<Complex> g;
  for (const auto& ce : mesh.curve(tag)) g.push_back(plane_wave_curl(w, m, mesh.edge_midpoint(ce.edge)));
  return g;
}

CurveSamples curve_samples(const Mesh2D& mesh, const std::string& tag) {
  CurveSamples s;
  for (const auto& ce : mesh.curve(tag)) {
    s.midpoints.push_back(mesh.edge_midpoint(ce.edge));
    s.lengths.push_back(ce.length);
  }
  return s;
}

double TraceData::l2_norm(std::size_t wave) const {
  double acc = 0.0;
  const auto& v = waves.at(wave);
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::norm(v[i]) * samples.lengths[i];
  return std::sqrt(acc);
}

ComplexVector tangential_trace(const EdgeSpace& space, const ComplexVector& field, const std::string& tag) {
  const Mesh2D& mesh = space.mesh();
  const auto& curve = mesh.curve(tag);
  ComplexVector t(static_cast<Eigen::Index>(curve.size()));
  for (std::size_t i = 0; i < curve.size(); ++i) {
    t[static_cast<Eigen::Index>(i)] =
        static_cast<double>(curve_edge_sign(mesh, curve[i])) * field[curve[i].edge] / curve[i].length;
  }
  return t;
}

namespace {

SparseComplexMatrix direct_matrix(const EdgeSpace& space, const CoefficientField& kappa, const MediumConfig& m) {
  m.validate();
  const double k = m.wavenumber();
  SparseComplexMatrix a = assemble_curlcurl(space) - (k * k) * assemble_mass(space, kappa);
  a.makeCompressed();
  return a;
}

}  // namespace

DirectSolver::DirectSolver(const EdgeSpace& space, const CoefficientField& kappa, const MediumConfig& medium,
                           std::string boundary_tag, std::string label)
    : space_(std::make_shared<const EdgeSpace>(space)),
      medium_(medium),
      boundary_tag_(std::move(boundary_tag)),
      factorization_(direct_matrix(space, kappa, medium), std::move(label)) {
  space.mesh().curve(boundary_tag_);
}

ComplexVector DirectSolver::solve(std::span<const Complex> neumann) const {
  return factorization_.solve(assemble_boundary_load(*space_, boundary_tag_, neumann));
}

ComplexVector DirectSolver::solve_load(const ComplexVector& load) const { return factorization_.solve(load); }

std::vector<ComplexVector> DirectSolver::solve_waves(const std::vector<IncidentWave>& waves) const {
  std::vector<ComplexVector> loads;
  for (const auto& w : waves) {
    const auto g = plane_wave_neumann(w, medium_, space_->mesh(), boundary_tag_);
    loads.push_back(assemble_boundary_load(*space_, boundary_tag_, g));
  }
  return factorization_.solve_many(loads);
}

ComplexVector solve_direct(const EdgeSpace& space, const CoefficientField& kappa, std::span<const Complex> neumann,
                           const MediumConfig& medium, const std::string& boundary_tag) {
  return DirectSolver(space, kappa, medium, boundary_tag).solve(neumann);
}

TraceData add_noise(const TraceData& t, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0)) throw InvalidArgument("noise level must be non-negative");
  TraceData out = t;
  if (eta == 0.0) return out;
  std::mt19937_64 rng(seed);
  for (std::size_t w = 0; w < t.waves.size(); ++w) {
    ComplexVector p(t.waves[w].size());
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = unit_disk_sample(rng);
    double pn = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) pn += std::norm(p[i]) * t.samples.lengths[i];
    pn = std::sqrt(pn);
    const double gn = t.l2_norm(w);
    if (gn == 0.0 || pn == 0.0) continue;
    out.waves[w] = t.waves[w] + (eta * gn / pn) * p;
  }
  return out;
}

CoefficientField perturbed_kappa(const Mesh2D& mesh, Complex kappa0, const Perturbation& p) {
  const std::vector<double> frac = coverage(mesh, p.support);
  CoefficientField field = CoefficientField::uniform(mesh, kappa0);
  const Ball* ball = std::get_if<Ball>(&p.support.shape());
  if (p.profile == AmplitudeProfile::bump && ball == nullptr) {
    throw InvalidArgument("the bump amplitude profile requires a ball support");
  }
  for (std::size_t t = 0; t < frac.size(); ++t) {
    if (frac[t] == 0.0) continue;
    double a = p.amplitude;
    if (p.profile == AmplitudeProfile::bump) {
      const double rc = norm(mesh.centroid(static_cast<Index>(t)) - ball->center) / ball->radius;
      a *= rc < 1.0 ? std::exp(-rc * rc / (1.0 - rc * rc)) : 0.0;
    }
    field.values[t] = kappa0 * (1.0 + a * frac[t]);
  }
  return field;
}

TraceData Dataset::measured_delta() const {
  TraceData d = measured;
  for (std::size_t w = 0; w < d.waves.size(); ++w) d.waves[w] = measured.waves[w] - background.waves[w];
  return d;
}

Dataset synthesize_dataset(const SynthesisSpec& spec) {
  spec.medium.validate();
  const Mesh2D& mesh = *spec.mesh;
  const EdgeSpace space(spec.mesh);
  const Complex kappa0 = background_kappa(spec.medium);

  const DirectSolver truth_solver(space, perturbed_kappa(mesh, kappa0, spec.truth), spec.medium, spec.boundary_tag,
                                  "synthesis:kappa_ex");
  const DirectSolver background_solver(space, CoefficientField::uniform(mesh, kappa0), spec.medium,
                                       spec.boundary_tag, "synthesis:kappa0");
  const auto truth_fields = truth_solver.solve_waves(spec.waves);
  const auto background_fields = background_solver.solve_waves(spec.waves);

  Dataset ds;
  for (const auto& w : spec.waves) ds.wave_angles.push_back(angle_of(w.direction));
  ds.mesh_checksum = mesh.checksum();
  ds.mesh_h = mesh.h;
  ds.seed = spec.seed;
  ds.noise = spec.noise;

  auto make_trace = [&](const std::string& tag) {
    TraceData t;
    t.curve = tag;
    t.samples = curve_samples(mesh, tag);
    return t;
  };
  TraceData measured = make_trace(spec.measurement_tag);
  ds.background = make_trace(spec.measurement_tag);
  ds.exact_interior_delta = make_trace(spec.interior_tag);
  for (std::size_t w = 0; w < spec.waves.size(); ++w) {
    measured.waves.push_back(tangential_trace(space, truth_fields[w], spec.measurement_tag));
    ds.background.waves.push_back(tangential_trace(space, background_fields[w], spec.measurement_tag));
    ds.exact_interior_delta.waves.push_back(
        tangential_trace(space, truth_fields[w] - background_fields[w], spec.interior_tag));
  }
  ds.measured = add_noise(measured, spec.noise, spec.seed);
  return ds;
}

ComplexVector resample_by_angle(const CurveSamples& from, const ComplexVector& values, const CurveSamples& to,
                                bool closed, double gap_factor) {
  const std::size_t n = from.size();
  if (n == 0) throw InvalidArgument("resample: empty source curve");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> angle(n);
  for (std::size_t i = 0; i < n; ++i) angle[i] = wrap_angle(angle_of(from.midpoints[i]));
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return angle[a] < angle[b]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = angle[order[i]];

  double median_gap = 2.0 * M_PI;
  if (n > 1) {
    std::vector<double> gaps;
    for (std::size_t i = 0; i + 1 < n; ++i) gaps.push_back(sorted[i + 1] - sorted[i]);
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    median_gap = gaps[gaps.size() / 2];
  }

  ComplexVector out(static_cast<Eigen::Index>(to.size()));
  for (std::size_t j = 0; j < to.size(); ++j) {
    const double t = wrap_angle(angle_of(to.midpoints[j]));
    const std::size_t hi = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
    const std::size_t i1 = hi % n;
    const std::size_t i0 = (hi + n - 1) % n;
    double a0 = sorted[i0], a1 = sorted[i1];
    if (hi == 0) a0 -= 2.0 * M_PI;
    if (hi == n) a1 += 2.0 * M_PI;
    const double gap = a1 - a0;
    const Complex v0 = values[static_cast<Eigen::Index>(order[i0])];
    const Complex v1 = values[static_cast<Eigen::Index>(order[i1])];
    if (n == 1 || gap <= 0.0) {
      out[static_cast<Eigen::Index>(j)] = v0;
    } else if (!closed && gap > gap_factor * median_gap) {
      out[static_cast<Eigen::Index>(j)] = (t - a0 <= a1 - t) ? v0 : v1;
    } else {
      const double s = (t - a0) / gap;
      out[static_cast<Eigen::Index>(j)] = (1.0 - s) * v0 + s * v1;
    }
  }
  return out;
}

TraceData resample_trace(const TraceData& from, const CurveSamples& to, const std::string& curve, bool closed) {
  TraceData out;
  out.curve = curve;
  out.samples = to;
  for (const auto& w : from.waves) out.waves.push_back(resample_by_angle(from.samples, w, to, closed));
  return out;
}

}  // namespace qrinv
