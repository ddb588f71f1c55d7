#include "qrinv/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "qrinv/error.hpp"
#include "qrinv/io.hpp"

namespace qrinv {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were used.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + ": expected an object");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    used_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError(field(key) + ": wrong type (" + j_.at(key).dump() + ")");
    }
  }

  template <class T>
  void get(const std::string& key, std::optional<T>& out) {
    used_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    T v{};
    get(key, v);
    out = v;
  }

  const json* child(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return nullptr;
    return &j_.at(key);
  }

  std::string field(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) throw ValidationError(field(k) + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Point read_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ValidationError(where + ": expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

void require(bool ok, const std::string& where, const std::string& what) {
  if (!ok) throw ValidationError(where + ": " + what);
}

const char* domain_name(InverseDomain d) { return d == InverseDomain::full ? "full" : "interior"; }

}  // namespace

std::vector<IncidentWave> WaveConfig::waves() const {
  if (angles.empty()) return equispaced_waves(count);
  std::vector<IncidentWave> w;
  for (double a : angles) w.push_back(IncidentWave::from_angle(a));
  return w;
}

json support_to_json(const Support& s) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return {{"type", "ball"}, {"center", {v.center.x, v.center.y}}, {"radius", v.radius}};
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          return {{"type", "ellipse"}, {"center", {v.center.x, v.center.y}}, {"rx", v.rx}, {"ry", v.ry}};
        } else if constexpr (std::is_same_v<T, FourierStar>) {
          return {{"type", "fourier"},
                  {"center", {v.center.x, v.center.y}},
                  {"r0", v.r0},
                  {"cos", v.cos_coeffs},
                  {"sin", v.sin_coeffs}};
        } else {
          json parts = json::array();
          for (const auto& p : v.parts) parts.push_back(support_to_json(p));
          return {{"type", "union"}, {"parts", parts}};
        }
      },
      s.shape());
}

Support support_from_json(const json& j, const std::string& where) {
  Reader r(j, where);
  std::string type;
  r.get("type", type);
  Point center;
  if (type != "union") {
    const json* c = r.child("center");
    require(c != nullptr, r.field("center"), "required");
    center = read_point(*c, r.field("center"));
  }
  Support out;
  if (type == "ball") {
    Ball b{center, 0.0};
    r.get("radius", b.radius);
    out = b;
  } else if (type == "ellipse") {
    Ellipse e{center, 0.0, 0.0};
    r.get("rx", e.rx);
    r.get("ry", e.ry);
    out = e;
  } else if (type == "fourier") {
    FourierStar s;
    s.center = center;
    r.get("r0", s.r0);
    r.get("cos", s.cos_coeffs);
    r.get("sin", s.sin_coeffs);
    out = s;
  } else if (type == "union") {
    UnionSupport u;
    const json* parts = r.child("parts");
    require(parts && parts->is_array() && !parts->empty(), r.field("parts"), "expected a nonempty array");
    for (std::size_t i = 0; i < parts->size(); ++i) {
      u.parts.push_back(support_from_json((*parts)[i], r.field("parts") + "[" + std::to_string(i) + "]"));
    }
    out = u;
  } else {
    throw ValidationError(r.field("type") + ": expected ball, ellipse, fourier or union");
  }
  r.finish();
  require(out.well_formed(), where, "radii must be positive (" + out.describe() + ")");
  return out;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["geometry"] = {{"domain_radius", c.geometry.domain_radius},
                   {"v_inner_radius", c.geometry.v_inner_radius},
                   {"gamma_int_radius", c.geometry.gamma_int_radius},
                   {"patches",
                    {{"count", c.geometry.patches.count},
                     {"angular_half_width", c.geometry.patches.angular_half_width},
                     {"phase", c.geometry.patches.phase}}}};
  j["medium"] = {{"omega", c.medium.omega},
                 {"eps0", c.medium.eps0},
                 {"mu0", c.medium.mu0},
                 {"eps", c.medium.eps},
                 {"sigma", c.medium.sigma}};
  if (c.truth) {
    j["truth"] = {{"support", support_to_json(c.truth->support)},
                  {"amplitude", c.truth->amplitude},
                  {"profile", c.truth->profile == AmplitudeProfile::bump ? "bump" : "constant"}};
  } else {
    j["truth"] = nullptr;
  }
  j["waves"] = {{"count", c.waves.count}, {"angles", c.waves.angles}};
  j["meshes"] = {{"h_data", c.meshes.h_data},
                 {"h_v", c.meshes.h_v},
                 {"h_inverse", c.meshes.h_inverse},
                 {"allow_inverse_crime", c.meshes.allow_inverse_crime}};
  j["qr"] = {{"delta", c.qr.delta},
             {"max_iters", c.qr.max_iters},
             {"rel_change_tol", c.qr.rel_change_tol},
             {"scaled", c.qr.scaled_variant}};
  const auto& in = c.inversion;
  j["inversion"] = {{"stages", in.stages},
                    {"domain", domain_name(in.domain)},
                    {"order", in.order},
                    {"auto_order", in.auto_order},
                    {"max_order", in.max_order},
                    {"peak_threshold", in.peak_threshold},
                    {"d0", in.d0 ? json(*in.d0) : json(nullptr)},
                    {"r0", in.r0 ? json(*in.r0) : json(nullptr)},
                    {"step_d", in.step_d},
                    {"step_r", in.step_r},
                    {"ftol", in.ftol},
                    {"max_iter", in.max_iter},
                    {"golden_tol", in.golden_tol},
                    {"amplitude_bracket", {in.amplitude_lo, in.amplitude_hi}},
                    {"fourier",
                     {{"max_terms", in.fourier.max_terms},
                      {"improve_tol", in.fourier.improve_tol},
                      {"step", in.fourier.step_coeff},
                      {"warm_start", in.fourier.warm_start}}}};
  j["noise"] = {{"eta", c.noise.eta}, {"seed", c.noise.seed}};
  j["skip_completion"] = c.skip_completion;
  j["sweep_amplitudes"] = c.sweep_amplitudes;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  Reader r(j, "config");
  r.get("name", c.name);
  if (const json* g = r.child("geometry")) {
    Reader rg(*g, "geometry");
    rg.get("domain_radius", c.geometry.domain_radius);
    rg.get("v_inner_radius", c.geometry.v_inner_radius);
    rg.get("gamma_int_radius", c.geometry.gamma_int_radius);
    if (const json* p = rg.child("patches")) {
      Reader rp(*p, "geometry.patches");
      rp.get("count", c.geometry.patches.count);
      rp.get("angular_half_width", c.geometry.patches.angular_half_width);
      rp.get("phase", c.geometry.patches.phase);
      rp.finish();
    }
    rg.finish();
  }
  if (const json* m = r.child("medium")) {
    Reader rm(*m, "medium");
    rm.get("omega", c.medium.omega);
    rm.get("eps0", c.medium.eps0);
    rm.get("mu0", c.medium.mu0);
    rm.get("eps", c.medium.eps);
    rm.get("sigma", c.medium.sigma);
    rm.finish();
  }
  if (const json* t = r.child("truth")) {
    if (!(t->is_string() && t->get<std::string>() == "none")) {
      Reader rt(*t, "truth");
      TruthConfig truth;
      const json* s = rt.child("support");
      require(s != nullptr, "truth.support", "required");
      truth.support = support_from_json(*s, "truth.support");
      rt.get("amplitude", truth.amplitude);
      std::string profile = "constant";
      rt.get("profile", profile);
      require(profile == "constant" || profile == "bump", "truth.profile", "expected constant or bump");
      truth.profile = profile == "bump" ? AmplitudeProfile::bump : AmplitudeProfile::constant;
      rt.finish();
      c.truth = truth;
    }
  }
  if (const json* w = r.child("waves")) {
    Reader rw(*w, "waves");
    rw.get("count", c.waves.count);
    rw.get("angles", c.waves.angles);
    rw.finish();
  }
  if (const json* m = r.child("meshes")) {
    Reader rm(*m, "meshes");
    rm.get("h_data", c.meshes.h_data);
    rm.get("h_v", c.meshes.h_v);
    rm.get("h_inverse", c.meshes.h_inverse);
    rm.get("allow_inverse_crime", c.meshes.allow_inverse_crime);
    rm.finish();
  }
  if (const json* q = r.child("qr")) {
    Reader rq(*q, "qr");
    rq.get("delta", c.qr.delta);
    rq.get("max_iters", c.qr.max_iters);
    rq.get("rel_change_tol", c.qr.rel_change_tol);
    rq.get("scaled", c.qr.scaled_variant);
    rq.finish();
  }
  if (const json* i = r.child("inversion")) {
    auto& in = c.inversion;
    Reader ri(*i, "inversion");
    ri.get("stages", in.stages);
    std::string domain = domain_name(in.domain);
    ri.get("domain", domain);
    require(domain == "full" || domain == "interior", "inversion.domain", "expected full or interior");
    in.domain = domain == "full" ? InverseDomain::full : InverseDomain::interior;
    ri.get("order", in.order);
    ri.get("auto_order", in.auto_order);
    ri.get("max_order", in.max_order);
    ri.get("peak_threshold", in.peak_threshold);
    ri.get("d0", in.d0);
    ri.get("r0", in.r0);
    ri.get("step_d", in.step_d);
    ri.get("step_r", in.step_r);
    ri.get("ftol", in.ftol);
    ri.get("max_iter", in.max_iter);
    ri.get("golden_tol", in.golden_tol);
    std::vector<double> bracket{in.amplitude_lo, in.amplitude_hi};
    ri.get("amplitude_bracket", bracket);
    require(bracket.size() == 2, "inversion.amplitude_bracket", "expected [lo, hi]");
    in.amplitude_lo = bracket[0];
    in.amplitude_hi = bracket[1];
    if (const json* f = ri.child("fourier")) {
      Reader rf(*f, "inversion.fourier");
      rf.get("max_terms", in.fourier.max_terms);
      rf.get("improve_tol", in.fourier.improve_tol);
      rf.get("step", in.fourier.step_coeff);
      rf.get("warm_start", in.fourier.warm_start);
      rf.finish();
    }
    ri.finish();
  }
  if (const json* n = r.child("noise")) {
    Reader rn(*n, "noise");
    rn.get("eta", c.noise.eta);
    rn.get("seed", c.noise.seed);
    rn.finish();
  }
  r.get("skip_completion", c.skip_completion);
  r.get("sweep_amplitudes", c.sweep_amplitudes);
  r.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": invalid JSON (" + e.what() + ")");
  }
  return config_from_json(j);
}

void ExperimentConfig::validate() const {
  const auto& g = geometry;
  require(g.domain_radius > 0.0, "geometry.domain_radius", "must be positive");
  require(g.v_inner_radius > 0.0 && g.v_inner_radius < g.gamma_int_radius, "geometry",
          "need 0 < v_inner_radius < gamma_int_radius");
  require(g.gamma_int_radius < g.domain_radius, "geometry", "need gamma_int_radius < domain_radius");
  require(g.patches.count >= 1, "geometry.patches.count", "must be at least 1");
  require(g.patches.angular_half_width > 0.0 && g.patches.angular_half_width < M_PI / g.patches.count,
          "geometry.patches.angular_half_width", "must lie in (0, pi / count)");
  try {
    medium.validate();
  } catch (const Error& e) {
    throw ValidationError(std::string("medium: ") + e.what());
  }
  require(waves.count >= 1 || !waves.angles.empty(), "waves", "need count >= 1 or explicit angles");

  const auto& m = meshes;
  require(m.h_data > 0.0 && m.h_v > 0.0 && m.h_inverse > 0.0, "meshes", "mesh sizes must be positive");
  require(m.h_data < g.v_inner_radius && m.h_inverse < g.v_inner_radius, "meshes", "mesh sizes too large for the geometry");
  require(m.h_v < g.domain_radius - g.v_inner_radius, "meshes.h_v", "must be below the neighborhood width");
  require(m.allow_inverse_crime || m.h_data < m.h_inverse, "meshes",
          "h_data must be below h_inverse (inverse-crime guard; set allow_inverse_crime to override)");

  if (truth) {
    require(truth->support.well_formed(), "truth.support", "ill-formed support");
    require(truth->support.max_radius() < g.v_inner_radius, "truth.support",
            "must lie inside the disk of radius v_inner_radius");
    require(std::abs(truth->amplitude) < 1.0, "truth.amplitude", "must satisfy |a| < 1");
  }
  for (double a : sweep_amplitudes) {
    require(a != 0.0 && std::abs(a) < 1.0, "sweep_amplitudes", "entries must satisfy 0 < |a| < 1");
  }
  require(sweep_amplitudes.empty() || truth.has_value(), "sweep_amplitudes", "a sweep needs a ground truth");

  try {
    qr.validate();
  } catch (const Error& e) {
    throw ValidationError(std::string("qr: ") + e.what());
  }

  const auto& in = inversion;
  require(!in.stages.empty(), "inversion.stages", "must not be empty");
  bool ball_seen = false;
  for (const auto& s : in.stages) {
    require(s == "ball" || s == "ellipse" || s == "multi" || s == "fourier", "inversion.stages",
            "unknown stage '" + s + "'");
    if (s == "fourier") {
      require(ball_seen || !in.fourier.warm_start, "inversion.stages",
              "fourier needs an earlier ball stage to warm-start from");
    }
    ball_seen = ball_seen || s == "ball";
  }
  require(in.order >= 1 && in.order <= in.max_order && in.max_order <= 10, "inversion.order",
          "need 1 <= order <= max_order <= 10");
  require(in.peak_threshold > 0.0 && in.peak_threshold <= 1.0, "inversion.peak_threshold", "must lie in (0, 1]");
  require(!in.d0 || *in.d0 > 0.0, "inversion.d0", "must be positive");
  require(!in.r0 || *in.r0 > 0.0, "inversion.r0", "must be positive");
  require(in.step_d > 0.0 && in.step_r > 0.0, "inversion", "steps must be positive");
  require(in.ftol > 0.0 && in.max_iter >= 1 && in.golden_tol > 0.0, "inversion", "need ftol > 0, max_iter >= 1, golden_tol > 0");
  require(-1.0 < in.amplitude_lo && in.amplitude_lo < in.amplitude_hi && in.amplitude_hi < 1.0,
          "inversion.amplitude_bracket", "need -1 < lo < hi < 1");
  require(in.fourier.max_terms >= 1 && in.fourier.improve_tol > 0.0 && in.fourier.step_coeff > 0.0,
          "inversion.fourier", "need max_terms >= 1, improve_tol > 0, step > 0");
  require(noise.eta >= 0.0, "noise.eta", "must be non-negative");
}

std::uint64_t ExperimentConfig::checksum() const { return fnv1a(to_json(*this).dump()); }

InversionSettings ExperimentConfig::inversion_settings() const {
  InversionSettings s;
  s.order = inversion.order;
  s.auto_order = inversion.auto_order;
  s.max_order = inversion.max_order;
  s.amplitude.lo = inversion.amplitude_lo;
  s.amplitude.hi = inversion.amplitude_hi;
  s.amplitude.tol = inversion.golden_tol;
  s.powell.ftol = inversion.ftol;
  s.powell.max_iter = inversion.max_iter;
  s.admissible_radius = geometry.v_inner_radius;
  return s;
}

BallSearch ExperimentConfig::ball_search() const {
  BallSearch b;
  b.d0 = inversion.d0.value_or(0.5 * geometry.gamma_int_radius);
  b.r0 = inversion.r0.value_or(0.15 * geometry.domain_radius);
  b.step_d = inversion.step_d;
  b.step_r = inversion.step_r;
  return b;
}

std::vector<std::string> preset_names() {
  return {"table1", "table5", "table2", "ellipse", "two_ball", "star", "bump", "noisy"};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  TruthConfig ball{Support(Ball{{-0.4, 0.0}, 0.2}), 0.1, AmplitudeProfile::constant};
  c.truth = ball;
  if (name == "table1") {
  } else if (name == "table5") {
    c.skip_completion = true;
  } else if (name == "table2") {
    c.sweep_amplitudes = {-0.3, -0.25, -0.2, -0.15, -0.1, -0.05, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  } else if (name == "ellipse") {
    c.truth->support = Ellipse{{-0.4, 0.0}, 0.15, 0.25};
    c.inversion.stages = {"ball", "ellipse"};
  } else if (name == "two_ball") {
    // Thin V: the first ball reaches r = 0.81 and completion loses accuracy with distance from Gamma.
    c.geometry.v_inner_radius = 0.92;
    c.geometry.gamma_int_radius = 0.96;
    c.truth->support = UnionSupport{{Support(Ball{{-0.55, -0.45}, 0.1}), Support(Ball{{0.4, 0.6}, 0.07})}};
    c.inversion.stages = {"multi"};
    c.inversion.peak_threshold = 0.2;
  } else if (name == "star") {
    c.truth->support = FourierStar{{-0.4, 0.0}, 0.18, {0.0, 0.0, 0.05}, {}};
    c.skip_completion = true;
    c.inversion.stages = {"ball", "fourier"};
  } else if (name == "bump") {
    c.truth->amplitude = 0.2;
    c.truth->profile = AmplitudeProfile::bump;
  } else if (name == "noisy") {
    c.noise.eta = 0.02;
  } else {
    throw ValidationError("unknown preset '" + name + "'");
  }
  c.validate();
  return c;
}

void apply_paper_scale(ExperimentConfig& cfg) {
  cfg.meshes.h_data = 0.0138;
  cfg.meshes.h_v = 0.02;
  cfg.meshes.h_inverse = 0.0409;
}

}  // namespace qrinv
