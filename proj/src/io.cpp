#include "qrinv/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qrinv/error.hpp"

namespace qrinv {

namespace {

constexpr const char* kMagic = "# qrinv-traces v1";

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("malformed number '" + s + "'");
  }
  if (used != s.size()) throw ValidationError("malformed number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
  return s;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> v;
  for (const auto& tok : split(s)) v.push_back(parse_double(tok));
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::uint64_t parse_hex(const std::string& s) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used, 16);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("malformed checksum '" + s + "'");
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

const std::string& TraceFile::get(const std::string& key) const {
  for (const auto& [k, v] : header) {
    if (k == key) return v;
  }
  throw ValidationError("trace file lacks header key '" + key + "'");
}

const TraceData& TraceFile::block(const std::string& name) const {
  for (const auto& [n, b] : blocks) {
    if (n == name) return b;
  }
  throw ValidationError("trace file lacks block '" + name + "'");
}

void TraceFile::set(const std::string& key, std::string value) {
  for (auto& [k, v] : header) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  header.emplace_back(key, std::move(value));
}

void write_trace_file(std::ostream& out, const TraceFile& file) {
  out << kMagic << '\n' << "kind " << file.kind << '\n';
  for (const auto& [k, v] : file.header) out << k << ' ' << v << '\n';
  for (const auto& [name, t] : file.blocks) {
    out << "block " << name << " curve " << t.curve << " samples " << t.samples.size() << " waves " << t.waves.size()
        << '\n';
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
      out << format_double(t.samples.midpoints[i].x) << ' ' << format_double(t.samples.midpoints[i].y) << ' '
          << format_double(t.samples.lengths[i]);
      for (const auto& w : t.waves) {
        const Complex z = w[static_cast<Eigen::Index>(i)];
        out << ' ' << format_double(z.real()) << ' ' << format_double(z.imag());
      }
      out << '\n';
    }
    out << "end\n";
  }
}

TraceFile read_trace_file(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw ValidationError("not a qrinv trace file");
  TraceFile file;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto space = line.find(' ');
    const std::string key = line.substr(0, space);
    const std::string value = space == std::string::npos ? "" : line.substr(space + 1);
    if (key == "kind") {
      file.kind = value;
    } else if (key == "block") {
      const auto tok = split(value);
      if (tok.size() != 7 || tok[1] != "curve" || tok[3] != "samples" || tok[5] != "waves") {
        throw ValidationError("malformed block header '" + line + "'");
      }
      TraceData t;
      t.curve = tok[2];
      const std::size_t n = std::stoul(tok[4]), m = std::stoul(tok[6]);
      t.waves.assign(m, ComplexVector(static_cast<Eigen::Index>(n)));
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw ValidationError("truncated block '" + tok[0] + "'");
        const auto v = parse_doubles(line);
        if (v.size() != 3 + 2 * m) throw ValidationError("wrong column count in block '" + tok[0] + "'");
        t.samples.midpoints.push_back({v[0], v[1]});
        t.samples.lengths.push_back(v[2]);
        for (std::size_t w = 0; w < m; ++w) t.waves[w][static_cast<Eigen::Index>(i)] = Complex(v[3 + 2 * w], v[4 + 2 * w]);
      }
      if (!std::getline(in, line) || line != "end") throw ValidationError("block '" + tok[0] + "' not terminated");
      file.blocks.emplace_back(tok[0], std::move(t));
    } else {
      file.header.emplace_back(key, value);
    }
  }
  return file;
}

void save_trace_file(const std::filesystem::path& path, const TraceFile& file) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_trace_file(out, file);
}

TraceFile load_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  return read_trace_file(in);
}

TraceFile dataset_to_file(const Dataset& ds, std::uint64_t config_checksum) {
  TraceFile f;
  f.kind = "dataset";
  f.set("config_checksum", format_hex(config_checksum));
  f.set("mesh_checksum", format_hex(ds.mesh_checksum));
  f.set("mesh_h", format_double(ds.mesh_h));
  f.set("seed", std::to_string(ds.seed));
  f.set("noise", format_double(ds.noise));
  f.set("wave_angles", join_doubles(ds.wave_angles));
  f.blocks = {{"measured", ds.measured}, {"background", ds.background}, {"exact_delta", ds.exact_interior_delta}};
  return f;
}

Dataset dataset_from_file(const TraceFile& file) {
  if (file.kind != "dataset") throw ValidationError("expected a dataset file, got '" + file.kind + "'");
  Dataset ds;
  ds.mesh_checksum = parse_hex(file.get("mesh_checksum"));
  ds.mesh_h = parse_double(file.get("mesh_h"));
  ds.seed = std::stoull(file.get("seed"));
  ds.noise = parse_double(file.get("noise"));
  ds.wave_angles = parse_doubles(file.get("wave_angles"));
  ds.measured = file.block("measured");
  ds.background = file.block("background");
  ds.exact_interior_delta = file.block("exact_delta");
  return ds;
}

}  // namespace qrinv
