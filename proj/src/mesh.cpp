#include "qrinv/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <ostream>
#include <unordered_map>

#include "qrinv/error.hpp"

namespace qrinv {

namespace {

struct Ring {
  double radius = 0.0;
  std::vector<Index> nodes;  // counterclockwise, first node at angle 0
};

// Spacing between rings relative to h: equilateral-ish elements.
constexpr double kRadialFactor = 0.8660254037844386;

int ring_node_count(double r, double h) {
  return std::max(6, static_cast<int>(std::ceil(2.0 * M_PI * r / h - 1e-9)));
}

std::vector<double> ring_radii(std::vector<double> required, double h) {
  std::sort(required.begin(), required.end());
  required.erase(std::unique(required.begin(), required.end()), required.end());
  std::vector<double> radii{required.front()};
  for (std::size_t s = 0; s + 1 < required.size(); ++s) {
    const double a = required[s];
    const double b = required[s + 1];
    const int layers = std::max(1, static_cast<int>(std::ceil((b - a) / (kRadialFactor * h) - 1e-9)));
    for (int l = 1; l < layers; ++l) radii.push_back(a + (b - a) * l / layers);
    radii.push_back(b);
  }
  return radii;
}

class MeshBuilder {
 public:
  explicit MeshBuilder(double h) { mesh_.h = h; }

  Ring add_ring(double r) {
    Ring ring{r, {}};
    const int n = ring_node_count(r, mesh_.h);
    ring.nodes.reserve(n);
    for (int k = 0; k < n; ++k) {
      const double t = 2.0 * M_PI * k / n;
      ring.nodes.push_back(static_cast<Index>(mesh_.vertices.size()));
      mesh_.vertices.push_back({r * std::cos(t), r * std::sin(t)});
    }
    return ring;
  }

  Index add_vertex(Point p) {
    mesh_.vertices.push_back(p);
    return static_cast<Index>(mesh_.vertices.size() - 1);
  }

  void add_triangle(Index a, Index b, Index c) {
    const Point pa = mesh_.vertices[a], pb = mesh_.vertices[b], pc = mesh_.vertices[c];
    if (cross(pb - pa, pc - pa) <= 0.0) std::swap(b, c);
    mesh_.triangles.push_back({a, b, c});
  }

  void fan(Index center, const Ring& ring) {
    const std::size_t n = ring.nodes.size();
    for (std::size_t k = 0; k < n; ++k) add_triangle(center, ring.nodes[k], ring.nodes[(k + 1) % n]);
  }

  // Merges two concentric rings by walking both in angle order.
  void strip(const Ring& inner, const Ring& outer) {
    const std::size_t ni = inner.nodes.size(), no = outer.nodes.size();
    std::size_t p = 0, q = 0;
    while (p < ni || q < no) {
      const double next_inner = 2.0 * M_PI * static_cast<double>(p + 1) / static_cast<double>(ni);
      const double next_outer = 2.0 * M_PI * static_cast<double>(q + 1) / static_cast<double>(no);
      const bool advance_inner = q == no || (p < ni && next_inner <= next_outer);
      if (advance_inner) {
        add_triangle(inner.nodes[p % ni], outer.nodes[q % no], inner.nodes[(p + 1) % ni]);
        ++p;
      } else {
        add_triangle(inner.nodes[p % ni], outer.nodes[q % no], outer.nodes[(q + 1) % no]);
        ++q;
      }
    }
  }

  void build_edges() {
    std::unordered_map<std::uint64_t, Index> lookup;
    lookup.reserve(mesh_.triangles.size() * 2);
    mesh_.triangle_edges.resize(mesh_.triangles.size());
    mesh_.triangle_edge_signs.resize(mesh_.triangles.size());
    for (std::size_t t = 0; t < mesh_.triangles.size(); ++t) {
      const auto& tri = mesh_.triangles[t];
      for (int k = 0; k < 3; ++k) {
        const Index a = tri[k], b = tri[(k + 1) % 3];
        const Index lo = std::min(a, b), hi = std::max(a, b);
        const std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint32_t>(hi);
        auto [it, inserted] = lookup.try_emplace(key, static_cast<Index>(mesh_.edges.size()));
        if (inserted) mesh_.edges.push_back({lo, hi});
        mesh_.triangle_edges[t][k] = it->second;
        mesh_.triangle_edge_signs[t][k] = a < b ? 1 : -1;
      }
    }
    lookup_ = std::move(lookup);
  }

  void tag_ring(const std::string& tag, const Ring& ring) {
    std::vector<CurveEdge> curve;
    const std::size_t n = ring.nodes.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Index a = ring.nodes[k], b = ring.nodes[(k + 1) % n];
      const std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) |
                                static_cast<std::uint32_t>(std::max(a, b));
      const Point d = mesh_.vertices[b] - mesh_.vertices[a];
      const double len = norm(d);
      curve.push_back({lookup_.at(key), {d.y / len, -d.x / len}, len});
    }
    mesh_.curves[tag] = std::move(curve);
  }

  Mesh2D take() { return std::move(mesh_); }

 private:
  Mesh2D mesh_;
  std::unordered_map<std::uint64_t, Index> lookup_;
};

void check_embedded(const std::vector<double>& embedded, double lo, double hi) {
  for (double r : embedded) {
    if (!(r > lo && r < hi)) {
      throw InvalidGeometry("embedded radius " + std::to_string(r) + " outside (" + std::to_string(lo) + ", " +
                            std::to_string(hi) + ")");
    }
  }
}

void fnv_bytes(std::uint64_t& hash, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ULL;
  }
}

}  // namespace

const std::vector<CurveEdge>& Mesh2D::curve(const std::string& tag) const {
  auto it = curves.find(tag);
  if (it == curves.end()) throw UnknownTag(tag);
  return it->second;
}

Point Mesh2D::edge_midpoint(Index e) const {
  return 0.5 * (vertices[edges[e][0]] + vertices[edges[e][1]]);
}

double Mesh2D::edge_length(Index e) const { return norm(vertices[edges[e][1]] - vertices[edges[e][0]]); }

double Mesh2D::signed_area(Index t) const {
  const auto& tri = triangles[t];
  return 0.5 * cross(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
}

Point Mesh2D::centroid(Index t) const {
  const auto& tri = triangles[t];
  return (1.0 / 3.0) * (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]);
}

double Mesh2D::diameter(Index t) const {
  const auto& tri = triangles[t];
  return std::max({norm(vertices[tri[1]] - vertices[tri[0]]), norm(vertices[tri[2]] - vertices[tri[1]]),
                   norm(vertices[tri[0]] - vertices[tri[2]])});
}

std::uint64_t Mesh2D::checksum() const {
  std::uint64_t hash = 1469598103934665603ULL;
  for (const auto& v : vertices) {
    fnv_bytes(hash, &v.x, sizeof(double));
    fnv_bytes(hash, &v.y, sizeof(double));
  }
  for (const auto& t : triangles) fnv_bytes(hash, t.data(), sizeof(Index) * 3);
  return hash;
}

std::string radius_tag(double r) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), r);
  return "r=" + std::string(buf, res.ptr);
}

Mesh2D mesh_disk(double radius, double h, const std::vector<double>& embedded_radii) {
  if (!(radius > 0.0)) throw InvalidGeometry("disk radius must be positive");
  if (!(h > 0.0 && h < radius)) throw InvalidGeometry("element size must lie in (0, radius)");
  check_embedded(embedded_radii, 0.0, radius);

  std::vector<double> required = embedded_radii;
  required.push_back(0.0);
  required.push_back(radius);
  const std::vector<double> radii = ring_radii(required, h);

  MeshBuilder builder(h);
  const Index center = builder.add_vertex({0.0, 0.0});
  std::vector<Ring> rings;
  for (std::size_t i = 1; i < radii.size(); ++i) rings.push_back(builder.add_ring(radii[i]));
  builder.fan(center, rings.front());
  for (std::size_t i = 0; i + 1 < rings.size(); ++i) builder.strip(rings[i], rings[i + 1]);
  builder.build_edges();
  for (const auto& ring : rings) {
    if (std::find(embedded_radii.begin(), embedded_radii.end(), ring.radius) != embedded_radii.end()) {
      builder.tag_ring(radius_tag(ring.radius), ring);
    }
  }
  builder.tag_ring("Gamma", rings.back());
  return builder.take();
}

Mesh2D mesh_annulus(double r_in, double r_out, double h, const std::vector<double>& embedded_radii) {
  if (!(r_in > 0.0 && r_in < r_out)) throw InvalidGeometry("annulus requires 0 < r_in < r_out");
  if (!(h > 0.0 && h < r_out - r_in)) throw InvalidGeometry("element size must lie in (0, r_out - r_in)");
  check_embedded(embedded_radii, r_in, r_out);

  std::vector<double> required = embedded_radii;
  required.push_back(r_in);
  required.push_back(r_out);
  const std::vector<double> radii = ring_radii(required, h);

  MeshBuilder builder(h);
  std::vector<Ring> rings;
  for (double r : radii) rings.push_back(builder.add_ring(r));
  for (std::size_t i = 0; i + 1 < rings.size(); ++i) builder.strip(rings[i], rings[i + 1]);
  builder.build_edges();
  for (const auto& ring : rings) {
    if (std::find(embedded_radii.begin(), embedded_radii.end(), ring.radius) != embedded_radii.end()) {
      builder.tag_ring(radius_tag(ring.radius), ring);
    }
  }
  builder.tag_ring("Gamma_inner", rings.front());
  builder.tag_ring("Gamma_outer", rings.back());
  return builder.take();
}

Mesh2D tag_patches(Mesh2D mesh, const std::string& boundary_tag, const PatchSpec& spec) {
  if (spec.count < 1 || !(spec.angular_half_width > 0.0)) {
    throw InvalidGeometry("patch spec needs count >= 1 and a positive half width");
  }
  if (spec.count * 2.0 * spec.angular_half_width >= 2.0 * M_PI) {
    throw InvalidGeometry("patches overlap: count * 2 * half_width must stay below 2*pi");
  }
  const auto& boundary = mesh.curve(boundary_tag);
  std::vector<CurveEdge> inside, outside;
  for (const auto& ce : boundary) {
    const double t = angle_of(mesh.edge_midpoint(ce.edge));
    bool hit = false;
    for (int p = 0; p < spec.count && !hit; ++p) {
      const double center = spec.phase + 2.0 * M_PI * p / spec.count;
      hit = angular_distance(t, center) <= spec.angular_half_width;
    }
    (hit ? inside : outside).push_back(ce);
  }
  mesh.curves["Gamma0"] = std::move(inside);
  mesh.curves["Gamma1"] = std::move(outside);
  return mesh;
}

void write_mesh(std::ostream& out, const Mesh2D& mesh) {
  out.precision(17);
  out << "VERTICES " << mesh.vertices.size() << '\n';
  for (const auto& v : mesh.vertices) out << v.x << ' ' << v.y << '\n';
  out << "TRIANGLES " << mesh.triangles.size() << '\n';
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "EDGES " << mesh.edges.size() << '\n';
  for (const auto& e : mesh.edges) out << e[0] << ' ' << e[1] << '\n';
  out << "TAGS " << mesh.curves.size() << '\n';
  for (const auto& [tag, curve] : mesh.curves) {
    out << tag << ' ' << curve.size() << '\n';
    for (std::size_t i = 0; i < curve.size(); ++i) out << curve[i].edge << (i + 1 == curve.size() ? '\n' : ' ');
    if (curve.empty()) out << '\n';
  }
}

double mesh_area(const Mesh2D& mesh) {
  double area = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) area += mesh.signed_area(static_cast<Index>(t));
  return area;
}

double curve_length(const Mesh2D& mesh, const std::string& tag) {
  double len = 0.0;
  for (const auto& ce : mesh.curve(tag)) len += ce.length;
  return len;
}

}  // namespace qrinv
