#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qrinv/geometry.hpp"

namespace qrinv {

using Index = std::int32_t;

/// One tagged edge of a curve. `normal` points away from the origin of the
/// circle the curve discretizes; the positive tangent is perp(normal), i.e.
/// counterclockwise.
struct CurveEdge {
  Index edge = 0;
  Point normal;
  double length = 0.0;
};

/// Conforming triangulation with globally oriented edges (low -> high vertex).
///
/// Local edge k of a triangle joins local vertices k and (k+1)%3; its sign is
/// +1 when that local direction agrees with the global orientation.
struct Mesh2D {
  std::vector<Point> vertices;
  std::vector<std::array<Index, 3>> triangles;
  std::vector<std::array<Index, 2>> edges;
  std::vector<std::array<Index, 3>> triangle_edges;
  std::vector<std::array<int, 3>> triangle_edge_signs;
  /// Tag name -> edges ordered by midpoint angle in [0, 2*pi).
  std::map<std::string, std::vector<CurveEdge>> curves;
  /// Target element size the mesh was generated with.
  double h = 0.0;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t edge_count() const { return edges.size(); }
  std::size_t triangle_count() const { return triangles.size(); }

  bool has_curve(const std::string& tag) const { return curves.count(tag) != 0; }
  /// Throws UnknownTag.
  const std::vector<CurveEdge>& curve(const std::string& tag) const;

  Point edge_midpoint(Index e) const;
  double edge_length(Index e) const;
  double signed_area(Index t) const;
  Point centroid(Index t) const;
  double diameter(Index t) const;

  /// FNV-1a over coordinates and connectivity.
  std::uint64_t checksum() const;
};

struct PatchSpec {
  int count = 32;
  double angular_half_width = 0.075;
  double phase = 0.0;
};

/// Tag used for an embedded circle of radius r, e.g. "r=0.8".
std::string radius_tag(double r);

/// Polar-structured triangulation of the disk of the given radius. Each
/// embedded radius becomes a closed polyline tagged radius_tag(r); the
/// boundary is tagged "Gamma".
Mesh2D mesh_disk(double radius, double h, const std::vector<double>& embedded_radii);

/// Same for the annulus r_in < |x| < r_out; boundaries "Gamma_outer" and
/// "Gamma_inner".
Mesh2D mesh_annulus(double r_in, double r_out, double h, const std::vector<double>& embedded_radii);

/// Splits a full-circle boundary tag into "Gamma0" (edges whose midpoint angle
/// is within the half width of a patch center) and "Gamma1" (the rest).
Mesh2D tag_patches(Mesh2D mesh, const std::string& boundary_tag, const PatchSpec& spec);

/// Plain-text dump with VERTICES / TRIANGLES / EDGES / TAGS sections.
void write_mesh(std::ostream& out, const Mesh2D& mesh);

double mesh_area(const Mesh2D& mesh);
double curve_length(const Mesh2D& mesh, const std::string& tag);

}  // namespace qrinv
