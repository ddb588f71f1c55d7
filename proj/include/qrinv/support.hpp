#pragma once

#include <string>
#include <variant>
#include <vector>

#include "qrinv/geometry.hpp"
#include "qrinv/mesh.hpp"

namespace qrinv {

struct Ball {
  Point center;
  double radius = 0.0;
};

/// Axis-aligned ellipse.
struct Ellipse {
  Point center;
  double rx = 0.0;
  double ry = 0.0;
};

/// Star-shaped region |x - center| < r0 + sum_n (a_n cos n t + b_n sin n t).
struct FourierStar {
  Point center;
  double r0 = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  double radius_at(double theta) const;
};

class Support;

struct UnionSupport {
  std::vector<Support> parts;
};

class Support {
 public:
  using Shape = std::variant<Ball, Ellipse, FourierStar, UnionSupport>;

  Support() = default;
  Support(Ball b) : shape_(std::move(b)) {}
  Support(Ellipse e) : shape_(std::move(e)) {}
  Support(FourierStar s) : shape_(std::move(s)) {}
  Support(UnionSupport u) : shape_(std::move(u)) {}

  const Shape& shape() const { return shape_; }

  bool contains(Point p) const;
  /// Radii positive; star radius positive on a 720-point angular grid.
  /// With allow_pinched, a star only needs r0 > 0: directions where the
  /// radius function is negative are simply empty.
  bool well_formed(bool allow_pinched = false) const;
  /// Counterclockwise boundary polygons, one per connected part. Star radii are clamped at 0.
  std::vector<std::vector<Point>> boundary(int samples = 360) const;
  /// Largest |x| over the boundary.
  double max_radius() const;
  /// Flat list of non-union parts.
  std::vector<Support> components() const;
  std::string describe() const;

 private:
  Shape shape_;
};

/// Fraction of each triangle covered by the support (exact polygon clipping
/// against the polygonized boundary; union parts are summed and clamped to 1).
std::vector<double> coverage(const Mesh2D& mesh, const Support& support);

/// Symmetric Hausdorff distance between two point clouds.
double hausdorff_distance(const std::vector<Point>& a, const std::vector<Point>& b);

/// Area of a simple polygon (positive when counterclockwise).
double polygon_area(const std::vector<Point>& poly);

}  // namespace qrinv
