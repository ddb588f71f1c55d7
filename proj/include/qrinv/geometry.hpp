#pragma once

#include <cmath>

namespace qrinv {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
/// Scalar 2D cross product a.x*b.y - a.y*b.x.
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double angle_of(Point a) { return std::atan2(a.y, a.x); }

/// Rotation by +90 degrees.
inline Point perp(Point a) { return {-a.y, a.x}; }

inline Point normalized(Point a) {
  const double n = norm(a);
  return {a.x / n, a.y / n};
}

/// Maps an angle to [0, 2*pi).
inline double wrap_angle(double t) {
  constexpr double two_pi = 2.0 * M_PI;
  t = std::fmod(t, two_pi);
  if (t < 0.0) t += two_pi;
  if (t >= two_pi) t = 0.0;
  return t;
}

/// Unsigned angular distance in [0, pi].
inline double angular_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return d > M_PI ? 2.0 * M_PI - d : d;
}

}  // namespace qrinv
