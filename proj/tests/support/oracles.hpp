#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's assembly or quadrature code.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "qrinv/fem.hpp"

namespace oracle {

using qrinv::Complex;
using qrinv::ComplexPoint;
using qrinv::Point;

struct QuadPoint {
  std::array<double, 3> bary;
  double weight;  // fraction of the triangle area
};

/// 7-point Dunavant rule, exact for degree 5.
inline const std::vector<QuadPoint>& dunavant5() {
  static const std::vector<QuadPoint> rule = [] {
    const double a1 = 0.059715871789770, b1 = 0.470142064105115;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456;
    const double w0 = 0.225, w1 = 0.132394152788506, w2 = 0.125939180544827;
    return std::vector<QuadPoint>{{{1.0 / 3, 1.0 / 3, 1.0 / 3}, w0}, {{a1, b1, b1}, w1}, {{b1, a1, b1}, w1},
                                  {{b1, b1, a1}, w1},                 {{a2, b2, b2}, w2}, {{b2, a2, b2}, w2},
                                  {{b2, b2, a2}, w2}};
  }();
  return rule;
}

/// Barycentric gradients of a triangle, from the vertex coordinates.
inline std::array<Point, 3> bary_gradients(const std::array<Point, 3>& v, double& area) {
  const double det = (v[1].x - v[0].x) * (v[2].y - v[0].y) - (v[2].x - v[0].x) * (v[1].y - v[0].y);
  area = 0.5 * det;
  std::array<Point, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Point& p = v[(i + 1) % 3];
    const Point& q = v[(i + 2) % 3];
    g[i] = {(p.y - q.y) / det, (q.x - p.x) / det};
  }
  return g;
}

/// Whitney field of an edge coefficient vector, evaluated from scratch:
/// w_ij = l_i grad l_j - l_j grad l_i for the global edge (i < j).
inline ComplexPoint whitney_value(const qrinv::Mesh2D& mesh, const qrinv::ComplexVector& c, int t,
                                  const std::array<double, 3>& l) {
  const auto& tri = mesh.triangles[t];
  std::array<Point, 3> v{mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
  double area = 0.0;
  const auto g = bary_gradients(v, area);
  ComplexPoint out{0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    int i = k, j = (k + 1) % 3;
    if (tri[i] > tri[j]) std::swap(i, j);
    const Complex coeff = c[mesh.triangle_edges[t][k]];
    const Point w{l[i] * g[j].x - l[j] * g[i].x, l[i] * g[j].y - l[j] * g[i].y};
    out.x += coeff * w.x;
    out.y += coeff * w.y;
  }
  return out;
}

inline Complex whitney_curl(const qrinv::Mesh2D& mesh, const qrinv::ComplexVector& c, int t) {
  const auto& tri = mesh.triangles[t];
  std::array<Point, 3> v{mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
  double area = 0.0;
  const auto g = bary_gradients(v, area);
  Complex out = 0.0;
  for (int k = 0; k < 3; ++k) {
    int i = k, j = (k + 1) % 3;
    if (tri[i] > tri[j]) std::swap(i, j);
    out += c[mesh.triangle_edges[t][k]] * 2.0 * qrinv::cross(g[i], g[j]);
  }
  return out;
}

struct HCurlError {
  double error = 0.0;
  double reference = 0.0;
  double relative() const { return error / reference; }
};

/// ||E_h - E||^2 + ||curl E_h - curl E||^2 with the degree-5 rule per triangle.
inline HCurlError hcurl_error(const qrinv::Mesh2D& mesh, const qrinv::ComplexVector& c,
                              const std::function<ComplexPoint(Point)>& e, const std::function<Complex(Point)>& curl_e) {
  double err = 0.0, ref = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.triangle_count()); ++t) {
    const auto& tri = mesh.triangles[t];
    std::array<Point, 3> v{mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
    double area = 0.0;
    bary_gradients(v, area);
    const Complex ch = whitney_curl(mesh, c, t);
    for (const auto& q : dunavant5()) {
      const Point x{q.bary[0] * v[0].x + q.bary[1] * v[1].x + q.bary[2] * v[2].x,
                    q.bary[0] * v[0].y + q.bary[1] * v[1].y + q.bary[2] * v[2].y};
      const ComplexPoint eh = whitney_value(mesh, c, t, q.bary);
      const ComplexPoint ex = e(x);
      const Complex cx = curl_e(x);
      const double w = q.weight * area;
      err += w * (std::norm(eh.x - ex.x) + std::norm(eh.y - ex.y) + std::norm(ch - cx));
      ref += w * (std::norm(ex.x) + std::norm(ex.y) + std::norm(cx));
    }
  }
  return {std::sqrt(err), std::sqrt(ref)};
}

/// Composite Gauss-Legendre (5 points per panel) integral over [a, b].
inline double gauss_integral(const std::function<double(double)>& f, double a, double b, int panels = 64) {
  static const double xs[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
  static const double ws[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                               0.2369268850561891};
  const double h = (b - a) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double m = a + (p + 0.5) * h;
    for (int i = 0; i < 5; ++i) acc += 0.5 * h * ws[i] * f(m + 0.5 * h * xs[i]);
  }
  return acc;
}

/// Dense copy of a sparse complex matrix.
inline Eigen::MatrixXcd dense(const qrinv::SparseComplexMatrix& m) { return Eigen::MatrixXcd(m); }

/// Smallest eigenvalue of a Hermitian matrix.
inline double min_hermitian_eigenvalue(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// log2(e_coarse / e_fine) scaled by the step ratio.
inline double rate(double e_coarse, double e_fine, double ratio = 2.0) {
  return std::log(e_coarse / e_fine) / std::log(ratio);
}

/// Symmetric Hausdorff distance by brute force.
inline double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
  auto one_way = [](const std::vector<Point>& p, const std::vector<Point>& q) {
    double worst = 0.0;
    for (const auto& x : p) {
      double best = INFINITY;
      for (const auto& y : q) best = std::min(best, std::hypot(x.x - y.x, x.y - y.y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

}  // namespace oracle
