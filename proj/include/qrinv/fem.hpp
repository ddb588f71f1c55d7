#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qrinv/mesh.hpp"
#include "qrinv/sparse.hpp"

namespace qrinv {

/// Complex 2-vector (a field value).
struct ComplexPoint {
  Complex x;
  Complex y;
};

using Barycentric = std::array<double, 3>;

struct TriangleGeometry {
  double area = 0.0;
  std::array<Point, 3> grad;  // gradients of the barycentric coordinates
};

/// Lowest-order Whitney edge elements. The basis function of edge (i, j),
/// i < j, is l_i grad l_j - l_j grad l_i; its tangential integral along
/// i -> j is one.
class EdgeSpace {
 public:
  explicit EdgeSpace(std::shared_ptr<const Mesh2D> mesh);

  const Mesh2D& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh2D>& mesh_ptr() const { return mesh_; }
  Eigen::Index dof_count() const { return static_cast<Eigen::Index>(mesh_->edge_count()); }
  const TriangleGeometry& geometry(Index t) const { return geometry_[t]; }

  /// Local vertices (low, high) of local edge k in global orientation.
  std::array<int, 2> oriented_local(Index t, int k) const;
  Point basis_value(Index t, int k, const Barycentric& l) const;
  /// Constant scalar curl of the basis function on triangle t.
  double basis_curl(Index t, int k) const;
  /// Integral of the basis function over triangle t.
  Point basis_integral(Index t, int k) const;

  ComplexPoint evaluate(const ComplexVector& coeffs, Index t, const Barycentric& l) const;
  Complex evaluate_curl(const ComplexVector& coeffs, Index t) const;

 private:
  std::shared_ptr<const Mesh2D> mesh_;
  std::vector<TriangleGeometry> geometry_;
};

/// Continuous P1 (hat function) space.
class NodalSpace {
 public:
  explicit NodalSpace(std::shared_ptr<const Mesh2D> mesh);

  const Mesh2D& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh2D>& mesh_ptr() const { return mesh_; }
  Eigen::Index dof_count() const { return static_cast<Eigen::Index>(mesh_->vertex_count()); }
  const TriangleGeometry& geometry(Index t) const { return geometry_[t]; }

  Complex evaluate(const ComplexVector& coeffs, Index t, const Barycentric& l) const;

 private:
  std::shared_ptr<const Mesh2D> mesh_;
  std::vector<TriangleGeometry> geometry_;
};

/// Piecewise-constant refractive index, one value per triangle.
struct CoefficientField {
  std::vector<Complex> values;

  static CoefficientField uniform(const Mesh2D& mesh, Complex kappa);
  /// Re > 0 and Im > 0 on every triangle.
  bool admissible() const;
};

/// +1 when the global edge orientation agrees with the counterclockwise
/// tangent perp(normal) of the curve edge, -1 otherwise.
int curve_edge_sign(const Mesh2D& mesh, const CurveEdge& ce);

/// S_ij = int curl w_i curl w_j.
SparseComplexMatrix assemble_curlcurl(const EdgeSpace& space);

/// M_ij = int kappa w_i . w_j; throws InvalidCoefficient for non-admissible kappa.
SparseComplexMatrix assemble_mass(const EdgeSpace& space, const CoefficientField& kappa);

/// Mass matrix with arbitrary per-triangle weights (no admissibility check).
SparseComplexMatrix assemble_weighted_mass(const EdgeSpace& space, std::span<const Complex> weights);

/// Per-triangle weight restricted to a subset of triangles.
struct TriangleWeight {
  Index triangle = 0;
  Complex weight;
};

/// y = M_w x without assembling M_w.
ComplexVector apply_weighted_mass(const EdgeSpace& space, std::span<const TriangleWeight> weights,
                                  const ComplexVector& x);

/// B_ij = int_tag (w_i . tau)(w_j . tau); diagonal for lowest-order elements.
SparseComplexMatrix assemble_boundary_mass(const EdgeSpace& space, const std::string& tag);

/// b_i = int_tag g (w_i . tau) with midpoint quadrature.
ComplexVector assemble_boundary_load(const EdgeSpace& space, const std::string& tag,
                                     const std::function<Complex(Point)>& g);
/// Same with g given as one sample per tagged edge (in curve order).
ComplexVector assemble_boundary_load(const EdgeSpace& space, const std::string& tag,
                                     std::span<const Complex> samples);

/// C_ij = int (curl l_j) . w_i with curl F = (d2 F, -d1 F); edges x nodes.
SparseComplexMatrix assemble_mixed_curl(const NodalSpace& nodal, const EdgeSpace& edge);

/// D_ij = int (curl w_i) l_j; edges x nodes.
SparseComplexMatrix assemble_curl_nodal(const EdgeSpace& edge, const NodalSpace& nodal);

SparseComplexMatrix assemble_nodal_stiffness(const NodalSpace& nodal);
SparseComplexMatrix assemble_nodal_mass(const NodalSpace& nodal);
/// P1 mass on the tagged curve.
SparseComplexMatrix assemble_nodal_boundary_mass(const NodalSpace& nodal, const std::string& tag);
/// b_j = int_tag g l_j with g piecewise constant per tagged edge.
ComplexVector assemble_nodal_boundary_load(const NodalSpace& nodal, const std::string& tag,
                                           std::span<const Complex> samples);

/// Node -> edge incidence: G[e, high] = 1, G[e, low] = -1.
SparseComplexMatrix discrete_gradient(const Mesh2D& mesh);

/// Whitney interpolant: dof_e = int_e u . t (3-point Gauss).
ComplexVector interpolate_edge(const EdgeSpace& space, const std::function<ComplexPoint(Point)>& u);

}  // namespace qrinv
