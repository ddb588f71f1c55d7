#include "qrinv/fem.hpp"

#include <cmath>

#include "qrinv/error.hpp"

namespace qrinv {

namespace {

using Triplet = Eigen::Triplet<Complex>;

std::vector<TriangleGeometry> triangle_geometry(const Mesh2D& mesh) {
  std::vector<TriangleGeometry> geo(mesh.triangle_count());
  for (std::size_t t = 0; t < geo.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point p[3] = {mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
    const double area = mesh.signed_area(static_cast<Index>(t));
    geo[t].area = area;
    for (int i = 0; i < 3; ++i) {
      const Point a = p[(i + 1) % 3], b = p[(i + 2) % 3];
      geo[t].grad[i] = {(a.y - b.y) / (2.0 * area), (b.x - a.x) / (2.0 * area)};
    }
  }
  return geo;
}

// int_T l_p l_q
double lambda_product(double area, int p, int q) { return area * (p == q ? 2.0 : 1.0) / 12.0; }

SparseComplexMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const std::vector<Triplet>& trips) {
  SparseComplexMatrix m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

// Local Whitney mass between local edges k and l with unit weight.
double local_edge_mass(const EdgeSpace& space, Index t, int k, int l) {
  const auto& g = space.geometry(t);
  const auto [a, b] = space.oriented_local(t, k);
  const auto [c, d] = space.oriented_local(t, l);
  const double area = g.area;
  return lambda_product(area, a, c) * dot(g.grad[b], g.grad[d]) -
         lambda_product(area, a, d) * dot(g.grad[b], g.grad[c]) -
         lambda_product(area, b, c) * dot(g.grad[a], g.grad[d]) +
         lambda_product(area, b, d) * dot(g.grad[a], g.grad[c]);
}

}  // namespace

EdgeSpace::EdgeSpace(std::shared_ptr<const Mesh2D> mesh)
    : mesh_(std::move(mesh)), geometry_(triangle_geometry(*mesh_)) {}

std::array<int, 2> EdgeSpace::oriented_local(Index t, int k) const {
  const int p = k, q = (k + 1) % 3;
  return mesh_->triangle_edge_signs[t][k] > 0 ? std::array<int, 2>{p, q} : std::array<int, 2>{q, p};
}

Point EdgeSpace::basis_value(Index t, int k, const Barycentric& l) const {
  const auto [a, b] = oriented_local(t, k);
  const auto& g = geometry_[t].grad;
  return l[a] * g[b] - l[b] * g[a];
}

double EdgeSpace::basis_curl(Index t, int k) const {
  const auto [a, b] = oriented_local(t, k);
  const auto& g = geometry_[t];
  // 2 grad l_a x grad l_b = +-1/area exactly; only the sign is taken from the gradients.
  return std::copysign(1.0 / g.area, cross(g.grad[a], g.grad[b]));
}

Point EdgeSpace::basis_integral(Index t, int k) const {
  const auto [a, b] = oriented_local(t, k);
  const auto& g = geometry_[t];
  return (g.area / 3.0) * (g.grad[b] - g.grad[a]);
}

ComplexPoint EdgeSpace::evaluate(const ComplexVector& coeffs, Index t, const Barycentric& l) const {
  ComplexPoint v{0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    const Point w = basis_value(t, k, l);
    const Complex c = coeffs[mesh_->triangle_edges[t][k]];
    v.x += c * w.x;
    v.y += c * w.y;
  }
  return v;
}

Complex EdgeSpace::evaluate_curl(const ComplexVector& coeffs, Index t) const {
  Complex v = 0.0;
  for (int k = 0; k < 3; ++k) v += coeffs[mesh_->triangle_edges[t][k]] * basis_curl(t, k);
  return v;
}

NodalSpace::NodalSpace(std::shared_ptr<const Mesh2D> mesh)
    : mesh_(std::move(mesh)), geometry_(triangle_geometry(*mesh_)) {}

Complex NodalSpace::evaluate(const ComplexVector& coeffs, Index t, const Barycentric& l) const {
  const auto& tri = mesh_->triangles[t];
  return coeffs[tri[0]] * l[0] + coeffs[tri[1]] * l[1] + coeffs[tri[2]] * l[2];
}

CoefficientField CoefficientField::uniform(const Mesh2D& mesh, Complex kappa) {
  return {std::vector<Complex>(mesh.triangle_count(), kappa)};
}

bool CoefficientField::admissible() const {
  for (const auto& v : values) {
    if (!(v.real() > 0.0 && v.imag() > 0.0)) return false;
  }
  return true;
}

int curve_edge_sign(const Mesh2D& mesh, const CurveEdge& ce) {
  const auto& e = mesh.edges[ce.edge];
  const Point d = mesh.vertices[e[1]] - mesh.vertices[e[0]];
  return dot(d, perp(ce.normal)) >= 0.0 ? 1 : -1;
}

SparseComplexMatrix assemble_curlcurl(const EdgeSpace& space) {
  const Mesh2D& mesh = space.mesh();
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangle_count() * 9);
  for (Index t = 0; t < static_cast<Index>(mesh.triangle_count()); ++t) {
    // Entries are +-1/area, so each element matrix annihilates gradients without round-off.
    const double inv_area = 1.0 / space.geometry(t).area;
    for (int k = 0; k < 3; ++k) {
      for (int l = 0; l < 3; ++l) {
        const double v = std::copysign(inv_area, space.basis_curl(t, k) * space.basis_curl(t, l));
        trips.emplace_back(mesh.triangle_edges[t][k], mesh.triangle_edges[t][l], v);
      }
    }
  }
  return from_triplets(space.dof_count(), space.dof_count(), trips);
}

SparseComplexMatrix assemble_mass(const EdgeSpace& space, const CoefficientField& kappa) {
  if (kappa.values.size() != space.mesh().triangle_count()) {
    throw MeshMismatch("coefficient field does not match the mesh");
  }
  if (!kappa.admissible()) throw InvalidCoefficient("refractive index must have Re > 0 and Im > 0");
  return assemble_weighted_mass(space, kappa.values);
}

SparseComplexMatrix assemble_weighted_mass(const EdgeSpace& space, std::span<const Complex> weights) {
  const Mesh2D& mesh = space.mesh();
  if (weights.size() != mesh.triangle_count()) throw MeshMismatch("weights do not match the mesh");
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangle_count() * 9);
  for (Index t = 0; t < static_cast<Index>(mesh.triangle_count()); ++t) {
    const Complex w = weights[t];
    if (w == Complex(0.0)) continue;
    for (int k = 0; k < 3; ++k) {
      for (int l = k; l < 3; ++l) {
        const Complex v = w * local_edge_mass(space, t, k, l);
        const Index i = mesh.triangle_edges[t][k], j = mesh.triangle_edges[t][l];
        trips.emplace_back(i, j, v);
        if (k != l) trips.emplace_back(j, i, v);
      }
    }
  }
  return from_triplets(space.dof_count(), space.dof_count(), trips);
}

ComplexVector apply_weighted_mass(const EdgeSpace& space, std::span<const TriangleWeight> weights,
                                  const ComplexVector& x) {
  const Mesh2D& mesh = space.mesh();
  ComplexVector y = ComplexVector::Zero(space.dof_count());
  for (const auto& tw : weights) {
    const auto& edges = mesh.triangle_edges[tw.triangle];
    for (int k = 0; k < 3; ++k) {
      Complex acc = 0.0;
      for (int l = 0; l < 3; ++l) acc += local_edge_mass(space, tw.triangle, k, l) * x[edges[l]];
      y[edges[k]] += tw.weight * acc;
    }
  }
  return y;
}

SparseComplexMatrix assemble_boundary_mass(const EdgeSpace& space, const std::string& tag) {
  const Mesh2D& mesh = space.mesh();
  std::vector<Triplet> trips;
  for (const auto& ce : mesh.curve(tag)) trips.emplace_back(ce.edge, ce.edge, 1.0 / ce.length);
  return from_triplets(space.dof_count(), space.dof_count(), trips);
}

ComplexVector assemble_boundary_load(const EdgeSpace& space, const std::string& tag,
                                     const std::function<Complex(Point)>& g) {
  const Mesh2D& mesh = space.mesh();
  ComplexVector b = ComplexVector::Zero(space.dof_count());
  for (const auto& ce : mesh.curve(tag)) {
    b[ce.edge] += static_cast<double>(curve_edge_sign(mesh, ce)) * g(mesh.edge_midpoint(ce.edge));
  }
  return b;
}

ComplexVector assemble_boundary_load(const EdgeSpace& space, const std::string& tag,
                                     std::span<const Complex> samples) {
  const Mesh2D& mesh = space.mesh();
  const auto& curve = mesh.curve(tag);
  if (samples.size() != curve.size()) throw InvalidArgument("boundary load: one sample per tagged edge expected");
  ComplexVector b = ComplexVector::Zero(space.dof_count());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    b[curve[i].edge] += static_cast<double>(curve_edge_sign(mesh, curve[i])) * samples[i];
  }
  return b;
}

SparseComplexMatrix assemble_mixed_curl(const NodalSpace& nodal, const EdgeSpace& edge) {
  if (nodal.mesh_ptr() != edge.mesh_ptr()) throw MeshMismatch("mixed curl: spaces live on different meshes");
  const Mesh2D& mesh = edge.mesh();
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangle_count() * 9);
  for (Index t = 0; t < static_cast<Index>(mesh.triangle_count()); ++t) {
    const auto& g = edge.geometry(t);
    for (int k = 0; k < 3; ++k) {
      const Point wint = edge.basis_integral(t, k);
      for (int j = 0; j < 3; ++j) {
        const Point curl_hat{g.grad[j].y, -g.grad[j].x};
        trips.emplace_back(mesh.triangle_edges[t][k], mesh.triangles[t][j], dot(curl_hat, wint));
      }
    }
  }
  return from_triplets(edge.dof_count(), nodal.dof_count(), trips);
}

SparseComplexMatrix assemble_curl_nodal(const EdgeSpace& edge, const NodalSpace& nodal) {
  if (nodal.mesh_ptr() != edge.mesh_ptr()) throw MeshMismatch("curl-nodal: spaces live on different meshes");
  const Mesh2D& mesh = edge.mesh();
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangle_count() * 9);
  for (Index t = 0; t < static_cast<Index>(mesh.triangle_count()); ++t) {
    const double area = edge.geometry(t).area;
    for (int k = 0; k < 3; ++k) {
      for (int j = 0; j < 3; ++j) {
        trips.emplace_back(mesh.triangle_edges[t][k], mesh.triangles[t][j], edge.basis_curl(t, k) * area / 3.0);
      }
    }
  }
  return from_triplets(edge.dof_count(), nodal.dof_count(), trips);
}

SparseComplexMatrix assemble_nodal_stiffness(const NodalSpace& nodal) {
  const Mesh2D& mesh = nodal.mesh();
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangle_count() * 9);
  for (Index t = 0; t < static_cast<Index>(mesh.triangle_count()); ++t) {
    const auto& g = nodal.geometry(t);
    for (int p = 0; p < 3; ++p) {
      for (int q = 0; q < 3; ++q) {
        trips.emplace_back(mesh.triangles[t][p], mesh.triangles[t][q], g.area * dot(g.grad[p], g.grad[q]));
      }
    }
  }
  return from_triplets(nodal.dof_count(), nodal.dof_count(), trips);
}

SparseComplexMatrix assemble_nodal_mass(const NodalSpace& nodal) {
  const Mesh2D& mesh = nodal.mesh();
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangle_count() * 9);
  for (Index t = 0; t < static_cast<Index>(mesh.triangle_count()); ++t) {
    const double area = nodal.geometry(t).area;
    for (int p = 0; p < 3; ++p) {
      for (int q = 0; q < 3; ++q) {
        trips.emplace_back(mesh.triangles[t][p], mesh.triangles[t][q], lambda_product(area, p, q));
      }
    }
  }
  return from_triplets(nodal.dof_count(), nodal.dof_count(), trips);
}

SparseComplexMatrix assemble_nodal_boundary_mass(const NodalSpace& nodal, const std::string& tag) {
  const Mesh2D& mesh = nodal.mesh();
  std::vector<Triplet> trips;
  for (const auto& ce : mesh.curve(tag)) {
    const auto& e = mesh.edges[ce.edge];
    const double l = ce.length;
    trips.emplace_back(e[0], e[0], l / 3.0);
    trips.emplace_back(e[1], e[1], l / 3.0);
    trips.emplace_back(e[0], e[1], l / 6.0);
    trips.emplace_back(e[1], e[0], l / 6.0);
  }
  return from_triplets(nodal.dof_count(), nodal.dof_count(), trips);
}

ComplexVector assemble_nodal_boundary_load(const NodalSpace& nodal, const std::string& tag,
                                           std::span<const Complex> samples) {
  const Mesh2D& mesh = nodal.mesh();
  const auto& curve = mesh.curve(tag);
  if (samples.size() != curve.size()) throw InvalidArgument("nodal boundary load: one sample per tagged edge expected");
  ComplexVector b = ComplexVector::Zero(nodal.dof_count());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto& e = mesh.edges[curve[i].edge];
    b[e[0]] += 0.5 * curve[i].length * samples[i];
    b[e[1]] += 0.5 * curve[i].length * samples[i];
  }
  return b;
}

SparseComplexMatrix discrete_gradient(const Mesh2D& mesh) {
  std::vector<Triplet> trips;
  trips.reserve(mesh.edge_count() * 2);
  for (Index e = 0; e < static_cast<Index>(mesh.edge_count()); ++e) {
    trips.emplace_back(e, mesh.edges[e][1], 1.0);
    trips.emplace_back(e, mesh.edges[e][0], -1.0);
  }
  return from_triplets(static_cast<Eigen::Index>(mesh.edge_count()), static_cast<Eigen::Index>(mesh.vertex_count()),
                       trips);
}

ComplexVector interpolate_edge(const EdgeSpace& space, const std::function<ComplexPoint(Point)>& u) {
  static constexpr double s[3] = {0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
  static constexpr double w[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  const Mesh2D& mesh = space.mesh();
  ComplexVector x(space.dof_count());
  for (Index e = 0; e < static_cast<Index>(mesh.edge_count()); ++e) {
    const Point a = mesh.vertices[mesh.edges[e][0]], b = mesh.vertices[mesh.edges[e][1]];
    const Point d = b - a;
    Complex acc = 0.0;
    for (int q = 0; q < 3; ++q) {
      const ComplexPoint v = u(a + s[q] * d);
      acc += w[q] * (v.x * d.x + v.y * d.y);
    }
    x[e] = acc;
  }
  return x;
}

}  // namespace qrinv
