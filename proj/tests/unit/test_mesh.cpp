#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "qrinv/error.hpp"
#include "qrinv/mesh.hpp"

using namespace qrinv;

namespace {

// Edge -> number of incident triangles, from connectivity alone.
std::map<std::pair<Index, Index>, int> edge_use(const Mesh2D& m) {
  std::map<std::pair<Index, Index>, int> use;
  for (const auto& t : m.triangles) {
    for (int k = 0; k < 3; ++k) {
      Index a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++use[{a, b}];
    }
  }
  return use;
}

void check_invariants(const Mesh2D& m, int euler) {
  for (std::size_t t = 0; t < m.triangle_count(); ++t) CHECK(m.signed_area(static_cast<Index>(t)) > 0.0);
  for (const auto& e : m.edges) CHECK(e[0] < e[1]);
  const auto use = edge_use(m);
  CHECK(use.size() == m.edge_count());
  for (const auto& [e, n] : use) CHECK((n == 1 || n == 2));
  // Local signs agree with the vertex order of each triangle.
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const auto& ed = m.edges[m.triangle_edges[t][k]];
      const Index a = m.triangles[t][k], b = m.triangles[t][(k + 1) % 3];
      CHECK(((ed[0] == a && ed[1] == b) || (ed[0] == b && ed[1] == a)));
      CHECK(m.triangle_edge_signs[t][k] == (a < b ? 1 : -1));
    }
  }
  const long v = static_cast<long>(m.vertex_count()), e = static_cast<long>(m.edge_count()),
             f = static_cast<long>(m.triangle_count());
  CHECK(v - e + f == euler);
  for (std::size_t t = 0; t < m.triangle_count(); ++t) CHECK(m.diameter(static_cast<Index>(t)) <= 1.5 * m.h);
}

// Tagged edges of a closed curve: every vertex is used exactly twice.
bool closed_polyline(const Mesh2D& m, const std::string& tag) {
  std::map<Index, int> deg;
  for (const auto& ce : m.curve(tag)) {
    ++deg[m.edges[ce.edge][0]];
    ++deg[m.edges[ce.edge][1]];
  }
  for (const auto& [v, d] : deg) {
    if (d != 2) return false;
  }
  return !deg.empty();
}

}  // namespace

TEST_CASE("smallest disk mesh is valid") {
  const Mesh2D m = mesh_disk(1.0, 0.5, {});
  CHECK(m.triangle_count() >= 4);
  check_invariants(m, 1);
  CHECK(closed_polyline(m, "Gamma"));
}

TEST_CASE("embedded circles are exact closed polylines") {
  const Mesh2D m = mesh_disk(1.0, 0.04, {0.7, 0.8});
  check_invariants(m, 1);
  for (double r : {0.7, 0.8}) {
    const std::string tag = radius_tag(r);
    REQUIRE(m.has_curve(tag));
    CHECK(closed_polyline(m, tag));
    for (const auto& ce : m.curve(tag)) {
      for (Index v : m.edges[ce.edge]) CHECK(std::abs(norm(m.vertices[v]) - r) < 1e-12);
      // Chord midpoint within h^2/2 of the circle.
      CHECK(r - norm(m.edge_midpoint(ce.edge)) <= 0.5 * m.h * m.h);
    }
  }
  CHECK(radius_tag(0.8) == "r=0.8");
}

TEST_CASE("disk area converges at second order") {
  double prev = 0.0;
  for (double h : {0.1, 0.05}) {
    const double deficit = M_PI - mesh_area(mesh_disk(1.0, h, {}));
    CHECK(deficit > 0.0);
    CHECK(deficit < h * h);
    if (prev > 0.0) CHECK(prev / deficit > 3.0);
    prev = deficit;
  }
}

TEST_CASE("annulus mesh") {
  const Mesh2D m = mesh_annulus(0.7, 1.0, 0.02, {0.8});
  check_invariants(m, 0);
  CHECK(closed_polyline(m, "Gamma_outer"));
  CHECK(closed_polyline(m, "Gamma_inner"));
  // The embedded circle is interior: every tagged edge has two triangles.
  const auto use = edge_use(m);
  for (const auto& ce : m.curve("r=0.8")) {
    const auto& e = m.edges[ce.edge];
    CHECK(use.at({e[0], e[1]}) == 2);
  }
  const double exact = M_PI * (1.0 - 0.49);
  CHECK(std::abs(mesh_area(m) - exact) < 0.02 * 0.02 * 2.0 * M_PI);
  CHECK_THROWS_AS(mesh_annulus(0.5, 0.5, 0.05, {}), InvalidGeometry);
  CHECK_THROWS_AS(mesh_disk(1.0, 0.1, {1.2}), InvalidGeometry);
  CHECK_THROWS_AS(mesh_disk(1.0, 0.1, {0.0}), InvalidGeometry);
}

TEST_CASE("curve normals point outward and lengths match edges") {
  const Mesh2D m = mesh_disk(1.0, 0.1, {0.5});
  for (const auto& tag : {std::string("Gamma"), std::string("r=0.5")}) {
    double prev_angle = -1.0;
    for (const auto& ce : m.curve(tag)) {
      const Point mid = m.edge_midpoint(ce.edge);
      CHECK(dot(ce.normal, mid) > 0.0);
      CHECK(std::abs(norm(ce.normal) - 1.0) < 1e-14);
      CHECK(ce.length == doctest::Approx(m.edge_length(ce.edge)).epsilon(1e-14));
      const double a = wrap_angle(angle_of(mid));
      CHECK(a > prev_angle);
      prev_angle = a;
    }
  }
  CHECK_THROWS_AS(m.curve("nope"), UnknownTag);
}

TEST_CASE("patch tagging") {
  SUBCASE("one patch covering everything") {
    const Mesh2D m = tag_patches(mesh_disk(1.0, 0.1, {}), "Gamma", {1, M_PI - 1e-3, 0.03});
    // The uncovered sliver sits between two edge midpoints.
    CHECK(m.curve("Gamma0").size() == m.curve("Gamma").size());
    CHECK(m.curve("Gamma1").empty());
  }
  SUBCASE("32 patches cover about 76% of the circle") {
    const double h = 0.02;
    const Mesh2D m = tag_patches(mesh_disk(1.0, h, {}), "Gamma", {32, 0.075, 0.0});
    const double ratio = curve_length(m, "Gamma0") / curve_length(m, "Gamma");
    CHECK(std::abs(ratio - 32 * 0.15 / (2 * M_PI)) < 2 * h);
    // Disjoint partition of the boundary.
    std::set<Index> g0, g1, all;
    for (const auto& ce : m.curve("Gamma0")) g0.insert(ce.edge);
    for (const auto& ce : m.curve("Gamma1")) g1.insert(ce.edge);
    for (const auto& ce : m.curve("Gamma")) all.insert(ce.edge);
    std::set<Index> uni = g0;
    uni.insert(g1.begin(), g1.end());
    CHECK(uni == all);
    CHECK(g0.size() + g1.size() == all.size());
  }
  SUBCASE("two patches centred at 0 and pi") {
    const Mesh2D m = tag_patches(mesh_disk(1.0, 0.02, {}), "Gamma", {2, 0.1, 0.0});
    bool near0 = false, near_pi = false;
    for (const auto& ce : m.curve("Gamma0")) {
      const double a = angle_of(m.edge_midpoint(ce.edge));
      CHECK((angular_distance(a, 0.0) < 0.1 || angular_distance(a, M_PI) < 0.1));
      near0 |= angular_distance(a, 0.0) < 0.02;
      near_pi |= angular_distance(a, M_PI) < 0.02;
    }
    CHECK(near0);
    CHECK(near_pi);
  }
  CHECK_THROWS_AS(tag_patches(mesh_disk(1.0, 0.1, {}), "Gamma", {4, 1.0, 0.0}), InvalidGeometry);
}

TEST_CASE("checksum and dump are deterministic") {
  const Mesh2D a = mesh_disk(1.0, 0.1, {0.8});
  const Mesh2D b = mesh_disk(1.0, 0.1, {0.8});
  CHECK(a.checksum() == b.checksum());
  CHECK(a.checksum() != mesh_disk(1.0, 0.09, {0.8}).checksum());
  std::ostringstream sa, sb;
  write_mesh(sa, a);
  write_mesh(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().find("TRIANGLES") != std::string::npos);
}
