#include "qrinv/support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qrinv {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Sutherland-Hodgman: clip `subject` by the counterclockwise convex `clip`.
std::vector<Point> clip_polygon(std::vector<Point> subject, const std::array<Point, 3>& clip) {
  for (int k = 0; k < 3 && !subject.empty(); ++k) {
    const Point a = clip[k], b = clip[(k + 1) % 3];
    const Point d = b - a;
    auto side = [&](Point p) { return cross(d, p - a); };
    std::vector<Point> out;
    out.reserve(subject.size() + 4);
    for (std::size_t i = 0; i < subject.size(); ++i) {
      const Point p = subject[i], q = subject[(i + 1) % subject.size()];
      const double sp = side(p), sq = side(q);
      if (sp >= 0.0) out.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) {
        const double t = sp / (sp - sq);
        out.push_back(p + t * (q - p));
      }
    }
    subject = std::move(out);
  }
  return subject;
}

struct Box {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  void add(Point p) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  bool overlaps(const Box& o) const { return xmin <= o.xmax && o.xmin <= xmax && ymin <= o.ymax && o.ymin <= ymax; }
};

}  // namespace

double FourierStar::radius_at(double theta) const {
  double r = r0;
  for (std::size_t n = 0; n < cos_coeffs.size(); ++n) r += cos_coeffs[n] * std::cos((n + 1.0) * theta);
  for (std::size_t n = 0; n < sin_coeffs.size(); ++n) r += sin_coeffs[n] * std::sin((n + 1.0) * theta);
  return r;
}

bool Support::contains(Point p) const {
  return std::visit(overloaded{
                        [&](const Ball& b) { return norm(p - b.center) < b.radius; },
                        [&](const Ellipse& e) {
                          const double u = (p.x - e.center.x) / e.rx, v = (p.y - e.center.y) / e.ry;
                          return u * u + v * v < 1.0;
                        },
                        [&](const FourierStar& s) {
                          const Point d = p - s.center;
                          return norm(d) < s.radius_at(angle_of(d));
                        },
                        [&](const UnionSupport& u) {
                          return std::any_of(u.parts.begin(), u.parts.end(),
                                             [&](const Support& s) { return s.contains(p); });
                        },
                    },
                    shape_);
}

bool Support::well_formed(bool allow_pinched) const {
  return std::visit(overloaded{
                        [](const Ball& b) { return b.radius > 0.0; },
                        [](const Ellipse& e) { return e.rx > 0.0 && e.ry > 0.0; },
                        [&](const FourierStar& s) {
                          if (!(s.r0 > 0.0)) return false;
                          if (allow_pinched) return true;
                          for (int i = 0; i < 720; ++i) {
                            if (!(s.radius_at(2.0 * M_PI * i / 720.0) > 0.0)) return false;
                          }
                          return true;
                        },
                        [&](const UnionSupport& u) {
                          return !u.parts.empty() &&
                                 std::all_of(u.parts.begin(), u.parts.end(),
                                             [&](const Support& s) { return s.well_formed(allow_pinched); });
                        },
                    },
                    shape_);
}

std::vector<std::vector<Point>> Support::boundary(int samples) const {
  using Polygons = std::vector<std::vector<Point>>;
  auto ring = [samples](auto&& radial) {
    std::vector<Point> poly;
    poly.reserve(samples);
    for (int i = 0; i < samples; ++i) poly.push_back(radial(2.0 * M_PI * i / samples));
    return poly;
  };
  return std::visit(
      overloaded{
          [&](const Ball& b) {
            return Polygons{ring([&](double t) {
              return b.center + b.radius * Point{std::cos(t), std::sin(t)};
            })};
          },
          [&](const Ellipse& e) {
            return Polygons{ring([&](double t) {
              return e.center + Point{e.rx * std::cos(t), e.ry * std::sin(t)};
            })};
          },
          [&](const FourierStar& s) {
            return Polygons{ring([&](double t) {
              return s.center + std::max(s.radius_at(t), 0.0) * Point{std::cos(t), std::sin(t)};
            })};
          },
          [&](const UnionSupport& u) {
            Polygons all;
            for (const auto& part : u.parts) {
              auto b = part.boundary(samples);
              all.insert(all.end(), b.begin(), b.end());
            }
            return all;
          },
      },
      shape_);
}

double Support::max_radius() const {
  double r = 0.0;
  for (const auto& poly : boundary(720)) {
    for (const auto& p : poly) r = std::max(r, norm(p));
  }
  return r;
}

std::vector<Support> Support::components() const {
  if (const auto* u = std::get_if<UnionSupport>(&shape_)) {
    std::vector<Support> flat;
    for (const auto& part : u->parts) {
      auto sub = part.components();
      flat.insert(flat.end(), sub.begin(), sub.end());
    }
    return flat;
  }
  return {*this};
}

std::string Support::describe() const {
  std::ostringstream out;
  out.precision(10);
  std::visit(overloaded{
                 [&](const Ball& b) { out << "ball center=(" << b.center.x << ", " << b.center.y << ") r=" << b.radius; },
                 [&](const Ellipse& e) {
                   out << "ellipse center=(" << e.center.x << ", " << e.center.y << ") rx=" << e.rx << " ry=" << e.ry;
                 },
                 [&](const FourierStar& s) {
                   out << "fourier center=(" << s.center.x << ", " << s.center.y << ") r0=" << s.r0 << " cos=[";
                   for (std::size_t i = 0; i < s.cos_coeffs.size(); ++i) out << (i ? " " : "") << s.cos_coeffs[i];
                   out << "] sin=[";
                   for (std::size_t i = 0; i < s.sin_coeffs.size(); ++i) out << (i ? " " : "") << s.sin_coeffs[i];
                   out << "]";
                 },
                 [&](const UnionSupport& u) {
                   out << "union{";
                   for (std::size_t i = 0; i < u.parts.size(); ++i) out << (i ? "; " : "") << u.parts[i].describe();
                   out << "}";
                 },
             },
             shape_);
  return out.str();
}

double polygon_area(const std::vector<Point>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

std::vector<double> coverage(const Mesh2D& mesh, const Support& support) {
  std::vector<double> frac(mesh.triangle_count(), 0.0);
  for (const auto& poly : support.boundary()) {
    Box shape_box;
    for (const auto& p : poly) shape_box.add(p);
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
      const auto& tri = mesh.triangles[t];
      const std::array<Point, 3> corners{mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
      Box tri_box;
      for (const auto& c : corners) tri_box.add(c);
      if (!tri_box.overlaps(shape_box)) continue;
      const double area = mesh.signed_area(static_cast<Index>(t));
      const double covered = polygon_area(clip_polygon(poly, corners));
      frac[t] = std::min(1.0, frac[t] + std::max(0.0, covered / area));
    }
  }
  return frac;
}

double hausdorff_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
  auto directed = [](const std::vector<Point>& from, const std::vector<Point>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, norm(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace qrinv
