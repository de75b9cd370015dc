#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wgbih/analysis.hpp"

namespace wgbih {

namespace {

double distance_to_segment(const Point& x, const Point& a, const Point& b) {
  const Point d = b - a;
  const double t = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (x - (a + t * d)).norm();
}

} // namespace

BubbleFunction::BubbleFunction(const PolyMesh& mesh, int cell) {
  const Cell& c = mesh.cell(cell);
  h_ = c.diameter;
  const auto poly = mesh.cell_polygon(cell);
  const int m = c.num_edges();
  for (int i = 0; i < m; ++i) {
    const auto [edge, sigma] = c.edges[i];
    anchors_.push_back(poly[i]);
    normals_.push_back(sigma * mesh.edge(edge).normal);
    segments_.emplace_back(poly[i], poly[(i + 1) % m]);
  }

  auto product = [this](const Point& x) {
    double p = 1.0;
    for (int i = 0; i < num_edges(); ++i) p *= line(i, x) * line(i, x);
    return p;
  };

  // Normalize at the interior point unless an extended edge line passes
  // (nearly) through it, which can happen in non-convex cells.
  const auto rule = cell_quadrature(mesh, cell, 10);
  double best = 0.0;
  Point argmax = c.interior_point;
  for (const auto& x : rule.points) {
    const double v = product(x);
    if (v > best) {
      best = v;
      argmax = x;
    }
  }
  normalization_point_ = product(c.interior_point) >= 1e-2 * best ? c.interior_point : argmax;
  scale_ = 1.0 / product(normalization_point_);

  double clearance = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    clearance = std::min(clearance, std::abs(line(i, normalization_point_)) * h_);
    clearance = std::min(clearance,
                         distance_to_segment(normalization_point_, segments_[i].first,
                                             segments_[i].second));
  }
  rho0_radius_ = 0.5 * clearance;
  rho0_ = element(normalization_point_);
  constexpr int kRadial = 16, kAngular = 32;
  for (int i = 1; i <= kRadial; ++i) {
    for (int j = 0; j < kAngular; ++j) {
      const double r = rho0_radius_ * i / kRadial;
      const double a = 2 * std::numbers::pi * j / kAngular;
      rho0_ = std::min(rho0_, element(normalization_point_ + r * Point(std::cos(a), std::sin(a))));
    }
  }

  for (int k = 0; k < m; ++k) {
    const auto [p0, p1] = segments_[k];
    std::vector<double> zeros{0.0, 1.0};
    for (int i = 0; i < m; ++i) {
      if (i == k) continue;
      const double l0 = line(i, p0);
      const double l1 = line(i, p1);
      if (std::abs(l1 - l0) > 1e-14) {
        const double t = -l0 / (l1 - l0);
        if (t > 0.0 && t < 1.0) zeros.push_back(t);
      }
    }
    std::sort(zeros.begin(), zeros.end());
    double lo = 0.0, hi = 1.0, gap = -1.0;
    for (std::size_t i = 0; i + 1 < zeros.size(); ++i) {
      if (zeros[i + 1] - zeros[i] > gap) {
        gap = zeros[i + 1] - zeros[i];
        lo = zeros[i];
        hi = zeros[i + 1];
      }
    }
    const double s0 = lo + 0.25 * gap;
    const double s1 = hi - 0.25 * gap;
    double rho = std::numeric_limits<double>::infinity();
    constexpr int kSamples = 64;
    for (int j = 0; j <= kSamples; ++j) {
      const double t = s0 + (s1 - s0) * j / kSamples;
      rho = std::min(rho, edge(k, p0 + t * (p1 - p0)));
    }
    rho1_.push_back(rho);
    rho1_interval_.emplace_back(s0, s1);
  }
}

double BubbleFunction::line(int i, const Point& x) const {
  return (x - anchors_[i]).dot(normals_[i]) / h_;
}

double BubbleFunction::element(const Point& x) const {
  double p = scale_;
  for (int i = 0; i < num_edges(); ++i) p *= line(i, x) * line(i, x);
  return p;
}

double BubbleFunction::edge(int k, const Point& x) const {
  double p = 1.0;
  for (int i = 0; i < num_edges(); ++i)
    if (i != k) p *= line(i, x) * line(i, x);
  return p;
}

} // namespace wgbih
