#include "comot/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace comot {
namespace {

constexpr double kMinArea = 1e-12;

double cross(const Point2& o, const Point2& a, const Point2& b) noexcept {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

Point2 segment_line_intersection(const Point2& p, const Point2& q, const Point2& a,
                                 const Point2& b) noexcept {
  // Intersection of segment pq with the infinite line through ab.
  const double dp = cross(a, b, p);
  const double dq = cross(a, b, q);
  const double t = dp / (dp - dq);
  return Point2{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
}

double vertical_overlap(const Box& a, const Box& b) noexcept {
  const double lo = std::max(a.z - 0.5 * a.h, b.z - 0.5 * b.h);
  const double hi = std::min(a.z + 0.5 * a.h, b.z + 0.5 * b.h);
  return std::max(0.0, hi - lo);
}

}  // namespace

double polygon_signed_area(std::span<const Point2> polygon) noexcept {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = polygon[i];
    const Point2& q = polygon[(i + 1) % n];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

double BevPolygon::signed_area() const noexcept { return polygon_signed_area(corners); }

BevPolygon box_to_bev(const Box& box) {
  const double c = std::cos(box.theta);
  const double s = std::sin(box.theta);
  const double hl = 0.5 * box.l;
  const double hw = 0.5 * box.w;
  const std::array<Point2, 4> local = {
      Point2{hl, hw}, Point2{-hl, hw}, Point2{-hl, -hw}, Point2{hl, -hw}};
  BevPolygon poly;
  for (std::size_t i = 0; i < 4; ++i) {
    poly.corners[i] = Point2{box.x + c * local[i].x - s * local[i].y,
                             box.y + s * local[i].x + c * local[i].y};
  }
  return poly;
}

std::vector<Point2> clip_convex(std::span<const Point2> subject, std::span<const Point2> clip) {
  std::vector<Point2> output(subject.begin(), subject.end());
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !output.empty(); ++e) {
    const Point2& a = clip[e];
    const Point2& b = clip[(e + 1) % m];
    std::vector<Point2> input;
    input.swap(output);
    const std::size_t n = input.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& cur = input[i];
      const Point2& prev = input[(i + n - 1) % n];
      const bool cur_in = cross(a, b, cur) >= 0.0;
      const bool prev_in = cross(a, b, prev) >= 0.0;
      if (cur_in) {
        if (!prev_in) output.push_back(segment_line_intersection(prev, cur, a, b));
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(segment_line_intersection(prev, cur, a, b));
      }
    }
  }
  return output;
}

double bev_intersection_area(const Box& a, const Box& b) {
  const BevPolygon pa = box_to_bev(a);
  const BevPolygon pb = box_to_bev(b);
  const auto clipped = clip_convex(pa.corners, pb.corners);
  const double area = polygon_signed_area(clipped);
  return area < kMinArea ? 0.0 : area;
}

double iou3d(const Box& a, const Box& b) {
  if (a == b) return 1.0;
  const double dz = vertical_overlap(a, b);
  if (dz <= 0.0) return 0.0;
  const double inter_area = bev_intersection_area(a, b);
  if (inter_area <= 0.0) return 0.0;
  const double inter = inter_area * dz;
  const double uni = a.volume() + b.volume() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Eigen::MatrixXd iou_matrix(std::span<const Box> rows, std::span<const Box> cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = iou3d(rows[r], cols[c]);
    }
  }
  return m;
}

}  // namespace comot
