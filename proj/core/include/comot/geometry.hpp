#pragma once

#include "comot/types.hpp"

#include <Eigen/Core>

#include <array>
#include <span>
#include <vector>

namespace comot {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Birds-eye footprint of a box, corners in counter-clockwise order.
struct BevPolygon {
  std::array<Point2, 4> corners;

  double signed_area() const noexcept;
};

BevPolygon box_to_bev(const Box& box);

/// Shoelace area, positive for counter-clockwise vertex order.
double polygon_signed_area(std::span<const Point2> polygon) noexcept;

/// Sutherland-Hodgman clip of `subject` against the convex counter-clockwise `clip`.
std::vector<Point2> clip_convex(std::span<const Point2> subject, std::span<const Point2> clip);

/// BEV intersection area; areas below 1e-12 m^2 are reported as 0.
double bev_intersection_area(const Box& a, const Box& b);

/// Oriented 3D IoU in [0,1]: BEV overlap times vertical overlap over the union volume.
double iou3d(const Box& a, const Box& b);

/// (r, c) = iou3d(rows[r], cols[c]).
Eigen::MatrixXd iou_matrix(std::span<const Box> rows, std::span<const Box> cols);

}  // namespace comot
