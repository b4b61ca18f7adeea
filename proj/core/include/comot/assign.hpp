#pragma once

#include "comot/types.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace comot {

using IndexPair = std::pair<std::size_t, std::size_t>;

struct AssociationResult {
  std::vector<IndexPair> matched_pairs;  // (row, col), ascending by row
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::size_t> unmatched_cols;
};

/// Minimum-cost assignment of min(rows, cols) pairs (Kuhn-Munkres with
/// potentials, O(n^2 m)). Rectangular input is allowed. Pairs are returned in
/// ascending row order. Throws NonFiniteCost on NaN/inf entries.
std::vector<IndexPair> hungarian_min_cost(const Eigen::MatrixXd& cost);

/// Sum of cost(r, c) over `pairs`, accumulated in the given order.
double assignment_cost(const Eigen::MatrixXd& cost, std::span<const IndexPair> pairs);

/// Gated maximum-overlap matching on a precomputed IoU matrix. Pairs with IoU
/// below `threshold` carry zero weight in the assignment and are demoted to
/// unmatched afterwards, so the result maximises total IoU over gated pairs.
AssociationResult associate_iou(const Eigen::MatrixXd& iou, double threshold);

AssociationResult associate(std::span<const Box> rows, std::span<const Box> cols,
                            double threshold);

/// Tracks contribute the first seven state components as their box.
AssociationResult associate(std::span<const TrackState> tracks, std::span<const Box> cols,
                            double threshold);

}  // namespace comot
