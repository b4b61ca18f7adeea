#include "comot/assign.hpp"

#include "comot/error.hpp"
#include "comot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace comot {
namespace {

// Rows must not outnumber columns. Returns col index per row.
std::vector<std::size_t> solve_wide(const Eigen::MatrixXd& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  const auto m = static_cast<std::size_t>(a.cols());
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // 1-based bookkeeping; index 0 is the virtual column of the augmenting search.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = owner[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) -
                           u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> col_of_row(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (owner[j] != 0) col_of_row[owner[j] - 1] = j - 1;
  }
  return col_of_row;
}

}  // namespace

std::vector<IndexPair> hungarian_min_cost(const Eigen::MatrixXd& cost) {
  if (!cost.allFinite()) throw NonFiniteCost("cost matrix contains a non-finite entry");
  std::vector<IndexPair> pairs;
  if (cost.rows() == 0 || cost.cols() == 0) return pairs;

  if (cost.rows() <= cost.cols()) {
    const auto cols = solve_wide(cost);
    pairs.reserve(cols.size());
    for (std::size_t r = 0; r < cols.size(); ++r) pairs.emplace_back(r, cols[r]);
  } else {
    const Eigen::MatrixXd transposed = cost.transpose();
    const auto rows = solve_wide(transposed);
    pairs.reserve(rows.size());
    for (std::size_t c = 0; c < rows.size(); ++c) pairs.emplace_back(rows[c], c);
    std::sort(pairs.begin(), pairs.end());
  }
  return pairs;
}

double assignment_cost(const Eigen::MatrixXd& cost, std::span<const IndexPair> pairs) {
  double total = 0.0;
  for (const auto& [r, c] : pairs) {
    total += cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return total;
}

AssociationResult associate_iou(const Eigen::MatrixXd& iou, double threshold) {
  const Eigen::MatrixXd cost = (iou.array() >= threshold).select(-iou, 0.0);
  AssociationResult result;
  std::vector<bool> row_used(static_cast<std::size_t>(iou.rows()), false);
  std::vector<bool> col_used(static_cast<std::size_t>(iou.cols()), false);
  for (const auto& [r, c] : hungarian_min_cost(cost)) {
    if (iou(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) >= threshold) {
      result.matched_pairs.emplace_back(r, c);
      row_used[r] = true;
      col_used[c] = true;
    }
  }
  for (std::size_t r = 0; r < row_used.size(); ++r) {
    if (!row_used[r]) result.unmatched_rows.push_back(r);
  }
  for (std::size_t c = 0; c < col_used.size(); ++c) {
    if (!col_used[c]) result.unmatched_cols.push_back(c);
  }
  return result;
}

AssociationResult associate(std::span<const Box> rows, std::span<const Box> cols,
                            double threshold) {
  return associate_iou(iou_matrix(rows, cols), threshold);
}

AssociationResult associate(std::span<const TrackState> tracks, std::span<const Box> cols,
                            double threshold) {
  std::vector<Box> rows;
  rows.reserve(tracks.size());
  for (const auto& t : tracks) rows.push_back(t.box());
  return associate(std::span<const Box>(rows), cols, threshold);
}

}  // namespace comot
