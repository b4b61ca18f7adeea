#include "comot/assign.hpp"
#include "comot/error.hpp"
#include "comot/geometry.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <set>

namespace {

using namespace comot;

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.begin()->size());
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

void expect_partition(const AssociationResult& res, std::size_t rows, std::size_t cols) {
  std::set<std::size_t> rs, cs;
  for (const auto& [r, c] : res.matched_pairs) {
    EXPECT_TRUE(rs.insert(r).second);
    EXPECT_TRUE(cs.insert(c).second);
  }
  for (auto r : res.unmatched_rows) EXPECT_TRUE(rs.insert(r).second);
  for (auto c : res.unmatched_cols) EXPECT_TRUE(cs.insert(c).second);
  EXPECT_EQ(rs.size(), rows);
  EXPECT_EQ(cs.size(), cols);
  if (!rs.empty()) EXPECT_EQ(*rs.rbegin(), rows - 1);
  if (!cs.empty()) EXPECT_EQ(*cs.rbegin(), cols - 1);
}

TEST(Hungarian, AntiDiagonal) {
  const auto m = mat({{1, 2}, {2, 4}});
  const auto pairs = hungarian_min_cost(m);
  EXPECT_EQ(pairs, (std::vector<IndexPair>{{0, 1}, {1, 0}}));
  EXPECT_EQ(assignment_cost(m, pairs), 4.0);
}

TEST(Hungarian, DominantDiagonal) {
  EXPECT_EQ(hungarian_min_cost(mat({{0, 9}, {9, 0}})), (std::vector<IndexPair>{{0, 0}, {1, 1}}));
}

TEST(Hungarian, Rectangular) {
  EXPECT_EQ(hungarian_min_cost(mat({{0, 5, 5}, {5, 0, 5}})), (std::vector<IndexPair>{{0, 0}, {1, 1}}));
  EXPECT_EQ(hungarian_min_cost(mat({{5, 0}, {0, 5}, {5, 5}})), (std::vector<IndexPair>{{0, 1}, {1, 0}}));
}

TEST(Hungarian, EmptyAndNonFinite) {
  EXPECT_TRUE(hungarian_min_cost(Eigen::MatrixXd(0, 3)).empty());
  auto m = mat({{1, 2}, {3, 4}});
  m(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(hungarian_min_cost(m), NonFiniteCost);
  m(1, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(hungarian_min_cost(m), NonFiniteCost);
}

TEST(Hungarian, MatchesBruteForce) {
  oracle::Gen gen(21);
  for (int t = 0; t < 500; ++t) {
    const int r = gen.integer(1, 7), c = gen.integer(1, 7);
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = gen.integer(-50, 50);
    const auto pairs = hungarian_min_cost(m);
    ASSERT_EQ(pairs.size(), static_cast<std::size_t>(std::min(r, c)));
    ASSERT_EQ(assignment_cost(m, pairs), oracle::brute_force_min_cost(m));
  }
}

TEST(Hungarian, Deterministic) {
  oracle::Gen gen(22);
  Eigen::MatrixXd m(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) m(i, j) = gen.integer(0, 2);
  EXPECT_EQ(hungarian_min_cost(m), hungarian_min_cost(m));
}

TEST(Associate, IdenticalSingletons) {
  const std::vector<Box> a{Box{0, 0, 0, 0, 1, 1, 1}};
  const auto res = associate(a, a, 0.25);
  EXPECT_EQ(res.matched_pairs, (std::vector<IndexPair>{{0, 0}}));
  EXPECT_TRUE(res.unmatched_rows.empty());
  EXPECT_TRUE(res.unmatched_cols.empty());
}

TEST(Associate, DisjointSingletons) {
  const std::vector<Box> a{Box{0, 0, 0, 0, 1, 1, 1}};
  const std::vector<Box> b{Box{9, 0, 0, 0, 1, 1, 1}};
  const auto res = associate(a, b, 0.25);
  EXPECT_TRUE(res.matched_pairs.empty());
  EXPECT_EQ(res.unmatched_rows, (std::vector<std::size_t>{0}));
  EXPECT_EQ(res.unmatched_cols, (std::vector<std::size_t>{0}));
}

TEST(Associate, ThreeByThreeTwoGated) {
  const std::vector<Box> rows{Box{0, 0, 0, 0, 1, 1, 1}, Box{10, 0, 0, 0, 1, 1, 1},
                              Box{20, 0, 0, 0, 1, 1, 1}};
  const std::vector<Box> cols{Box{10.1, 0, 0, 0, 1, 1, 1}, Box{40, 0, 0, 0, 1, 1, 1},
                              Box{0.2, 0, 0, 0, 1, 1, 1}};
  const auto iou = iou_matrix(rows, cols);
  const auto res = associate(rows, cols, 0.25);
  EXPECT_EQ(res.matched_pairs, (std::vector<IndexPair>{{0, 2}, {1, 0}}));
  EXPECT_EQ(res.unmatched_rows, (std::vector<std::size_t>{2}));
  EXPECT_EQ(res.unmatched_cols, (std::vector<std::size_t>{1}));
  double total = 0.0;
  for (auto [r, c] : res.matched_pairs) total += iou(r, c);
  EXPECT_NEAR(total, oracle::brute_force_gated_max(iou, 0.25), 1e-12);
}

TEST(Associate, GatedOptimalityAndPartition) {
  oracle::Gen gen(23);
  for (int t = 0; t < 400; ++t) {
    const int r = gen.integer(0, 6), c = gen.integer(0, 6);
    std::vector<Box> rows, cols;
    for (int i = 0; i < r; ++i) rows.push_back(gen.box(2.0));
    for (int j = 0; j < c; ++j) cols.push_back(gen.box(2.0));
    const double thr = gen.uniform(0.05, 0.5);
    const auto iou = iou_matrix(rows, cols);
    const auto res = associate(rows, cols, thr);
    expect_partition(res, r, c);
    double total = 0.0;
    for (auto [i, j] : res.matched_pairs) {
      ASSERT_GE(iou(i, j), thr);
      total += iou(i, j);
    }
    ASSERT_GE(total + 1e-12, oracle::brute_force_gated_max(iou, thr));
  }
}

TEST(Associate, TracksUseFirstSevenStates) {
  TrackState t;
  t.state << 5, 0, 0, 0, 1, 1, 1, 100, 100, 100;
  const std::vector<TrackState> tracks{t};
  const std::vector<Box> boxes{Box{5, 0, 0, 0, 1, 1, 1}};
  EXPECT_EQ(associate(tracks, boxes, 0.9).matched_pairs.size(), 1u);
}

}  // namespace
