#include "comot/error.hpp"
#include "comot/graph_laplacian.hpp"

#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <algorithm>

namespace {

using namespace comot;

Detection at(double x, const std::string& agent, std::size_t index = 0, double score = 0.8) {
  Detection d;
  d.box = Box{x, 0.0, 0.8, 0.1, 1.6, 1.8, 4.5};
  d.score = score;
  d.agent_id = agent;
  d.local_index = index;
  return d;
}

AssociationResult pair_match() { return AssociationResult{{{0, 0}}, {}, {}}; }

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Random frame with a random cross-agent match structure.
struct RandomFrame {
  std::vector<AgentDetections> agents;
  std::vector<AssociationResult> cross;
  NodeIndexMap map;
};

RandomFrame random_frame(oracle::Gen& gen, int max_nodes, int num_agents = 2) {
  RandomFrame f;
  int budget = gen.integer(1, max_nodes);
  for (int a = 0; a < num_agents; ++a) {
    AgentDetections ad{"agent" + std::to_string(a), {}};
    const int count = a + 1 == num_agents ? budget : gen.integer(0, budget);
    budget -= count;
    for (int k = 0; k < count; ++k) ad.detections.push_back(gen.detection(ad.agent_id, k, 30.0));
    f.agents.push_back(std::move(ad));
  }
  const std::size_t m0 = f.agents[0].detections.size();
  for (int a = 1; a < num_agents; ++a) {
    const std::size_t ma = f.agents[a].detections.size();
    auto rows = gen.permutation(m0);
    auto cols = gen.permutation(ma);
    const std::size_t pairs = std::min(m0, ma) == 0 ? 0 : gen.integer(0, static_cast<int>(std::min(m0, ma)));
    AssociationResult res;
    for (std::size_t k = 0; k < pairs; ++k) res.matched_pairs.emplace_back(rows[k], cols[k]);
    std::sort(res.matched_pairs.begin(), res.matched_pairs.end());
    f.cross.push_back(res);
  }
  f.map = build_node_map(f.agents, f.cross);
  return f;
}

TEST(CompleteGraph, TwoNodes) {
  const auto l = complete_graph_laplacian(2);
  EXPECT_EQ(l, (Eigen::MatrixXd(2, 2) << 1, -1, -1, 1).finished());
}

TEST(CompleteGraph, ThreeUnmatchedNodes) {
  const std::vector<Detection> di{at(0, "i", 0), at(50, "i", 1)};
  const std::vector<Detection> dj{at(100, "j", 0)};
  const AgentDetections agents[] = {{"i", di}, {"j", dj}};
  const GraphFrame g = build_graph(agents, 0.25);
  ASSERT_EQ(g.map.size(), 3u);
  EXPECT_TRUE(g.map.groups.empty());
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) EXPECT_EQ(g.problem.laplacian(r, c), r == c ? 2.0 : -1.0);
}

TEST(CompleteGraph, RowSumsAndSpectrum) {
  for (int n = 1; n <= 40; ++n) {
    const auto l = complete_graph_laplacian(n);
    EXPECT_EQ(l.rowwise().sum().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(l, l.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
    const auto ev = es.eigenvalues();
    EXPECT_NEAR(ev[0], 0.0, 1e-8);
    for (int k = 1; k < n; ++k) EXPECT_NEAR(ev[k], n, 1e-8);
  }
}

TEST(BuildGraph, EmptyRaises) {
  const std::vector<Detection> none;
  EXPECT_THROW(build_node_map(none, none, AssociationResult{}), EmptyGraph);
  const AgentDetections agents[] = {{"i", none}, {"j", none}};
  EXPECT_THROW(build_graph(agents, 0.25), EmptyGraph);
}

TEST(BuildGraph, BlockOrder) {
  // i: 3 detections, j: 2; pairs (i2, j0) and (i0, j1).
  const std::vector<Detection> di{at(0, "i", 0), at(10, "i", 1), at(20, "i", 2)};
  const std::vector<Detection> dj{at(20, "j", 0), at(0, "j", 1)};
  const AssociationResult cross{{{0, 1}, {2, 0}}, {1}, {}};
  const NodeIndexMap map = build_node_map(di, dj, cross);
  ASSERT_EQ(map.size(), 5u);
  const std::vector<std::pair<std::size_t, std::size_t>> expected{{0, 0}, {0, 2}, {1, 1}, {1, 0}, {0, 1}};
  for (std::size_t n = 0; n < 5; ++n) {
    EXPECT_EQ(map.nodes[n].agent, expected[n].first) << n;
    EXPECT_EQ(map.nodes[n].local_index, expected[n].second) << n;
  }
  EXPECT_EQ(map.matched_count, (std::vector<std::size_t>{2, 2}));
  EXPECT_EQ(map.unmatched_count, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(map.groups, (std::vector<std::vector<std::size_t>>{{0, 2}, {1, 3}}));
  EXPECT_EQ(map.member_of(1, 1), std::optional<std::size_t>(3));
}

TEST(BuildGraph, NodeCountProperty) {
  oracle::Gen gen(41);
  for (int t = 0; t < 500; ++t) {
    const RandomFrame f = random_frame(gen, 30);
    const std::size_t total = f.agents[0].detections.size() + f.agents[1].detections.size();
    ASSERT_EQ(f.map.size(), total);
    ASSERT_EQ(f.map.matched_count[0], f.map.matched_count[1]);
    ASSERT_EQ(f.map.matched_count[0], f.cross[0].matched_pairs.size());
    for (std::size_t g = 0; g < f.map.groups.size(); ++g) {
      // Pair-aligned blocks: the k-th entries of both matched blocks form a group.
      ASSERT_EQ(f.map.groups[g], (std::vector<std::size_t>{g, g + f.map.matched_count[0]}));
    }
  }
}

TEST(DifferentialCoords, Examples) {
  const NodeIndexMap map = build_node_map({at(0, "i")}, {at(1, "j")}, pair_match());
  EXPECT_EQ(differential_coords(map, vec({0, 1})), vec({-1, 1}));
  EXPECT_EQ(differential_coords(map, vec({3, 3})), vec({0, 0}));
  EXPECT_EQ(differential_coords(map, vec({5, 6})), vec({-1, 1}));
  // Direct summation of differences.
  oracle::Gen gen(42);
  const RandomFrame f = random_frame(gen, 20);
  Eigen::VectorXd pos(static_cast<Eigen::Index>(f.map.size()));
  for (auto& p : pos) p = gen.uniform(-10, 10);
  const Eigen::VectorXd delta = differential_coords(f.map, pos);
  for (Eigen::Index m = 0; m < pos.size(); ++m) {
    double s = 0.0;
    for (Eigen::Index n = 0; n < pos.size(); ++n) s += pos[m] - pos[n];
    EXPECT_NEAR(delta[m], s, 1e-10);
  }
}

TEST(Anchors, AosPair) {
  const NodeIndexMap map = build_node_map({at(0, "i")}, {at(1, "j")}, pair_match());
  EXPECT_EQ(anchors_aos(map, vec({0, 1})), vec({1, 0}));
  EXPECT_EQ(anchors_aos(map, vec({2.5, 2.5})), vec({2.5, 2.5}));
}

TEST(Anchors, UnmatchedAreSelfAnchored) {
  const NodeIndexMap map = build_node_map({at(0, "i"), at(9, "i", 1)}, {at(40, "j")}, AssociationResult{});
  const auto pos = vec({0, 9, 40});
  EXPECT_EQ(anchors_aos(map, pos), pos);
  EXPECT_EQ(anchors_tsa(map, pos, 0), pos);
  EXPECT_EQ(anchors_tsa(map, pos, 1), pos);
}

TEST(Anchors, TsaPair) {
  const NodeIndexMap map = build_node_map({at(0, "i")}, {at(1, "j")}, pair_match());
  EXPECT_EQ(anchors_tsa(map, vec({0, 1}), 1), vec({1, 1}));
  EXPECT_EQ(anchors_tsa(map, vec({0, 1}), 0), vec({0, 0}));
  EXPECT_EQ(anchors_tsa(map, vec({4, 4}), 0), anchors_tsa(map, vec({4, 4}), 1));
}

TEST(Anchors, ThreeAgentGroups) {
  const std::vector<AgentDetections> agents{
      {"a", {at(0, "a")}}, {"b", {at(3, "b")}}, {"c", {at(6, "c"), at(50, "c", 1)}}};
  const std::vector<AssociationResult> cross{pair_match(), AssociationResult{{{0, 0}}, {}, {1}}};
  const NodeIndexMap map = build_node_map(agents, cross);
  const auto pos = vec({0, 3, 6, 50});
  EXPECT_EQ(anchors_aos(map, pos), vec({4.5, 3, 1.5, 50}));
  EXPECT_EQ(anchors_tsa(map, pos, 2), vec({6, 6, 6, 50}));
}

TEST(Solve, SingleNodeReturnsAnchor) {
  const Eigen::MatrixXd ext = extended_laplacian(complete_graph_laplacian(1));
  EXPECT_NEAR(solve(ext, vec({0, 7}))[0], 7.0, 1e-15);
  EXPECT_EQ(solve_complete(vec({0}), vec({7}))[0], 7.0);
}

TEST(Solve, PairClosedForms) {
  const Eigen::MatrixXd ext = extended_laplacian(complete_graph_laplacian(2));
  const auto delta = vec({-1, 1});
  const auto aos = solve_complete(delta, vec({1, 0}));
  EXPECT_NEAR(aos[0], 0.2, 1e-12);
  EXPECT_NEAR(aos[1], 0.8, 1e-12);
  Eigen::VectorXd b(4);
  b << delta, vec({1, 0});
  EXPECT_TRUE(solve(ext, b).isApprox(oracle::pinv_solve(ext, b), 1e-12));
  EXPECT_NEAR(oracle::pinv_solve(ext, b)[0], 0.2, 1e-12);
  const auto ij = solve_complete(delta, vec({1, 1}));
  EXPECT_NEAR(ij[0], 0.6, 1e-12);
  EXPECT_NEAR(ij[1], 1.4, 1e-12);
  const auto ji = solve_complete(delta, vec({0, 0}));
  EXPECT_NEAR(ji[0], -0.4, 1e-12);
  EXPECT_NEAR(ji[1], 0.4, 1e-12);
}

TEST(Solve, MatchesPseudoInverseOracle) {
  oracle::Gen gen(43);
  for (int t = 0; t < 100; ++t) {
    const RandomFrame f = random_frame(gen, 50);
    const auto pos = node_positions(f.map, f.agents, Axis::Y);
    const auto delta = differential_coords(f.map, pos);
    const auto anchors = gen.coin() ? anchors_aos(f.map, pos) : anchors_tsa(f.map, pos, gen.integer(0, 1));
    const auto n = pos.size();
    const Eigen::MatrixXd ext = extended_laplacian(complete_graph_laplacian(n));
    Eigen::VectorXd b(2 * n);
    b << delta, anchors;
    const Eigen::VectorXd oracle = oracle::pinv_solve(ext, b);
    const Eigen::VectorXd dense = solve(ext, b);
    const Eigen::VectorXd closed = solve_complete(delta, anchors);
    ASSERT_LE((dense - oracle).norm(), 1e-8 * oracle.norm());
    ASSERT_LE((closed - oracle).norm(), 1e-8 * oracle.norm());
    const Eigen::MatrixXd l = complete_graph_laplacian(n);
    const Eigen::VectorXd rhs = l.transpose() * delta + anchors;
    const Eigen::VectorXd residual = (l.transpose() * l + Eigen::MatrixXd::Identity(n, n)) * closed - rhs;
    ASSERT_LE(residual.norm(), 1e-9 * rhs.norm());
  }
}

TEST(Solve, FixedPoint) {
  oracle::Gen gen(44);
  for (int t = 0; t < 1000; ++t) {
    const int n = gen.integer(1, 50);
    Eigen::VectorXd a(n);
    for (auto& v : a) v = gen.uniform(-100, 100);
    const Eigen::VectorXd delta = complete_graph_laplacian(n) * a;
    ASSERT_LE((solve_complete(delta, a) - a).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Solve, TranslationEquivariance) {
  oracle::Gen gen(45);
  for (int t = 0; t < 1000; ++t) {
    const RandomFrame f = random_frame(gen, 50);
    const auto pos = node_positions(f.map, f.agents, Axis::X);
    const double c = gen.uniform(-1000, 1000);
    const Eigen::VectorXd shifted = pos.array() + c;
    const auto base = solve_complete(differential_coords(f.map, pos), anchors_aos(f.map, pos));
    const auto moved = solve_complete(differential_coords(f.map, shifted), anchors_aos(f.map, shifted));
    ASSERT_LE(((moved.array() - c) - base.array()).abs().maxCoeff(), 1e-9);
  }
}

TEST(Solve, PermutationEquivariance) {
  oracle::Gen gen(46);
  for (int t = 0; t < 1000; ++t) {
    const int n = gen.integer(1, 50);
    Eigen::VectorXd delta(n), a(n);
    for (auto& v : delta) v = gen.uniform(-10, 10);
    for (auto& v : a) v = gen.uniform(-10, 10);
    const auto perm = gen.permutation(n);
    Eigen::VectorXd pd(n), pa(n);
    for (int k = 0; k < n; ++k) {
      pd[k] = delta[perm[k]];
      pa[k] = a[perm[k]];
    }
    const auto v = solve_complete(delta, a);
    const auto pv = solve_complete(pd, pa);
    for (int k = 0; k < n; ++k) ASSERT_NEAR(pv[k], v[perm[k]], 1e-12);
  }
}

TEST(Refine, SingleDetectionUnchanged) {
  const auto sets = refine({at(3.5, "i")}, {}, RefineScheme::AOS, 0.25);
  ASSERT_EQ(sets.size(), 1u);
  ASSERT_EQ(sets[0].boxes.size(), 1u);
  EXPECT_NEAR(sets[0].boxes[0].box.x, 3.5, 1e-12);
  EXPECT_NEAR(sets[0].boxes[0].box.z, 0.8, 1e-12);
}

TEST(Refine, PairAos) {
  const auto sets = refine({at(0, "i")}, {at(1, "j")}, RefineScheme::AOS, 0.25);
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].label(), "AOS");
  EXPECT_NEAR(sets[0].boxes[0].box.x, 0.2, 1e-12);
  EXPECT_NEAR(sets[0].boxes[1].box.x, 0.8, 1e-12);
  EXPECT_NEAR(sets[0].boxes[0].box.y, 0.0, 1e-12);
}

TEST(Refine, PairTsa) {
  const auto sets = refine({at(0, "i")}, {at(1, "j")}, RefineScheme::TSA, 0.25);
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0].label(), "TSA_ij");
  EXPECT_EQ(sets[1].label(), "TSA_ji");
  EXPECT_NEAR(sets[0].boxes[0].box.x, 0.6, 1e-12);
  EXPECT_NEAR(sets[0].boxes[1].box.x, 1.4, 1e-12);
  EXPECT_NEAR(sets[1].boxes[0].box.x, -0.4, 1e-12);
  EXPECT_NEAR(sets[1].boxes[1].box.x, 0.4, 1e-12);
}

TEST(Refine, NonCentroidAttributesCopied) {
  oracle::Gen gen(47);
  for (int t = 0; t < 200; ++t) {
    std::vector<Detection> di, dj;
    for (int k = gen.integer(0, 6); k > 0; --k) di.push_back(gen.detection("i", di.size(), 5.0));
    for (int k = gen.integer(di.empty() ? 1 : 0, 6); k > 0; --k) dj.push_back(gen.detection("j", dj.size(), 5.0));
    for (auto scheme : {RefineScheme::AOS, RefineScheme::TSA}) {
      for (const auto& set : refine(di, dj, scheme, 0.1)) {
        ASSERT_EQ(set.boxes.size(), di.size() + dj.size());
        for (std::size_t n = 0; n < set.boxes.size(); ++n) {
          const auto& node = set.map.nodes[n];
          const Detection& src = node.agent == 0 ? di[node.local_index] : dj[node.local_index];
          const Detection& out = set.boxes[n];
          ASSERT_EQ(out.box.theta, src.box.theta);
          ASSERT_EQ(out.box.h, src.box.h);
          ASSERT_EQ(out.box.w, src.box.w);
          ASSERT_EQ(out.box.l, src.box.l);
          ASSERT_EQ(out.score, src.score);
          ASSERT_EQ(out.agent_id, src.agent_id);
          ASSERT_EQ(out.local_index, src.local_index);
        }
      }
    }
  }
}

TEST(Refine, AosVarianceReduction) {
  oracle::Gen gen(48);
  const double sigma = 0.5;
  double se = 0.0, raw = 0.0;
  long samples = 0;
  for (int t = 0; t < 10000; ++t) {
    Box truth{gen.uniform(-50, 50), gen.uniform(-50, 50), 0.0, 0.0, 20.0, 20.0, 20.0};
    Detection di, dj;
    di.box = dj.box = truth;
    for (Detection* d : {&di, &dj}) {
      d->box.x += gen.normal(sigma);
      d->box.y += gen.normal(sigma);
      d->box.z += gen.normal(sigma);
    }
    const auto set = refine({di}, {dj}, RefineScheme::AOS, 0.25).front();
    ASSERT_EQ(set.map.groups.size(), 1u);
    for (std::size_t n = 0; n < set.boxes.size(); ++n) {
      const Detection& out = set.boxes[n];
      const Detection& src = set.map.nodes[n].agent == 0 ? di : dj;
      se += std::pow(out.box.x - truth.x, 2) + std::pow(out.box.y - truth.y, 2) + std::pow(out.box.z - truth.z, 2);
      raw += std::pow(src.box.x - truth.x, 2) + std::pow(src.box.y - truth.y, 2) + std::pow(src.box.z - truth.z, 2);
      samples += 3;
    }
  }
  const double mse = se / samples;
  EXPECT_NEAR(mse, 0.68 * sigma * sigma, 0.05 * 0.68 * sigma * sigma);
  EXPECT_LT(mse, raw / samples);
}

TEST(MergeMatchedGroups, AveragesRefinedPairs) {
  const auto set = refine({at(0, "i", 0, 0.3), at(30, "i", 1)}, {at(1, "j", 0, 0.9)}, RefineScheme::AOS, 0.25).front();
  std::vector<std::vector<std::size_t>> nodes_of;
  const auto merged = merge_matched_groups(set, &nodes_of);
  ASSERT_EQ(merged.size(), 2u);
  EXPECT_NEAR(merged[0].box.x, 0.5 * (set.boxes[0].box.x + set.boxes[1].box.x), 1e-12);
  EXPECT_EQ(merged[0].score, 0.9);
  EXPECT_EQ(merged[0].agent_id, "i");
  EXPECT_EQ(nodes_of, (std::vector<std::vector<std::size_t>>{{0, 1}, {2}}));
  EXPECT_EQ(merged[1], set.boxes[2]);
}

}  // namespace
