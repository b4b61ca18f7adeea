#include "comot/graph_laplacian.hpp"

#include "comot/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>

#include <stdexcept>

namespace comot {
namespace {

double axis_value(const Box& b, Axis axis) {
  switch (axis) {
    case Axis::X: return b.x;
    case Axis::Y: return b.y;
    case Axis::Z: return b.z;
  }
  return 0.0;
}

std::vector<Box> boxes_of(const std::vector<Detection>& dets) {
  std::vector<Box> out;
  out.reserve(dets.size());
  for (const auto& d : dets) out.push_back(d.box);
  return out;
}

const Detection& source_of(const GraphNode& node, std::span<const AgentDetections> agents) {
  return agents[node.agent].detections[node.local_index];
}

}  // namespace

std::optional<std::size_t> NodeIndexMap::member_of(std::size_t group, std::size_t agent) const {
  for (std::size_t n : groups.at(group)) {
    if (nodes[n].agent == agent) return n;
  }
  return std::nullopt;
}

Eigen::MatrixXd GraphProblem::extended_laplacian() const {
  return comot::extended_laplacian(laplacian);
}

Eigen::VectorXd GraphProblem::measurement(Axis axis) const {
  const Eigen::Index n = size();
  const int c = static_cast<int>(axis);
  Eigen::VectorXd b(2 * n);
  b.head(n) = delta.col(c);
  b.tail(n) = anchors.col(c);
  return b;
}

Eigen::MatrixXd complete_graph_laplacian(Eigen::Index n) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Constant(n, n, -1.0);
  l.diagonal().setConstant(static_cast<double>(n - 1));
  return l;
}

Eigen::MatrixXd extended_laplacian(const Eigen::MatrixXd& laplacian) {
  const Eigen::Index n = laplacian.rows();
  Eigen::MatrixXd ext(2 * n, n);
  ext.topRows(n) = laplacian;
  ext.bottomRows(n).setIdentity();
  return ext;
}

NodeIndexMap build_node_map(std::span<const AgentDetections> agents,
                            std::span<const AssociationResult> cross_matches) {
  const std::size_t k = agents.size();
  if (k > 0 && cross_matches.size() != k - 1) {
    throw std::invalid_argument("build_node_map: need one cross match per non-reference agent");
  }
  std::size_t total = 0;
  for (const auto& a : agents) total += a.detections.size();
  if (total == 0) throw EmptyGraph("detection graph has no nodes");

  // partner[a][r]: detection of agent a matched to reference detection r.
  std::vector<std::vector<std::optional<std::size_t>>> partner(k);
  std::vector<std::vector<bool>> matched(k);
  for (std::size_t a = 0; a < k; ++a) matched[a].assign(agents[a].detections.size(), false);
  partner[0].resize(agents[0].detections.size());
  for (std::size_t a = 1; a < k; ++a) {
    partner[a].resize(agents[0].detections.size());
    for (const auto& [r, c] : cross_matches[a - 1].matched_pairs) {
      if (r >= agents[0].detections.size() || c >= agents[a].detections.size()) {
        throw std::out_of_range("build_node_map: cross match index out of range");
      }
      partner[a][r] = c;
      matched[0][r] = true;
      matched[a][c] = true;
    }
  }

  NodeIndexMap map;
  map.agent_ids.reserve(k);
  for (const auto& a : agents) map.agent_ids.push_back(a.agent_id);
  map.matched_count.assign(k, 0);
  map.unmatched_count.assign(k, 0);

  std::vector<std::size_t> group_rows;
  for (std::size_t r = 0; k > 0 && r < matched[0].size(); ++r) {
    if (matched[0][r]) group_rows.push_back(r);
  }
  map.groups.resize(group_rows.size());
  map.nodes.reserve(total);

  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t g = 0; g < group_rows.size(); ++g) {
      const std::size_t row = group_rows[g];
      const std::optional<std::size_t> local = a == 0 ? std::optional<std::size_t>(row) : partner[a][row];
      if (!local) continue;
      map.groups[g].push_back(map.nodes.size());
      map.nodes.push_back(GraphNode{a, *local, g});
      ++map.matched_count[a];
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t i = 0; i < matched[a].size(); ++i) {
      if (matched[a][i]) continue;
      map.nodes.push_back(GraphNode{a, i, std::nullopt});
      ++map.unmatched_count[a];
    }
  }
  return map;
}

NodeIndexMap build_node_map(const std::vector<Detection>& dets_i,
                            const std::vector<Detection>& dets_j,
                            const AssociationResult& cross_match) {
  const AgentDetections agents[] = {{"i", dets_i}, {"j", dets_j}};
  return build_node_map(agents, std::span<const AssociationResult>(&cross_match, 1));
}

Eigen::VectorXd node_positions(const NodeIndexMap& map, std::span<const AgentDetections> agents,
                               Axis axis) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(map.size()));
  for (std::size_t n = 0; n < map.size(); ++n) {
    v[static_cast<Eigen::Index>(n)] = axis_value(source_of(map.nodes[n], agents).box, axis);
  }
  return v;
}

Eigen::VectorXd differential_coords(const NodeIndexMap& map, const Eigen::VectorXd& positions) {
  if (static_cast<std::size_t>(positions.size()) != map.size()) {
    throw std::invalid_argument("differential_coords: positions do not match the node count");
  }
  return complete_graph_laplacian(positions.size()) * positions;
}

Eigen::VectorXd anchors_aos(const NodeIndexMap& map, const Eigen::VectorXd& positions) {
  Eigen::VectorXd a = positions;
  for (const auto& group : map.groups) {
    if (group.size() < 2) continue;
    double sum = 0.0;
    for (std::size_t n : group) sum += positions[static_cast<Eigen::Index>(n)];
    for (std::size_t n : group) {
      const double own = positions[static_cast<Eigen::Index>(n)];
      a[static_cast<Eigen::Index>(n)] =
          group.size() == 2 ? sum - own : (sum - own) / static_cast<double>(group.size() - 1);
    }
  }
  return a;
}

Eigen::VectorXd anchors_tsa(const NodeIndexMap& map, const Eigen::VectorXd& positions,
                            std::size_t anchor_agent) {
  Eigen::VectorXd a = positions;
  for (std::size_t g = 0; g < map.groups.size(); ++g) {
    const auto anchor = map.member_of(g, anchor_agent);
    if (!anchor) continue;
    const double value = positions[static_cast<Eigen::Index>(*anchor)];
    for (std::size_t n : map.groups[g]) a[static_cast<Eigen::Index>(n)] = value;
  }
  return a;
}

Eigen::VectorXd solve(const Eigen::MatrixXd& extended, const Eigen::VectorXd& b) {
  if (extended.rows() != b.size() || extended.rows() != 2 * extended.cols()) {
    throw std::invalid_argument("solve: expected a 2N x N system with a 2N measurement");
  }
  const Eigen::MatrixXd normal = extended.transpose() * extended;
  const Eigen::VectorXd rhs = extended.transpose() * b;
  return normal.llt().solve(rhs);
}

Eigen::VectorXd solve_complete(const Eigen::VectorXd& delta, const Eigen::VectorXd& anchors) {
  const Eigen::Index n = delta.size();
  if (anchors.size() != n) throw std::invalid_argument("solve_complete: size mismatch");
  if (n == 0) return Eigen::VectorXd();
  const double nd = static_cast<double>(n);
  const Eigen::VectorXd rhs = (nd * delta).array() - delta.sum() + anchors.array();
  return (rhs.array() + nd * rhs.sum()) / (nd * nd + 1.0);
}

std::string RefinedDetectionSet::label() const {
  if (scheme == RefineScheme::AOS) return "AOS";
  if (anchor_agent == 1) return "TSA_ij";
  if (anchor_agent == 0) return "TSA_ji";
  return "TSA_a" + std::to_string(anchor_agent);
}

GraphFrame build_graph(std::span<const AgentDetections> agents, double cross_iou_threshold) {
  std::vector<AssociationResult> cross;
  if (!agents.empty()) {
    const auto reference = boxes_of(agents[0].detections);
    for (std::size_t a = 1; a < agents.size(); ++a) {
      const auto other = boxes_of(agents[a].detections);
      cross.push_back(associate(std::span<const Box>(reference), std::span<const Box>(other),
                                cross_iou_threshold));
    }
  }
  GraphFrame frame;
  frame.map = build_node_map(agents, cross);
  const auto n = static_cast<Eigen::Index>(frame.map.size());
  frame.problem.laplacian = complete_graph_laplacian(n);
  frame.problem.positions.resize(n, 3);
  for (int c = 0; c < 3; ++c) {
    frame.problem.positions.col(c) = node_positions(frame.map, agents, static_cast<Axis>(c));
  }
  frame.problem.delta = frame.problem.laplacian * frame.problem.positions;
  frame.problem.anchors = Eigen::MatrixX3d::Zero(n, 3);
  return frame;
}

std::vector<RefinedDetectionSet> refine(std::span<const AgentDetections> agents,
                                        RefineScheme scheme, double cross_iou_threshold) {
  const GraphFrame graph = build_graph(agents, cross_iou_threshold);
  const GraphProblem& p = graph.problem;

  std::vector<std::size_t> anchor_agents;
  if (scheme == RefineScheme::AOS) {
    anchor_agents.push_back(0);
  } else {
    for (std::size_t a = 1; a < agents.size(); ++a) anchor_agents.push_back(a);
    anchor_agents.push_back(0);
  }

  std::vector<RefinedDetectionSet> sets;
  sets.reserve(anchor_agents.size());
  for (std::size_t anchor_agent : anchor_agents) {
    Eigen::MatrixX3d solved(p.size(), 3);
    for (int c = 0; c < 3; ++c) {
      const Eigen::VectorXd pos = p.positions.col(c);
      const Eigen::VectorXd anchors = scheme == RefineScheme::AOS
                                          ? anchors_aos(graph.map, pos)
                                          : anchors_tsa(graph.map, pos, anchor_agent);
      solved.col(c) = solve_complete(p.delta.col(c), anchors);
    }
    RefinedDetectionSet set;
    set.map = graph.map;
    set.scheme = scheme;
    set.anchor_agent = scheme == RefineScheme::AOS ? 0 : anchor_agent;
    set.boxes.reserve(graph.map.size());
    for (std::size_t n = 0; n < graph.map.size(); ++n) {
      Detection d = source_of(graph.map.nodes[n], agents);
      const auto row = static_cast<Eigen::Index>(n);
      d.box.x = solved(row, 0);
      d.box.y = solved(row, 1);
      d.box.z = solved(row, 2);
      set.boxes.push_back(std::move(d));
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

std::vector<RefinedDetectionSet> refine(const std::vector<Detection>& dets_i,
                                        const std::vector<Detection>& dets_j, RefineScheme scheme,
                                        double cross_iou_threshold) {
  const AgentDetections agents[] = {{"i", dets_i}, {"j", dets_j}};
  return refine(agents, scheme, cross_iou_threshold);
}

std::vector<Detection> merge_matched_groups(const RefinedDetectionSet& set,
                                            std::vector<std::vector<std::size_t>>* nodes_of) {
  std::vector<Detection> out;
  if (nodes_of) nodes_of->clear();
  for (const auto& group : set.map.groups) {
    Detection merged = set.boxes[group.front()];
    double x = 0.0, y = 0.0, z = 0.0;
    for (std::size_t n : group) {
      x += set.boxes[n].box.x;
      y += set.boxes[n].box.y;
      z += set.boxes[n].box.z;
      merged.score = std::max(merged.score, set.boxes[n].score);
    }
    const double count = static_cast<double>(group.size());
    merged.box.x = x / count;
    merged.box.y = y / count;
    merged.box.z = z / count;
    out.push_back(std::move(merged));
    if (nodes_of) nodes_of->push_back(group);
  }
  for (std::size_t n = 0; n < set.map.size(); ++n) {
    if (set.map.nodes[n].group) continue;
    out.push_back(set.boxes[n]);
    if (nodes_of) nodes_of->push_back({n});
  }
  return out;
}

}  // namespace comot
