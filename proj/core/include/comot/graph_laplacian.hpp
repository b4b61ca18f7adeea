#pragma once

#include "comot/assign.hpp"
#include "comot/types.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace comot {

/// One graph node per detection of the frame.
struct GraphNode {
  std::size_t agent = 0;        // position in NodeIndexMap::agent_ids
  std::size_t local_index = 0;  // index in that agent's detection list
  std::optional<std::size_t> group;  // cross-agent match group, empty when unmatched
};

/// Node layout of the detection graph. Matched nodes come first, one block
/// per agent in agent order, with the k-th entry of every block belonging to
/// the k-th match group (for two agents: [matched-i, matched-j, unmatched-i,
/// unmatched-j] with pair-aligned matched blocks). Unmatched blocks follow in
/// agent order.
struct NodeIndexMap {
  std::vector<std::string> agent_ids;
  std::vector<GraphNode> nodes;
  /// Node indices of each match group; the first entry is the first agent's node.
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> matched_count;    // per agent
  std::vector<std::size_t> unmatched_count;  // per agent

  std::size_t size() const noexcept { return nodes.size(); }
  /// Node of `agent` inside `group`, if that agent takes part in it.
  std::optional<std::size_t> member_of(std::size_t group, std::size_t agent) const;
};

enum class Axis : int { X = 0, Y = 1, Z = 2 };

/// Per-axis extended-Laplacian least-squares system of one frame.
struct GraphProblem {
  Eigen::MatrixXd laplacian;  // N x N, complete graph
  Eigen::MatrixX3d positions;  // raw centroids in node order
  Eigen::MatrixX3d delta;      // laplacian * positions
  Eigen::MatrixX3d anchors;

  Eigen::Index size() const noexcept { return laplacian.rows(); }
  /// [L; I], 2N x N.
  Eigen::MatrixXd extended_laplacian() const;
  /// [delta; anchors] for one axis, length 2N.
  Eigen::VectorXd measurement(Axis axis) const;
};

/// Laplacian D - A of the complete graph on `n` nodes: n-1 on the diagonal, -1 elsewhere.
Eigen::MatrixXd complete_graph_laplacian(Eigen::Index n);

/// Stacks the identity under `laplacian`.
Eigen::MatrixXd extended_laplacian(const Eigen::MatrixXd& laplacian);

/// Builds the node layout for any number of agents. `cross_matches[k-1]`
/// associates agent 0 (rows) with agent k (cols). Throws EmptyGraph when no
/// agent has detections.
NodeIndexMap build_node_map(std::span<const AgentDetections> agents,
                            std::span<const AssociationResult> cross_matches);

NodeIndexMap build_node_map(const std::vector<Detection>& dets_i,
                            const std::vector<Detection>& dets_j,
                            const AssociationResult& cross_match);

/// Raw centroid coordinate of every node along `axis`.
Eigen::VectorXd node_positions(const NodeIndexMap& map, std::span<const AgentDetections> agents,
                               Axis axis);

/// delta_m = sum over all other nodes n of (v_m - v_n), i.e. L v on the complete graph.
Eigen::VectorXd differential_coords(const NodeIndexMap& map, const Eigen::VectorXd& positions);

/// All-in-one-stage anchors: every matched node is anchored by the mean raw
/// coordinate of the other members of its group (for two agents: the
/// partner's coordinate); unmatched nodes keep their own coordinate.
Eigen::VectorXd anchors_aos(const NodeIndexMap& map, const Eigen::VectorXd& positions);

/// Two-stage anchors for one anchoring agent: every member of a group that
/// contains a node of `anchor_agent` is anchored by that node's coordinate;
/// other nodes keep their own coordinate.
Eigen::VectorXd anchors_tsa(const NodeIndexMap& map, const Eigen::VectorXd& positions,
                            std::size_t anchor_agent);

/// Least-squares solution of [L; I] v = b through the SPD normal equations
/// (L^T L + I) v = L^T delta + anchors.
Eigen::VectorXd solve(const Eigen::MatrixXd& extended, const Eigen::VectorXd& b);

/// Same solution specialised to the complete graph, where L^T L + I = (N^2+1) I - N 11^T
/// has the inverse (I + N 11^T) / (N^2 + 1).
Eigen::VectorXd solve_complete(const Eigen::VectorXd& delta, const Eigen::VectorXd& anchors);

enum class RefineScheme { AOS, TSA };

struct RefinedDetectionSet {
  std::vector<Detection> boxes;  // node order; centroid solved, the rest copied
  NodeIndexMap map;
  RefineScheme scheme = RefineScheme::AOS;
  std::size_t anchor_agent = 0;  // TSA only

  /// "AOS", "TSA_ij" (anchored by the second agent) or "TSA_ji" (by the first).
  std::string label() const;
};

struct GraphFrame {
  NodeIndexMap map;
  GraphProblem problem;  // anchors left zero
};

/// Cross-associates every agent with the first agent's list and lays out the graph.
GraphFrame build_graph(std::span<const AgentDetections> agents, double cross_iou_threshold);

/// Full refinement of one frame. AOS yields one set; TSA yields one set per
/// agent, ordered by anchoring agent 1, 2, ..., K-1, 0 (G_ij before G_ji).
std::vector<RefinedDetectionSet> refine(std::span<const AgentDetections> agents,
                                        RefineScheme scheme, double cross_iou_threshold);

std::vector<RefinedDetectionSet> refine(const std::vector<Detection>& dets_i,
                                        const std::vector<Detection>& dets_j, RefineScheme scheme,
                                        double cross_iou_threshold);

/// Collapses every match group of `set` into one detection located at the mean
/// refined centroid of its members; heading, extents and agent come from the
/// group's first member and the score is the group maximum. `nodes_of` receives
/// the node indices behind every returned detection.
std::vector<Detection> merge_matched_groups(const RefinedDetectionSet& set,
                                            std::vector<std::vector<std::size_t>>* nodes_of);

}  // namespace comot
