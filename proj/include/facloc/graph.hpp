#pragma once

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace facloc {

/// Undirected edge stored with first < second.
using Edge = std::pair<int, int>;
using EdgeSet = std::set<Edge>;

inline Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Arc {
  int tail = 0;
  int head = 0;
  double capacity = 0.0;
  double cost = 0.0;
};

struct FlowNetwork {
  int num_nodes = 0;
  int source = 0;
  int sink = 0;
  std::vector<Arc> arcs;

  int add_arc(int tail, int head, double capacity, double cost = 0.0) {
    arcs.push_back({tail, head, capacity, cost});
    return static_cast<int>(arcs.size()) - 1;
  }
  /// Two opposed arcs, each with the full capacity.
  void add_undirected(int a, int b, double capacity) {
    add_arc(a, b, capacity);
    add_arc(b, a, capacity);
  }
};

/// Source side of an s-t cut and the capacity leaving it.
struct Cut {
  std::vector<int> source_side;  // sorted; contains source, never sink
  double value = 0.0;
};

struct MaxFlowResult {
  double value = 0.0;
  Cut min_cut;
  std::vector<double> arc_flow;
};

/// Edmonds-Karp. The returned cut is the residual-reachable set from the
/// source, so its capacity equals the flow value.
MaxFlowResult max_flow(const FlowNetwork& net);

/// Capacity of the arcs leaving `source_side`.
double cut_capacity(const FlowNetwork& net, std::span<const int> source_side);

struct MinCostFlowResult {
  double value = 0.0;
  double cost = 0.0;
  std::vector<double> arc_flow;
};

/// Successive shortest paths from source to sink, sending at most `demand`.
/// Integral capacities give an integral optimal flow.
MinCostFlowResult min_cost_flow(const FlowNetwork& net, double demand);

struct AssignmentResult {
  std::vector<int> facility_of;  // per client index; -1 when not assigned
  std::vector<int> penalized;    // clients routed to their penalty option
  double service_cost = 0.0;
  double penalty_cost = 0.0;
  double total() const { return service_cost + penalty_cost; }
};

struct AssignmentProblem {
  /// Facility-by-client service costs.
  Eigen::Ref<const Eigen::MatrixXd> cost;
  std::span<const int> open;
  /// Capacity per facility index (not per open position).
  std::span<const int> capacity;
  std::span<const int> clients;
  /// Per-client penalty option, empty when every client must be served.
  std::span<const double> penalty = {};
  /// Pairs whose cost exceeds this bound are forbidden.
  double max_cost = kInfinity;
};

/// Capacity-respecting assignment of minimum total cost. Throws
/// Error(Infeasible) when the open set cannot serve every client.
AssignmentResult min_cost_assignment(const AssignmentProblem& problem);

/// Capacity-respecting assignment minimising the largest service cost,
/// with total cost minimal among those. Returns the radius alongside.
std::pair<double, AssignmentResult> bottleneck_assignment(const AssignmentProblem& problem);

struct TreeResult {
  EdgeSet edges;
  double weight = 0.0;
};

/// Prim's algorithm on the complete graph over `nodes`.
TreeResult mst(std::span<const int> nodes, const Eigen::MatrixXd& weights);

struct Connectivity {
  bool connected = true;
  std::vector<std::vector<int>> components;
};

/// Components of the graph on nodes and edge endpoints; `connected` is true
/// iff all of `nodes` share one component.
Connectivity is_connected(std::span<const int> nodes, const EdgeSet& edges);

/// All-pairs shortest paths with successor table for path expansion.
struct ShortestPaths {
  Eigen::MatrixXd dist;
  Eigen::MatrixXi next;
  std::vector<int> path(int from, int to) const;
};
ShortestPaths all_pairs_shortest_paths(const Eigen::MatrixXd& weights);

/// MST of the metric closure over `terminals`, expanded into original
/// edges. A 2-approximate Steiner tree.
TreeResult metric_closure_steiner(std::span<const int> terminals, const Eigen::MatrixXd& weights);

/// Minimax path values: entry (a, b) is the smallest possible largest edge
/// on any a-b path.
Eigen::MatrixXd minimax_distances(const Eigen::MatrixXd& weights);

/// Removes non-terminal leaves until every leaf is a terminal.
EdgeSet prune_to_terminals(EdgeSet edges, std::span<const int> terminals);

}  // namespace facloc
