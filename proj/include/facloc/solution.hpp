#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "facloc/graph.hpp"
#include "facloc/instance.hpp"

namespace facloc {

/// Integral solution over instance indices. `assignment[j]` is the facility
/// serving client j, or -1 when j is unserved (normally: j pays a penalty).
struct Solution {
  std::set<int> open;
  std::vector<int> assignment;
  std::set<int> penalty_set;
  EdgeSet steiner_edges;
  std::optional<std::string> kind;
  std::optional<double> claimed_total;

  static Solution empty_for(const Instance& inst) {
    Solution s;
    s.assignment.assign(inst.num_clients(), -1);
    return s;
  }
  std::vector<int> load(int num_facilities) const;
  std::vector<int> clients_of(int facility) const;
  bool operator==(const Solution&) const = default;
};

struct CostBreakdown {
  double facility = 0.0;
  double service = 0.0;
  double connection = 0.0;  // connection scale times tree edge costs
  double penalty = 0.0;
  double total = 0.0;
  double radius = 0.0;        // largest service distance
  double longest_edge = 0.0;  // largest unscaled tree edge cost
};

/// Cost of a solution under a kind. Facility costs are ignored for
/// k-median. Throws Error(UnknownId) on out-of-range indices.
CostBreakdown evaluate(const Instance& inst, const Solution& sol, const ProblemKind& kind);

/// The quantity the kind minimises: total, or for k-center the radius
/// (connected: the larger of radius and longest tree edge).
double objective_value(const CostBreakdown& cost, const ProblemKind& kind);

std::string solution_to_json(const Instance& inst, const Solution& sol, int indent = 2);
/// Resolves ids against the instance. Throws ParseError or UnknownId.
Solution parse_solution(const Instance& inst, std::string_view text);
Solution load_solution(const Instance& inst, const std::string& path);
void save_solution(const Instance& inst, const Solution& sol, const std::string& path);

}  // namespace facloc
