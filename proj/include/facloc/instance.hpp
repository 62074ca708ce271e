#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace facloc {

/// Absolute tolerance used for every metric check on instances.
inline constexpr double kMetricTolerance = 1e-9;

struct FacilitySpec {
  std::string id;
  double open_cost = 0.0;
  std::optional<int> capacity;  // absent = uncapacitated

  bool operator==(const FacilitySpec&) const = default;
};

struct ClientSpec {
  std::string id;
  std::optional<double> penalty;  // absent = must be served

  bool operator==(const ClientSpec&) const = default;
};

/// A facility-location instance. Node indices in `dist` are facilities
/// 0..F-1 followed by clients F..F+C-1. `edge_cost` is indexed by facility
/// pairs and prices Steiner edges, which live on facility nodes only.
struct Instance {
  std::string name;
  std::vector<FacilitySpec> facilities;
  std::vector<ClientSpec> clients;
  Eigen::MatrixXd dist;
  Eigen::MatrixXd edge_cost;
  double connection_scale = 1.0;
  std::optional<int> k;
  bool connectivity_dropped = false;
  /// Planar coordinates per node when the instance was built from points.
  std::optional<Eigen::MatrixX2d> points;

  int num_facilities() const { return static_cast<int>(facilities.size()); }
  int num_clients() const { return static_cast<int>(clients.size()); }
  int num_nodes() const { return num_facilities() + num_clients(); }

  /// Facility-to-client service distance.
  double d(int facility, int client) const { return dist(facility, num_facilities() + client); }
  double open_cost(int facility) const { return facilities[facility].open_cost; }
  /// Penalty of client j, zero when it carries none.
  double penalty(int client) const { return clients[client].penalty.value_or(0.0); }

  bool all_capacitated() const;
  bool all_penalized() const;
  std::optional<int> facility_index(std::string_view id) const;
  std::optional<int> client_index(std::string_view id) const;

  bool operator==(const Instance& other) const;
};

enum class BaseProblem { FL, kM, kFL, kC };

/// Constraint combination a solution is judged against.
struct ProblemKind {
  BaseProblem base = BaseProblem::FL;
  bool capacitated = false;
  bool connected = false;
  bool prize_collecting = false;

  bool has_cardinality() const { return base != BaseProblem::FL; }
  bool is_center() const { return base == BaseProblem::kC; }

  bool operator==(const ProblemKind&) const = default;
};

/// Parses names such as "fl", "cfl", "conpfl", "concpfl", "ckm", "conckc".
ProblemKind parse_kind(std::string_view name);
std::string to_string(const ProblemKind& kind);

/// Throws MissingPenalty / MissingCapacity / MissingCardinality when the
/// instance lacks the data `kind` needs.
void require_fields(const Instance& inst, const ProblemKind& kind);

/// Checks every invariant of Instance and throws the matching Error.
void validate_instance(const Instance& inst);

/// Parses the JSON instance format and validates the result.
Instance parse_instance(std::string_view text);
Instance load_instance(const std::string& path);
std::string instance_to_json(const Instance& inst, int indent = 2);
void save_instance(const Instance& inst, const std::string& path);

struct GeneratorConfig {
  std::string name;  // empty = derived from sizes and seed
  double open_cost_min = 0.2;
  double open_cost_max = 1.0;
  bool capacitated = true;
  bool uniform_capacity = false;
  int capacity_min = 2;
  int capacity_max = 4;
  bool ensure_feasible = true;
  bool penalties = true;
  double penalty_min = 0.2;
  double penalty_max = 1.5;
  double connection_scale = 1.0;
  /// Steiner edge cost = factor * Euclidean distance, factor in (0, 1].
  double edge_cost_factor = 1.0;
  std::optional<int> k;
};

/// Uniform points in the unit square with Euclidean distances. A pure
/// function of its arguments.
Instance generate_euclidean(int n_facilities, int n_clients, std::uint64_t seed,
                            const GeneratorConfig& config = {});

/// Copy with every capacity removed.
Instance drop_capacities(const Instance& inst);
/// Copy with connection_scale = 0 and connectivity marked as not required.
Instance drop_connectivity(const Instance& inst);

}  // namespace facloc
