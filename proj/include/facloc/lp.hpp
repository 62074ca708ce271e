#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "facloc/graph.hpp"
#include "facloc/instance.hpp"
#include "facloc/simplex.hpp"

namespace facloc {

using simplex::Relation;

struct LpVariable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
};

struct LpConstraint {
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
  std::string name;
};

/// Minimisation model. `lazy`, when set, receives a candidate point and
/// returns the constraints it violates (empty when none).
struct LpModel {
  std::vector<LpVariable> variables;
  std::vector<double> objective;
  std::vector<LpConstraint> constraints;
  std::function<std::vector<LpConstraint>(std::span<const double>)> lazy;

  int add_variable(std::string name, double lower, double upper, double cost);
  void add_constraint(LpConstraint constraint) { constraints.push_back(std::move(constraint)); }
  int num_variables() const { return static_cast<int>(variables.size()); }
  /// Throws DimensionMismatch / InvalidConfig on malformed models.
  void validate() const;
};

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
};

/// Solves the explicit constraints only; `lazy` is ignored. Throws
/// Error(Infeasible), Error(Unbounded) or Error(IterationLimit).
LpSolution solve_lp(const LpModel& model);

/// Writes the model in CPLEX LP text format.
void write_lp_format(const LpModel& model, std::ostream& out);

/// Where each facility-location quantity lives in the variable vector.
struct FlLpLayout {
  int num_facilities = 0;
  int num_clients = 0;     // clients of the instance, modeled or not
  std::vector<int> clients;  // modeled clients, ascending
  std::vector<Edge> edges;   // all facility pairs
  bool has_z = false;
  int root = 0;

  int w(int facility) const { return facility; }
  int x(int facility, int client_pos) const {
    return num_facilities + client_pos * num_facilities + facility;
  }
  int y(int edge_pos) const {
    return num_facilities + static_cast<int>(clients.size()) * num_facilities + edge_pos;
  }
  int z(int client_pos) const {
    return num_facilities + static_cast<int>(clients.size()) * num_facilities + static_cast<int>(edges.size()) +
           client_pos;
  }
  int edge_index(int a, int b) const;
};

struct ConnectedLp {
  LpModel model;
  FlLpLayout layout;
};

/// Relaxation of the penalty-aware connected model with guessed root v.
ConnectedLp build_conpfl_lp(const Instance& inst, int root);
/// Relaxation of connected FL over `residual_clients` with guessed root v.
ConnectedLp build_confl_lp(const Instance& inst, std::span<const int> residual_clients, int root);

/// LP point in facility-location coordinates. `x` is facilities-by-clients
/// over all instance clients (zero columns for unmodeled ones); `y` is a
/// symmetric facility matrix; `z` is empty for models without penalties.
struct FractionalSolution {
  Eigen::VectorXd w;
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  Eigen::VectorXd z;
  std::vector<int> clients;
  int root = 0;
  double objective = 0.0;

  bool has_z() const { return z.size() > 0; }
};

struct FractionalCost {
  double facility = 0.0;
  double service = 0.0;
  double connection = 0.0;
  double penalty = 0.0;
  double total() const { return facility + service + connection + penalty; }
};

/// Objective components of a fractional point; service and penalty sum over
/// `clients` only.
FractionalCost fractional_cost(const Instance& inst, const FractionalSolution& frac, std::span<const int> clients);
inline FractionalCost fractional_cost(const Instance& inst, const FractionalSolution& frac) {
  return fractional_cost(inst, frac, frac.clients);
}

FractionalSolution to_fractional(const FlLpLayout& layout, std::span<const double> values, double objective);
/// Inverse of to_fractional for the given layout.
std::vector<double> to_variables(const FlLpLayout& layout, const FractionalSolution& frac);

/// A violated connectivity inequality sum_{i in S} x_ij <= sum_{e in d(S)} y_e.
struct ConnectivityCut {
  int client = 0;
  std::vector<int> facilities;  // S, never containing the root
  double violation = 0.0;
};

/// Default slack below which a connectivity inequality counts as satisfied.
inline constexpr double kSeparationTolerance = 1e-7;

/// Max-flow separation for one client: source arcs carry x_ij, facility
/// edges carry y_e in both directions, the root is the sink.
std::vector<ConnectivityCut> separate_cuts(const Instance& inst, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                           int root, int client, double tolerance = kSeparationTolerance);
std::vector<ConnectivityCut> separate_cuts(int num_facilities, const Eigen::Ref<const Eigen::VectorXd>& x_col,
                                           const Eigen::MatrixXd& y, int root, int client,
                                           double tolerance = kSeparationTolerance);

/// One separation pass over the given clients.
std::vector<ConnectivityCut> separation_sweep(const FractionalSolution& frac, std::span<const int> clients,
                                              double tolerance = kSeparationTolerance);

LpConstraint to_constraint(const FlLpLayout& layout, const ConnectivityCut& cut);

/// Installs every connectivity inequality explicitly (exponential; oracle use).
void add_all_connectivity_cuts(ConnectedLp& lp);

/// Cuts found for one root, reusable for any root outside S.
struct CutPool {
  std::vector<ConnectivityCut> cuts;
};

struct CuttingPlaneOptions {
  int max_rounds = 10000;
  double tolerance = kSeparationTolerance;
};

struct CuttingPlaneStats {
  int rounds = 0;
  int cuts_added = 0;
  int pooled_cuts_used = 0;
  std::vector<double> round_values;
  bool monotone = true;
};

/// Alternates solve_lp with the model's lazy separation until no client
/// yields a violated inequality. Throws Error(IterationLimit) past
/// `max_rounds` and propagates Error(Infeasible).
FractionalSolution solve_with_cuts(const ConnectedLp& lp, CutPool* pool = nullptr,
                                   const CuttingPlaneOptions& options = {}, CuttingPlaneStats* stats = nullptr);

}  // namespace facloc
