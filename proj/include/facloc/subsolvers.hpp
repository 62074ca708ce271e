#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "facloc/instance.hpp"
#include "facloc/lp.hpp"
#include "facloc/solution.hpp"

namespace facloc {

struct LocalSearchOptions {
  int max_accepted_moves = 10000;
  double relative_improvement = 1e-6;
};

/// Open / close / swap local search with optimal reassignment after every
/// candidate move. Capacities are taken from the instance; facilities
/// without one are treated as uncapacitated. Throws Error(Infeasible) when
/// the total capacity is below |C|.
Solution solve_cfl_local_search(const Instance& inst, std::uint64_t seed, const LocalSearchOptions& options = {});

inline constexpr double kRoundingThreshold = 0.5;

/// Threshold rounding of a ConFL relaxation point over `residual_clients`
/// with root v. Throws Error(NotFeasibleFractional) when the point fails
/// the assignment, opening, root or connectivity constraints.
Solution round_confl(const FractionalSolution& frac, const Instance& inst, std::span<const int> residual_clients,
                     int root, double theta = kRoundingThreshold);

/// Point feasibility for build_confl_lp(inst, clients, root). Returns the
/// first failure, or nullopt.
std::optional<std::string> check_confl_feasible(const FractionalSolution& frac, const Instance& inst,
                                                std::span<const int> clients, int root,
                                                double tolerance = kSeparationTolerance);

struct ConflRun {
  int root = 0;
  double lp_value = 0.0;
  Solution solution;
  double cost = 0.0;
};

struct ConflOptions {
  std::optional<int> root;  // fix v instead of trying every facility
  CuttingPlaneOptions cutting;
};

/// LP solve and rounding for each guessed root; runs sorted by root.
std::vector<ConflRun> solve_confl_runs(const Instance& inst, std::span<const int> residual_clients,
                                       const ConflOptions& options = {});
/// Cheapest rounded solution over the guessed roots (lowest root on ties).
Solution solve_confl(const Instance& inst, std::span<const int> residual_clients, const ConflOptions& options = {});
Solution solve_confl(const Instance& inst, const ConflOptions& options = {});

inline constexpr int kExactMaxFacilities = 8;
inline constexpr int kExactMaxClients = 12;

bool within_exact_limits(const Instance& inst);

struct ExactOptions {
  /// Skip the empty open set even where penalties would allow it.
  bool require_open = false;
  /// Overrides inst.k for cardinality kinds.
  std::optional<int> k;
};

/// Exhaustive optimum for any kind. Throws Error(TooLarge) beyond
/// kExactMaxFacilities / kExactMaxClients, Error(Infeasible) when nothing
/// qualifies.
Solution solve_exact(const Instance& inst, const ProblemKind& kind, const ExactOptions& options = {});

Solution solve_ckc_exact(const Instance& inst, int k);
Solution solve_conkc_exact(const Instance& inst, int k);

/// Smallest largest edge over trees joining `terminals` within the
/// complete facility graph on edge_cost, with such a tree.
std::pair<double, EdgeSet> bottleneck_steiner(const Instance& inst, std::span<const int> terminals);

}  // namespace facloc
