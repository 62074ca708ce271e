#pragma once

#include <optional>
#include <span>
#include <vector>

#include "facloc/instance.hpp"
#include "facloc/lp.hpp"
#include "facloc/solution.hpp"
#include "facloc/subsolvers.hpp"

namespace facloc {

/// Client j of the original instance owns reduced facility
/// num_original_facilities + j.
struct DummyMap {
  const Instance* original = nullptr;
  int num_original_facilities = 0;

  int dummy_of(int client) const { return num_original_facilities + client; }
  bool is_dummy(int facility) const { return facility >= num_original_facilities; }
  int client_of(int dummy) const { return dummy - num_original_facilities; }
};

struct CpflReduction {
  Instance reduced;
  DummyMap map;
};

/// Adds one collocated facility per client with opening cost p_j and
/// capacity 1; penalties are removed. The original must outlive the map.
/// Throws MissingPenalty / MissingCapacity.
CpflReduction cpfl_to_cfl(const Instance& inst);

/// Moves every open dummy's own client onto it, exchanging with whichever
/// client the dummy served. Never increases cost.
Solution normalize_dummies(const Solution& reduced_solution, const DummyMap& map);

/// Reduced CFL solution to a CPFL solution of equal cost: open dummies
/// become penalties. Throws Error(InvalidSolution) if the input is not a
/// feasible CFL solution of the reduced instance.
Solution lift_cfl_solution(const Solution& reduced_solution, const Instance& reduced, const DummyMap& map);

struct ThresholdResult {
  std::vector<int> penalized;  // C_p
  std::vector<int> residual;
  double penalty_paid = 0.0;
  double lp_penalty_mass = 0.0;
};

inline constexpr double kPenaltyThreshold = 0.5;

/// Clients with z* >= 1/2 pay their penalty.
ThresholdResult threshold_penalties(const Instance& inst, const FractionalSolution& rho_star);

/// Renormalises residual assignments to 1 and raises openings and edges
/// to match. Throws Error(ScalePreconditionViolated) when a residual
/// client is served below 1/2.
FractionalSolution scale_fractional(const FractionalSolution& rho_star, std::span<const int> residual);

/// confl_sol plus penalties for C_p. Throws Error(Overlap) when a C_p
/// client is assigned in confl_sol.
Solution assemble_conpfl(const Solution& confl_sol, const ThresholdResult& thr);

struct ConpflOptions {
  std::optional<int> root;
  /// Round a fresh ConFL optimum over the residual clients instead of ρ′.
  bool resolve = false;
  /// Also try the solution that pays every penalty and opens nothing.
  bool consider_all_penalty = true;
  double theta = kRoundingThreshold;
  CuttingPlaneOptions cutting{10000, 1e-9};
};

struct ConpflRun {
  int root = 0;
  double lp_value = 0.0;
  ThresholdResult threshold;
  FractionalCost star_cost;    // ρ* over the residual clients
  FractionalCost scaled_cost;  // ρ′ over the residual clients
  int scaled_violations = 0;   // separation failures of ρ′
  Solution solution;
  double cost = 0.0;
};

struct ConpflResult {
  Solution solution;
  std::vector<ConpflRun> runs;
  double min_lp_value = kInfinity;
};

/// Per-root LP, thresholding, scaling, rounding and assembly; returns the
/// cheapest assembled solution.
ConpflResult solve_conpfl(const Instance& inst, const ConpflOptions& options = {});

}  // namespace facloc
