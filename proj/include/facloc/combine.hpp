#pragma once

#include <vector>

#include "facloc/instance.hpp"
#include "facloc/solution.hpp"
#include "facloc/verify.hpp"

namespace facloc {

/// Link from a capacitated-side facility i to the connected side through a
/// client j served by i on the capacitated side and by i' on the other.
struct WitnessEdge {
  int cap_facility = 0;
  int witness_client = 0;
  int con_facility = 0;
  double bound = 0.0;   // d(i, j) + d(j, i')
  double actual = 0.0;  // edge_cost(i, i')
  /// False when i already lies on the connected side's tree and needs no
  /// new edge.
  bool added = true;
};

struct Combined {
  Solution solution;
  BoundCertificate certificate;
  std::vector<WitnessEdge> witnesses;
};

/// Capacitated-side openings and assignment joined to the connected side's
/// tree by one witness edge per open facility. Throws
/// Error(InfeasibleInput) when either side fails validation.
Combined combine_connected_capacitated(const Solution& con, const Solution& cap, const Instance& inst,
                                       const ProblemKind& kind);
Combined combine_connected_capacitated(const Solution& con, const Solution& cap, const Instance& inst);

/// Penalty variant: a client pays if either side made it pay.
Combined combine_penalty(const Solution& con, const Solution& cap, const Instance& inst, const ProblemKind& kind);
Combined combine_penalty(const Solution& con, const Solution& cap, const Instance& inst);

/// k-center variant; the certificate bounds the bottleneck objective by
/// max(r_cap, longest con edge, r_cap + r_con). Throws
/// Error(CardinalityExceeded) when cap opens more than k.
Combined combine_kcenter(const Solution& con, const Solution& cap, const Instance& inst, int k);

enum class CompositionRule { ConPlusTwoCap, TwoCapPlusCon, Double };

/// alpha + 2 beta, 2 alpha + beta, or 2 alpha.
double compose_guarantee(double alpha, double beta, CompositionRule rule);

}  // namespace facloc
