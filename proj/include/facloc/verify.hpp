#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "facloc/instance.hpp"
#include "facloc/solution.hpp"

namespace facloc {

struct ValidationPolicy {
  double capacity_violation_gamma = 1.0;
  double cardinality_violation = 1.0;
  double tolerance = 1e-9;
};

enum class Violation {
  UnservedClient,
  ClosedAssignment,
  CapacityExceeded,
  CardinalityExceeded,
  DisconnectedOpenSet,
  PenaltyOverlap,
  CostMismatch,
};

/// Upper-case wire name, e.g. "CAPACITY_EXCEEDED".
std::string to_string(Violation v);

struct ValidationReport {
  bool ok = true;
  std::vector<std::pair<Violation, std::string>> violations;

  bool has(Violation v) const;
  void add(Violation v, std::string detail) {
    ok = false;
    violations.emplace_back(v, std::move(detail));
  }
};

/// Feasibility audit; findings go in the report, nothing throws.
ValidationReport validate(const Instance& inst, const Solution& sol, const ProblemKind& kind,
                          const ValidationPolicy& policy = {});

/// Per-run combining inequality. `scale` multiplies the right-hand side
/// (1 unless tree costs are scaled above service costs).
struct BoundCertificate {
  double combined_total = 0.0;
  double con_total = 0.0;
  double cap_total = 0.0;
  double scale = 1.0;
  double inequality_slack = 0.0;
  CostBreakdown combined;
  CostBreakdown con;
  CostBreakdown cap;
  // k-center variant
  bool bottleneck = false;
  double max_witness_edge = 0.0;
};

bool certify_bound(const BoundCertificate& cert, double tolerance = 1e-9);

nlohmann::json to_json(const CostBreakdown& cost);
nlohmann::json to_json(const BoundCertificate& cert);
nlohmann::json to_json(const ValidationReport& report);

}  // namespace facloc
