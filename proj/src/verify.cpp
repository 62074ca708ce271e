#include "facloc/verify.hpp"

#include <algorithm>
#include <cmath>

#include "facloc/error.hpp"

namespace facloc {

std::string to_string(Violation v) {
  switch (v) {
    case Violation::UnservedClient: return "UNSERVED_CLIENT";
    case Violation::ClosedAssignment: return "CLOSED_ASSIGNMENT";
    case Violation::CapacityExceeded: return "CAPACITY_EXCEEDED";
    case Violation::CardinalityExceeded: return "CARDINALITY_EXCEEDED";
    case Violation::DisconnectedOpenSet: return "DISCONNECTED_OPEN_SET";
    case Violation::PenaltyOverlap: return "PENALTY_OVERLAP";
    case Violation::CostMismatch: return "COST_MISMATCH";
  }
  return "UNKNOWN";
}

bool ValidationReport::has(Violation v) const {
  return std::any_of(violations.begin(), violations.end(), [v](const auto& p) { return p.first == v; });
}

ValidationReport validate(const Instance& inst, const Solution& sol, const ProblemKind& kind,
                          const ValidationPolicy& policy) {
  ValidationReport report;
  const int nf = inst.num_facilities();
  const int nc = inst.num_clients();
  if (static_cast<int>(sol.assignment.size()) != nc) {
    report.add(Violation::UnservedClient, "assignment has " + std::to_string(sol.assignment.size()) + " entries for " +
                                              std::to_string(nc) + " clients");
    return report;
  }

  for (int j = 0; j < nc; ++j) {
    const int i = sol.assignment[j];
    const bool penalized = sol.penalty_set.count(j) > 0;
    const std::string& id = inst.clients[j].id;
    if (i >= 0 && penalized) {
      report.add(Violation::PenaltyOverlap, "client " + id + " is both assigned and penalized");
    } else if (i < 0 && !(penalized && kind.prize_collecting)) {
      report.add(Violation::UnservedClient, "client " + id + " is not served");
    }
    if (i >= 0 && !sol.open.count(i)) {
      const std::string target = i < nf ? inst.facilities[i].id : std::to_string(i);
      report.add(Violation::ClosedAssignment, "client " + id + " assigned to closed facility " + target);
    }
  }
  for (int j : sol.penalty_set)
    if (j < 0 || j >= nc) report.add(Violation::PenaltyOverlap, "penalty set names unknown client " + std::to_string(j));

  if (kind.capacitated) {
    const auto load = sol.load(nf);
    for (int i = 0; i < nf; ++i) {
      const auto cap = inst.facilities[i].capacity;
      if (!cap) continue;
      if (load[i] > policy.capacity_violation_gamma * *cap + policy.tolerance)
        report.add(Violation::CapacityExceeded, "facility " + inst.facilities[i].id + " serves " +
                                                    std::to_string(load[i]) + " > " + std::to_string(*cap));
    }
  }

  if (kind.has_cardinality() && inst.k) {
    const double limit = policy.cardinality_violation * *inst.k;
    if (sol.open.size() > limit + policy.tolerance)
      report.add(Violation::CardinalityExceeded,
                 std::to_string(sol.open.size()) + " open facilities, k = " + std::to_string(*inst.k));
  }

  if (kind.connected && sol.open.size() > 1) {
    const std::vector<int> nodes(sol.open.begin(), sol.open.end());
    const Connectivity conn = is_connected(nodes, sol.steiner_edges);
    if (!conn.connected)
      report.add(Violation::DisconnectedOpenSet,
                 "open facilities fall into " + std::to_string(conn.components.size()) + " components");
  }

  if (sol.claimed_total) {
    try {
      const double actual = objective_value(evaluate(inst, sol, kind), kind);
      if (std::abs(actual - *sol.claimed_total) > policy.tolerance * std::max(1.0, std::abs(actual)))
        report.add(Violation::CostMismatch,
                   "claimed " + std::to_string(*sol.claimed_total) + ", recomputed " + std::to_string(actual));
    } catch (const Error& e) {
      report.add(Violation::CostMismatch, e.what());
    }
  }
  return report;
}

bool certify_bound(const BoundCertificate& cert, double tolerance) { return cert.inequality_slack >= -tolerance; }

nlohmann::json to_json(const CostBreakdown& c) {
  return {{"facility", c.facility}, {"service", c.service},     {"connection", c.connection},
          {"penalty", c.penalty},   {"total", c.total},         {"radius", c.radius},
          {"longest_edge", c.longest_edge}};
}

nlohmann::json to_json(const BoundCertificate& cert) {
  nlohmann::json j{{"combined_total", cert.combined_total},
                   {"con_total", cert.con_total},
                   {"cap_total", cert.cap_total},
                   {"scale", cert.scale},
                   {"inequality_slack", cert.inequality_slack},
                   {"combined", to_json(cert.combined)},
                   {"con", to_json(cert.con)},
                   {"cap", to_json(cert.cap)}};
  if (cert.bottleneck) j["max_witness_edge"] = cert.max_witness_edge;
  return j;
}

nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& [code, detail] : report.violations) v.push_back({{"code", to_string(code)}, {"detail", detail}});
  return {{"ok", report.ok}, {"violations", v}};
}

}  // namespace facloc
