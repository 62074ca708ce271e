#include "facloc/combine.hpp"

#include <algorithm>

#include "facloc/error.hpp"

namespace facloc {

namespace {

void require_valid(const Instance& inst, const Solution& sol, const ProblemKind& kind, const char* side) {
  const ValidationReport report = validate(inst, sol, kind);
  if (!report.ok)
    throw Error(ErrorCode::InfeasibleInput, std::string(side) + " solution is not feasible for " + to_string(kind) +
                                                ": " + to_string(report.violations.front().first) + " " +
                                                report.violations.front().second);
}

ProblemKind con_side(ProblemKind kind) {
  kind.capacitated = false;
  kind.connected = true;
  return kind;
}

ProblemKind cap_side(ProblemKind kind) {
  kind.capacitated = true;
  kind.connected = false;
  return kind;
}

/// Shared construction. Clients in `penalties` leave the capacitated
/// assignment; every other client must be served by both inputs.
Combined join(const Solution& con, const Solution& cap, const Instance& inst, const std::set<int>& penalties) {
  const int nf = inst.num_facilities();
  Combined out;
  Solution& sol = out.solution;
  sol = Solution::empty_for(inst);
  sol.penalty_set = penalties;
  for (int j = 0; j < inst.num_clients(); ++j)
    if (!penalties.count(j)) sol.assignment[j] = cap.assignment[j];
  const std::vector<int> load = sol.load(nf);
  for (int i : cap.open)
    if (load[i] > 0) sol.open.insert(i);

  std::set<int> con_nodes(con.open.begin(), con.open.end());
  for (const auto& [a, b] : con.steiner_edges) con_nodes.insert(a), con_nodes.insert(b);
  EdgeSet edges = con.steiner_edges;
  for (int i : sol.open) {
    WitnessEdge w;
    w.cap_facility = i;
    w.witness_client = -1;
    for (const int j : sol.clients_of(i)) {
      const double bound = inst.d(i, j) + inst.d(con.assignment[j], j);
      if (w.witness_client < 0 || bound < w.bound) {
        w.witness_client = j;
        w.bound = bound;
      }
    }
    w.con_facility = con.assignment[w.witness_client];
    w.actual = inst.edge_cost(i, w.con_facility);
    if (w.actual > w.bound + 1e-9)
      throw Error(ErrorCode::InfeasibleInput, "edge cost exceeds the witness path; instance is not metric");
    w.added = !con_nodes.count(i);
    if (w.added) edges.insert(make_edge(i, w.con_facility));
    out.witnesses.push_back(w);
  }
  // Connected-side facilities stay as pass-through nodes; branches leading
  // only to them are dropped.
  const std::vector<int> terminals(sol.open.begin(), sol.open.end());
  sol.steiner_edges = prune_to_terminals(std::move(edges), terminals);
  return out;
}

void fill_certificate(Combined& c, const Instance& inst, const Solution& con, const Solution& cap,
                      const ProblemKind& kind) {
  BoundCertificate& cert = c.certificate;
  cert.combined = evaluate(inst, c.solution, kind);
  cert.con = evaluate(inst, con, con_side(kind));
  cert.cap = evaluate(inst, cap, cap_side(kind));
  cert.combined_total = cert.combined.total;
  cert.con_total = cert.con.total;
  cert.cap_total = cert.cap.total;
  // Witness edges are paid at the connection scale.
  cert.scale = std::max(1.0, inst.connection_scale);
  cert.inequality_slack = cert.scale * (cert.con_total + 2.0 * cert.cap_total) - cert.combined_total;
  c.solution.kind = to_string(kind);
  c.solution.claimed_total = cert.combined_total;
}

}  // namespace

Combined combine_connected_capacitated(const Solution& con, const Solution& cap, const Instance& inst,
                                       const ProblemKind& kind) {
  require_valid(inst, con, con_side(kind), "connected-side");
  require_valid(inst, cap, cap_side(kind), "capacitated-side");
  Combined c = join(con, cap, inst, {});
  fill_certificate(c, inst, con, cap, kind);
  return c;
}

Combined combine_connected_capacitated(const Solution& con, const Solution& cap, const Instance& inst) {
  return combine_connected_capacitated(con, cap, inst, parse_kind("concfl"));
}

Combined combine_penalty(const Solution& con, const Solution& cap, const Instance& inst, const ProblemKind& kind) {
  require_valid(inst, con, con_side(kind), "connected-side");
  require_valid(inst, cap, cap_side(kind), "capacitated-side");
  std::set<int> penalties = con.penalty_set;
  penalties.insert(cap.penalty_set.begin(), cap.penalty_set.end());
  Combined c = join(con, cap, inst, penalties);
  fill_certificate(c, inst, con, cap, kind);
  return c;
}

Combined combine_penalty(const Solution& con, const Solution& cap, const Instance& inst) {
  return combine_penalty(con, cap, inst, parse_kind("concpfl"));
}

Combined combine_kcenter(const Solution& con, const Solution& cap, const Instance& inst, int k) {
  if (static_cast<int>(cap.open.size()) > k || static_cast<int>(con.open.size()) > k)
    throw Error(ErrorCode::CardinalityExceeded, "an input opens more than k = " + std::to_string(k));
  Instance with_k = inst;
  with_k.k = k;
  const ProblemKind kind = parse_kind("conckc");
  require_valid(with_k, con, con_side(kind), "connected-side");
  require_valid(with_k, cap, cap_side(kind), "capacitated-side");

  Combined c = join(con, cap, inst, {});
  BoundCertificate& cert = c.certificate;
  cert.bottleneck = true;
  cert.combined = evaluate(inst, c.solution, kind);
  cert.con = evaluate(inst, con, con_side(kind));
  cert.cap = evaluate(inst, cap, cap_side(kind));
  cert.combined_total = objective_value(cert.combined, kind);
  cert.con_total = objective_value(cert.con, con_side(kind));
  cert.cap_total = objective_value(cert.cap, cap_side(kind));
  for (const auto& w : c.witnesses)
    if (w.added) cert.max_witness_edge = std::max(cert.max_witness_edge, w.actual);
  const double rhs = std::max({cert.cap.radius, cert.con.longest_edge, cert.cap.radius + cert.con.radius});
  cert.inequality_slack = rhs - cert.combined_total;
  c.solution.kind = to_string(kind);
  c.solution.claimed_total = cert.combined_total;
  return c;
}

double compose_guarantee(double alpha, double beta, CompositionRule rule) {
  switch (rule) {
    case CompositionRule::ConPlusTwoCap: return alpha + 2.0 * beta;
    case CompositionRule::TwoCapPlusCon: return 2.0 * alpha + beta;
    case CompositionRule::Double: return 2.0 * alpha;
  }
  return 0.0;
}

}  // namespace facloc
