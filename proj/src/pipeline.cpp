#include "facloc/pipeline.hpp"

#include <algorithm>
#include <numeric>

#include "facloc/error.hpp"
#include "facloc/reductions.hpp"
#include "facloc/subsolvers.hpp"

namespace facloc {

namespace {

struct Part {
  Solution solution;
  std::string name;
  std::optional<double> lp_value;
};

ProblemKind without_capacities(ProblemKind k) {
  k.capacitated = false;
  return k;
}

ProblemKind without_connectivity(ProblemKind k) {
  k.connected = false;
  return k;
}

Part connected_part(const Instance& view, const ProblemKind& kind, const PipelineOptions& opt) {
  if (opt.exact || kind.has_cardinality()) return {solve_exact(view, kind), "exact_" + to_string(kind), {}};
  if (kind.prize_collecting) {
    ConpflOptions o;
    o.root = opt.root;
    ConpflResult r = solve_conpfl(view, o);
    return {std::move(r.solution), "conpfl_lp_rounding", r.min_lp_value};
  }
  ConflOptions o;
  o.root = opt.root;
  std::vector<int> clients(view.num_clients());
  std::iota(clients.begin(), clients.end(), 0);
  auto runs = solve_confl_runs(view, clients, o);
  auto best = std::min_element(runs.begin(), runs.end(),
                               [](const ConflRun& a, const ConflRun& b) { return a.cost < b.cost; });
  double lp = kInfinity;
  for (const auto& r : runs) lp = std::min(lp, r.lp_value);
  return {std::move(best->solution), "confl_lp_rounding", lp};
}

Part capacitated_part(const Instance& view, const ProblemKind& kind, const PipelineOptions& opt) {
  if (opt.exact || kind.has_cardinality()) return {solve_exact(view, kind), "exact_" + to_string(kind), {}};
  // Uncapacitated kinds ignore any capacities the instance carries.
  const Instance free = kind.capacitated ? view : drop_capacities(view);
  if (kind.prize_collecting) return {solve_cpfl(free, opt.seed), "cpfl_reduction_local_search", {}};
  return {solve_cfl_local_search(free, opt.seed), "cfl_local_search", {}};
}

}  // namespace

Solution solve_cpfl(const Instance& inst, std::uint64_t seed) {
  Instance capped = inst;
  for (auto& f : capped.facilities)
    if (!f.capacity) f.capacity = std::max(1, inst.num_clients());
  const CpflReduction red = cpfl_to_cfl(capped);
  const Solution reduced = solve_cfl_local_search(red.reduced, seed);
  return lift_cfl_solution(reduced, red.reduced, red.map);
}

PipelineResult solve_kind(const Instance& inst, const ProblemKind& kind, const PipelineOptions& options) {
  require_fields(inst, kind);
  if (kind.is_center() && kind.prize_collecting)
    throw Error(ErrorCode::InvalidConfig, "prize-collecting k-center is not supported");

  PipelineResult result;
  if (kind.connected && kind.capacitated) {
    const Instance con_view = drop_capacities(inst);
    const Instance cap_view = drop_connectivity(inst);
    Part con, cap;
    if (kind.is_center()) {
      con = {solve_conkc_exact(con_view, *inst.k), "exact_conkc", {}};
      cap = {solve_ckc_exact(cap_view, *inst.k), "exact_ckc", {}};
    } else {
      con = connected_part(con_view, without_capacities(kind), options);
      cap = capacitated_part(cap_view, without_connectivity(kind), options);
    }
    Combined c = kind.is_center()         ? combine_kcenter(con.solution, cap.solution, inst, *inst.k)
                 : kind.prize_collecting ? combine_penalty(con.solution, cap.solution, inst, kind)
                                         : combine_connected_capacitated(con.solution, cap.solution, inst, kind);
    result.solution = std::move(c.solution);
    result.certificate = c.certificate;
    result.pipeline = con.name + "+" + cap.name + "+combine";
    result.lp_value = con.lp_value;
  } else if (kind.is_center()) {
    result.solution = solve_exact(inst, kind);
    result.pipeline = "exact_" + to_string(kind);
  } else {
    Part p = kind.connected ? connected_part(inst, kind, options) : capacitated_part(inst, kind, options);
    result.solution = std::move(p.solution);
    result.pipeline = p.name;
    result.lp_value = p.lp_value;
  }
  result.solution.kind = to_string(kind);
  result.solution.claimed_total = objective_value(evaluate(inst, result.solution, kind), kind);
  return result;
}

}  // namespace facloc
