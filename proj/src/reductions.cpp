#include "facloc/reductions.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "facloc/error.hpp"
#include "facloc/verify.hpp"

namespace facloc {

CpflReduction cpfl_to_cfl(const Instance& inst) {
  if (!inst.all_penalized()) throw Error(ErrorCode::MissingPenalty, "every client needs a penalty");
  if (!inst.all_capacitated()) throw Error(ErrorCode::MissingCapacity, "every facility needs a capacity");
  const int nf = inst.num_facilities();
  const int nc = inst.num_clients();
  const int n = nf + nc;

  Instance out;
  out.name = inst.name + "-cfl";
  out.connection_scale = inst.connection_scale;
  out.k = inst.k;
  out.connectivity_dropped = inst.connectivity_dropped;
  out.facilities = inst.facilities;
  std::set<std::string> ids;
  for (const auto& f : inst.facilities) ids.insert(f.id);
  for (const auto& c : inst.clients) ids.insert(c.id);
  for (int j = 0; j < nc; ++j) {
    std::string id = "dummy:" + inst.clients[j].id;
    while (ids.count(id)) id += "'";
    ids.insert(id);
    out.facilities.push_back({id, *inst.clients[j].penalty, 1});
  }
  for (const auto& c : inst.clients) out.clients.push_back({c.id, std::nullopt});

  // Node order: original facilities, dummies, clients. A dummy is a copy
  // of its client's node.
  std::vector<int> source(n + nc);
  for (int i = 0; i < nf; ++i) source[i] = i;
  for (int j = 0; j < nc; ++j) source[nf + j] = source[n + j] = nf + j;
  out.dist.resize(n + nc, n + nc);
  for (int a = 0; a < n + nc; ++a)
    for (int b = 0; b < n + nc; ++b) out.dist(a, b) = inst.dist(source[a], source[b]);
  out.edge_cost.resize(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      out.edge_cost(a, b) = (a < nf && b < nf) ? inst.edge_cost(a, b) : out.dist(a, b);
  if (inst.points) {
    Eigen::MatrixX2d pts(n + nc, 2);
    for (int a = 0; a < n + nc; ++a) pts.row(a) = inst.points->row(source[a]);
    out.points = pts;
  }
  validate_instance(out);
  return {std::move(out), DummyMap{&inst, nf}};
}

Solution normalize_dummies(const Solution& reduced_solution, const DummyMap& map) {
  Solution sol = reduced_solution;
  const int nc = static_cast<int>(sol.assignment.size());
  for (int j = 0; j < nc; ++j) {
    const int dummy = map.dummy_of(j);
    if (!sol.open.count(dummy) || sol.assignment[j] == dummy) continue;
    const int previous = sol.assignment[j];
    for (int other = 0; other < nc; ++other) {
      if (other != j && sol.assignment[other] == dummy) {
        // d(previous, other) <= d(previous, j) + d(j, other) and d(j, dummy) = 0.
        sol.assignment[other] = previous;
        break;
      }
    }
    sol.assignment[j] = dummy;
  }
  return sol;
}

Solution lift_cfl_solution(const Solution& reduced_solution, const Instance& reduced, const DummyMap& map) {
  if (!map.original) throw Error(ErrorCode::InvalidSolution, "dummy map has no original instance");
  const ValidationReport report = validate(reduced, reduced_solution, parse_kind("cfl"));
  if (!report.ok)
    throw Error(ErrorCode::InvalidSolution, to_string(report.violations.front().first) + ": " +
                                                report.violations.front().second);
  const Solution normalized = normalize_dummies(reduced_solution, map);
  Solution lifted = Solution::empty_for(*map.original);
  for (int i : normalized.open) {
    if (map.is_dummy(i))
      lifted.penalty_set.insert(map.client_of(i));
    else
      lifted.open.insert(i);
  }
  for (int j = 0; j < static_cast<int>(normalized.assignment.size()); ++j)
    if (!map.is_dummy(normalized.assignment[j])) lifted.assignment[j] = normalized.assignment[j];
  for (const auto& e : normalized.steiner_edges)
    if (!map.is_dummy(e.first) && !map.is_dummy(e.second)) lifted.steiner_edges.insert(e);
  return lifted;
}

ThresholdResult threshold_penalties(const Instance& inst, const FractionalSolution& rho_star) {
  ThresholdResult r;
  for (int j : rho_star.clients) {
    const double z = rho_star.has_z() ? rho_star.z(j) : 0.0;
    if (z >= kPenaltyThreshold) {
      r.penalized.push_back(j);
      r.penalty_paid += inst.penalty(j);
      r.lp_penalty_mass += inst.penalty(j) * z;
    } else {
      r.residual.push_back(j);
    }
  }
  return r;
}

FractionalSolution scale_fractional(const FractionalSolution& rho_star, std::span<const int> residual) {
  const int nf = static_cast<int>(rho_star.w.size());
  FractionalSolution out;
  out.root = rho_star.root;
  out.clients.assign(residual.begin(), residual.end());
  std::sort(out.clients.begin(), out.clients.end());
  out.x = Eigen::MatrixXd::Zero(rho_star.x.rows(), rho_star.x.cols());
  Eigen::VectorXd multiplier = Eigen::VectorXd::Zero(nf);
  for (int j : out.clients) {
    const double served = rho_star.x.col(j).sum();
    if (served < kPenaltyThreshold - 1e-9)
      throw Error(ErrorCode::ScalePreconditionViolated,
                  "client " + std::to_string(j) + " is served only " + std::to_string(served));
    out.x.col(j) = rho_star.x.col(j) / served;
    for (int i = 0; i < nf; ++i)
      if (rho_star.x(i, j) > 0.0) multiplier(i) = std::max(multiplier(i), 1.0 / served);
  }
  out.w = rho_star.w;
  for (int i = 0; i < nf; ++i)
    if (multiplier(i) > 0.0) out.w(i) = std::min(1.0, rho_star.w(i) * multiplier(i));
  out.y = (2.0 * rho_star.y).cwiseMin(1.0);
  return out;
}

Solution assemble_conpfl(const Solution& confl_sol, const ThresholdResult& thr) {
  Solution sol = confl_sol;
  for (int j : thr.penalized) {
    if (j < static_cast<int>(sol.assignment.size()) && sol.assignment[j] >= 0)
      throw Error(ErrorCode::Overlap, "client " + std::to_string(j) + " is assigned and in C_p");
    sol.penalty_set.insert(j);
  }
  return sol;
}

ConpflResult solve_conpfl(const Instance& inst, const ConpflOptions& options) {
  if (!inst.all_penalized()) throw Error(ErrorCode::MissingPenalty, "every client needs a penalty");
  const ProblemKind kind = parse_kind("conpfl");
  std::vector<int> roots;
  if (options.root) {
    if (*options.root < 0 || *options.root >= inst.num_facilities())
      throw Error(ErrorCode::UnknownFacility, "root " + std::to_string(*options.root));
    roots.push_back(*options.root);
  } else {
    roots.resize(inst.num_facilities());
    std::iota(roots.begin(), roots.end(), 0);
  }

  ConpflResult result;
  CutPool pool, residual_pool;
  for (int v : roots) {
    const FractionalSolution star = solve_with_cuts(build_conpfl_lp(inst, v), &pool, options.cutting);
    ConpflRun run;
    run.root = v;
    run.lp_value = star.objective;
    run.threshold = threshold_penalties(inst, star);
    const auto& residual = run.threshold.residual;
    const FractionalSolution scaled = scale_fractional(star, residual);
    run.star_cost = fractional_cost(inst, star, residual);
    run.scaled_cost = fractional_cost(inst, scaled, residual);
    run.scaled_violations = static_cast<int>(separation_sweep(scaled, residual).size());

    Solution confl;
    if (options.resolve) {
      const FractionalSolution fresh =
          solve_with_cuts(build_confl_lp(inst, residual, v), &residual_pool, options.cutting);
      confl = round_confl(fresh, inst, residual, v, options.theta);
    } else {
      confl = round_confl(scaled, inst, residual, v, options.theta);
    }
    run.solution = assemble_conpfl(confl, run.threshold);
    run.cost = evaluate(inst, run.solution, kind).total;
    result.min_lp_value = std::min(result.min_lp_value, run.lp_value);
    result.runs.push_back(std::move(run));
  }

  auto best = std::min_element(result.runs.begin(), result.runs.end(),
                               [](const ConpflRun& a, const ConpflRun& b) { return a.cost < b.cost; });
  result.solution = best->solution;
  if (options.consider_all_penalty) {
    Solution pay_all = Solution::empty_for(inst);
    for (int j = 0; j < inst.num_clients(); ++j) pay_all.penalty_set.insert(j);
    if (evaluate(inst, pay_all, kind).total < best->cost) result.solution = std::move(pay_all);
  }
  result.solution.kind = to_string(kind);
  return result;
}

}  // namespace facloc
