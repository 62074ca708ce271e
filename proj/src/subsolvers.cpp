#include "facloc/subsolvers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "facloc/error.hpp"

namespace facloc {

namespace {

std::vector<int> all_clients(const Instance& inst) {
  std::vector<int> c(inst.num_clients());
  std::iota(c.begin(), c.end(), 0);
  return c;
}

std::vector<int> capacities(const Instance& inst) {
  std::vector<int> cap(inst.num_facilities());
  for (int i = 0; i < inst.num_facilities(); ++i)
    cap[i] = inst.facilities[i].capacity.value_or(std::max(1, inst.num_clients()));
  return cap;
}

Eigen::MatrixXd service_matrix(const Instance& inst) {
  return inst.dist.topRightCorner(inst.num_facilities(), inst.num_clients());
}

}  // namespace

// ---------------------------------------------------------------------------
// Local search

Solution solve_cfl_local_search(const Instance& inst, std::uint64_t seed, const LocalSearchOptions& options) {
  const int nf = inst.num_facilities();
  const int nc = inst.num_clients();
  const std::vector<int> cap = capacities(inst);
  const std::vector<int> clients = all_clients(inst);
  const Eigen::MatrixXd service = service_matrix(inst);
  if (std::accumulate(cap.begin(), cap.end(), 0LL) < nc)
    throw Error(ErrorCode::Infeasible, "total capacity below the number of clients");

  std::vector<int> order(nf);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::map<std::vector<char>, std::pair<double, AssignmentResult>> cache;
  const auto cost_of = [&](const std::vector<char>& mask) -> const std::pair<double, AssignmentResult>& {
    auto it = cache.find(mask);
    if (it != cache.end()) return it->second;
    std::vector<int> open;
    long long total_cap = 0;
    double facility = 0.0;
    for (int i = 0; i < nf; ++i)
      if (mask[i]) open.push_back(i), total_cap += cap[i], facility += inst.open_cost(i);
    std::pair<double, AssignmentResult> value{kInfinity, {}};
    if (total_cap >= nc && (nc == 0 || !open.empty())) {
      value.second = min_cost_assignment({service, open, cap, clients});
      value.first = facility + value.second.total();
    }
    return cache.emplace(mask, std::move(value)).first->second;
  };

  std::vector<char> current(nf, 0);
  long long covered = 0;
  for (int i : order) {
    if (covered >= nc && covered > 0) break;
    current[i] = 1;
    covered += cap[i];
  }
  double current_cost = cost_of(current).first;

  for (int accepted = 0; accepted < options.max_accepted_moves; ++accepted) {
    const double threshold = options.relative_improvement * current_cost;
    bool moved = false;
    const auto try_move = [&](std::vector<char> candidate) {
      const double c = cost_of(candidate).first;
      if (c < current_cost - threshold) {
        current = std::move(candidate);
        current_cost = c;
        moved = true;
      }
    };
    for (int i : order) {
      if (moved) break;
      std::vector<char> candidate = current;
      candidate[i] = !candidate[i];
      try_move(std::move(candidate));
    }
    for (int a : order) {
      if (moved || !current[a]) continue;
      for (int b : order) {
        if (moved) break;
        if (current[b]) continue;
        std::vector<char> candidate = current;
        candidate[a] = 0;
        candidate[b] = 1;
        try_move(std::move(candidate));
      }
    }
    if (!moved) break;
  }

  const AssignmentResult& best = cost_of(current).second;
  Solution sol = Solution::empty_for(inst);
  for (int i = 0; i < nf; ++i)
    if (current[i]) sol.open.insert(i);
  sol.assignment = best.facility_of;
  return sol;
}

// ---------------------------------------------------------------------------
// Rounding

std::optional<std::string> check_confl_feasible(const FractionalSolution& frac, const Instance& inst,
                                                std::span<const int> clients, int root, double tol) {
  const int nf = inst.num_facilities();
  if (frac.w.size() != nf || frac.x.rows() != nf || frac.x.cols() != inst.num_clients() || frac.y.rows() != nf ||
      frac.y.cols() != nf)
    return "fractional point has the wrong shape";
  if (root < 0 || root >= nf) return "root out of range";
  if (frac.w(root) < 1.0 - tol) return "root opening below 1";
  if (frac.w.minCoeff() < -tol || frac.w.maxCoeff() > 1.0 + tol) return "opening outside [0, 1]";
  if (nf > 1 && (frac.y.minCoeff() < -tol || frac.y.maxCoeff() > 1.0 + tol)) return "edge value outside [0, 1]";
  for (int j : clients) {
    if (std::abs(frac.x.col(j).sum() - 1.0) > tol) return "client " + inst.clients[j].id + " is not fully assigned";
    for (int i = 0; i < nf; ++i) {
      if (frac.x(i, j) < -tol) return "negative assignment";
      if (frac.x(i, j) > frac.w(i) + tol) return "assignment exceeds opening at " + inst.facilities[i].id;
    }
    const auto cuts = separate_cuts(nf, frac.x.col(j), frac.y, root, j, tol);
    if (!cuts.empty())
      return "connectivity inequality violated by " + std::to_string(cuts.front().violation) + " for client " +
             inst.clients[j].id;
  }
  return std::nullopt;
}

Solution round_confl(const FractionalSolution& frac, const Instance& inst, std::span<const int> residual_clients,
                     int root, double theta) {
  if (auto why = check_confl_feasible(frac, inst, residual_clients, root))
    throw Error(ErrorCode::NotFeasibleFractional, *why);
  const int nf = inst.num_facilities();
  constexpr double kSupport = 1e-9;

  Solution sol = Solution::empty_for(inst);
  sol.open.insert(root);
  for (int i = 0; i < nf; ++i)
    if (frac.w(i) >= theta) sol.open.insert(i);
  for (int j : residual_clients) {
    bool supported = false;
    int nearest = -1;
    for (int i = 0; i < nf; ++i) {
      if (frac.x(i, j) <= kSupport) continue;
      supported = supported || sol.open.count(i);
      if (nearest < 0 || inst.d(i, j) < inst.d(nearest, j)) nearest = i;
    }
    if (!supported) sol.open.insert(nearest);
  }
  for (int j : residual_clients) {
    int best = -1;
    for (int i : sol.open)
      if (best < 0 || inst.d(i, j) < inst.d(best, j)) best = i;
    sol.assignment[j] = best;
  }
  const std::vector<int> terminals(sol.open.begin(), sol.open.end());
  sol.steiner_edges = metric_closure_steiner(terminals, inst.edge_cost).edges;
  return sol;
}

// ---------------------------------------------------------------------------
// Connected FL over guessed roots

std::vector<ConflRun> solve_confl_runs(const Instance& inst, std::span<const int> residual_clients,
                                       const ConflOptions& options) {
  const ProblemKind kind = parse_kind("confl");
  std::vector<int> roots;
  if (options.root) {
    if (*options.root < 0 || *options.root >= inst.num_facilities())
      throw Error(ErrorCode::UnknownFacility, "root " + std::to_string(*options.root));
    roots.push_back(*options.root);
  } else {
    roots.resize(inst.num_facilities());
    std::iota(roots.begin(), roots.end(), 0);
  }
  CutPool pool;
  std::vector<ConflRun> runs;
  for (int v : roots) {
    const ConnectedLp lp = build_confl_lp(inst, residual_clients, v);
    const FractionalSolution frac = solve_with_cuts(lp, &pool, options.cutting);
    ConflRun run;
    run.root = v;
    run.lp_value = frac.objective;
    run.solution = round_confl(frac, inst, residual_clients, v);
    run.cost = evaluate(inst, run.solution, kind).total;
    runs.push_back(std::move(run));
  }
  return runs;
}

Solution solve_confl(const Instance& inst, std::span<const int> residual_clients, const ConflOptions& options) {
  auto runs = solve_confl_runs(inst, residual_clients, options);
  auto best = std::min_element(runs.begin(), runs.end(),
                               [](const ConflRun& a, const ConflRun& b) { return a.cost < b.cost; });
  return std::move(best->solution);
}

Solution solve_confl(const Instance& inst, const ConflOptions& options) {
  return solve_confl(inst, all_clients(inst), options);
}

// ---------------------------------------------------------------------------
// Exact oracles

bool within_exact_limits(const Instance& inst) {
  return inst.num_facilities() <= kExactMaxFacilities && inst.num_clients() <= kExactMaxClients;
}

std::pair<double, EdgeSet> bottleneck_steiner(const Instance& inst, std::span<const int> terminals) {
  if (terminals.size() <= 1) return {0.0, {}};
  std::vector<int> everyone(inst.num_facilities());
  std::iota(everyone.begin(), everyone.end(), 0);
  EdgeSet tree = prune_to_terminals(mst(everyone, inst.edge_cost).edges, terminals);
  double longest = 0.0;
  for (const auto& [a, b] : tree) longest = std::max(longest, inst.edge_cost(a, b));
  return {longest, std::move(tree)};
}

namespace {

std::vector<int> members(unsigned mask, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (mask >> i & 1u) out.push_back(i);
  return out;
}

/// Cheapest tree (sum of edge costs) containing each facility subset,
/// allowing any other facilities as Steiner nodes.
std::vector<TreeResult> exact_steiner_table(const Instance& inst) {
  const int nf = inst.num_facilities();
  const unsigned full = 1u << nf;
  std::vector<TreeResult> spanning(full);
  for (unsigned u = 0; u < full; ++u)
    if (std::popcount(u) >= 2) spanning[u] = mst(members(u, nf), inst.edge_cost);
  std::vector<TreeResult> best(full);
  for (unsigned mask = 0; mask < full; ++mask) {
    if (std::popcount(mask) < 2) continue;
    const unsigned rest = (full - 1) & ~mask;
    best[mask].weight = kInfinity;
    // Enumerate supersets by walking the subsets of the complement.
    for (unsigned extra = rest;; extra = (extra - 1) & rest) {
      const TreeResult& t = spanning[mask | extra];
      if (t.weight < best[mask].weight - 1e-12 ||
          (std::abs(t.weight - best[mask].weight) <= 1e-12 && t.edges.size() < best[mask].edges.size()))
        best[mask] = t;
      if (extra == 0) break;
    }
  }
  return best;
}

}  // namespace

Solution solve_exact(const Instance& inst, const ProblemKind& kind, const ExactOptions& options) {
  const int nf = inst.num_facilities();
  const int nc = inst.num_clients();
  if (!within_exact_limits(inst))
    throw Error(ErrorCode::TooLarge, std::to_string(nf) + " facilities / " + std::to_string(nc) +
                                         " clients exceed the exhaustive limits");
  if (kind.capacitated && !inst.all_capacitated()) throw Error(ErrorCode::MissingCapacity, "capacitated kind");
  if (kind.prize_collecting && !inst.all_penalized()) throw Error(ErrorCode::MissingPenalty, "prize-collecting kind");
  if (kind.prize_collecting && kind.is_center())
    throw Error(ErrorCode::InvalidConfig, "prize-collecting k-center is not supported");
  int k = nf;
  if (kind.has_cardinality()) {
    const auto given = options.k ? options.k : inst.k;
    if (!given) throw Error(ErrorCode::MissingCardinality, to_string(kind) + " needs k");
    if (*given < 0) throw Error(ErrorCode::InvalidConfig, "k must be nonnegative");
    k = std::min(*given, nf);
  }

  std::vector<int> cap = capacities(inst);
  if (!kind.capacitated) std::fill(cap.begin(), cap.end(), std::max(1, nc));
  const std::vector<int> clients = all_clients(inst);
  const Eigen::MatrixXd service = service_matrix(inst);
  std::vector<double> penalty;
  if (kind.prize_collecting)
    for (int j = 0; j < nc; ++j) penalty.push_back(inst.penalty(j));
  std::vector<TreeResult> steiner;
  if (kind.connected && !kind.is_center()) steiner = exact_steiner_table(inst);

  std::optional<Solution> best;
  double best_value = kInfinity;
  for (unsigned mask = 0; mask < (1u << nf); ++mask) {
    if (std::popcount(mask) > k) continue;
    const std::vector<int> open = members(mask, nf);
    if (open.empty() && nc > 0 && (!kind.prize_collecting || options.require_open)) continue;
    long long total_cap = 0;
    for (int i : open) total_cap += cap[i];
    if (!kind.prize_collecting && total_cap < nc) continue;

    AssignmentResult assign;
    if (kind.is_center()) {
      assign = bottleneck_assignment({service, open, cap, clients}).second;
    } else {
      assign = min_cost_assignment({service, open, cap, clients, penalty});
    }
    Solution sol = Solution::empty_for(inst);
    sol.open.insert(open.begin(), open.end());
    sol.assignment = assign.facility_of;
    sol.penalty_set.insert(assign.penalized.begin(), assign.penalized.end());
    if (kind.connected) {
      if (kind.is_center())
        sol.steiner_edges = bottleneck_steiner(inst, open).second;
      else if (open.size() >= 2)
        sol.steiner_edges = steiner[mask].edges;
    }
    const double value = objective_value(evaluate(inst, sol, kind), kind);
    if (value < best_value - 1e-12) {
      best_value = value;
      best = std::move(sol);
    }
  }
  if (!best) throw Error(ErrorCode::Infeasible, "no open set is feasible for " + to_string(kind));
  best->kind = to_string(kind);
  return std::move(*best);
}

Solution solve_ckc_exact(const Instance& inst, int k) {
  ExactOptions options;
  options.k = k;
  return solve_exact(inst, parse_kind("ckc"), options);
}

Solution solve_conkc_exact(const Instance& inst, int k) {
  ExactOptions options;
  options.k = k;
  return solve_exact(inst, parse_kind("conkc"), options);
}

}  // namespace facloc
