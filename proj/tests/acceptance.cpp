// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#include "facloc/cli.hpp"
#include "facloc/combine.hpp"
#include "facloc/lp.hpp"
#include "facloc/reductions.hpp"
#include "facloc/subsolvers.hpp"
#include "facloc/verify.hpp"

using namespace facloc;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kSlackTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kLpTol = 1e-7;
constexpr double kSweepTol = 1e-7;
constexpr double kLiftTol = 1e-12;
constexpr double kRuntimeLimitSec = 120.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const cli::BenchResult& bench() {
  static const cli::BenchResult result = [] {
    cli::BenchConfig cfg;
    return cli::run_bench(cfg);
  }();
  return result;
}

double bench_seconds = 0.0;

std::vector<const cli::RunRecord*> records_of(const std::string& kind, const std::string& profile = "") {
  std::vector<const cli::RunRecord*> out;
  for (const auto& r : bench().records)
    if (r.kind == kind && (profile.empty() || r.capacity_profile == profile)) out.push_back(&r);
  return out;
}

std::vector<int> all_clients(const Instance& inst) {
  std::vector<int> c(inst.num_clients());
  std::iota(c.begin(), c.end(), 0);
  return c;
}

Outcome combining_inequality() {
  Outcome o;
  const auto recs = records_of("concfl");
  double worst = kInfinity;
  for (const auto* r : recs) {
    if (!r->certificate) {
      o.pass = false;
      o.detail = r->instance + " has no certificate; ";
      continue;
    }
    worst = std::min(worst, r->certificate->inequality_slack);
    if (r->certificate->inequality_slack < -kSlackTol) o.pass = false;
  }
  if (recs.size() != 200) o.pass = false;
  if (bench_seconds > kRuntimeLimitSec) o.pass = false;
  o.detail += std::to_string(recs.size()) + " runs, min slack " + fmt("%.6g", worst) + ", bench time " +
              fmt("%.1fs", bench_seconds);
  return o;
}

Outcome factor_gates() {
  struct G {
    const char* kind;
    const char* profile;
    double limit;
  };
  const G gates[] = {{"concfl", "uniform", 9.19}, {"concfl", "nonuniform", 13.19}, {"concpfl", "", 31.32},
                     {"conckc", "uniform", 18.0}};
  Outcome o;
  for (const G& g : gates) {
    double worst = 0.0;
    int n = 0;
    for (const auto* r : records_of(g.kind, g.profile)) {
      if (!r->ratio) continue;
      ++n;
      worst = std::max(worst, *r->ratio);
      if (*r->ratio > g.limit + kCostTol) o.pass = false;
    }
    if (n == 0) o.pass = false;
    o.detail += std::string(g.kind) + (*g.profile ? std::string("/") + g.profile : "") + " max " +
                fmt("%.4f", worst) + " (" + std::to_string(n) + ") ";
  }
  return o;
}

struct LpRunChecks {
  int instances = 0;
  int runs = 0;
  int sweep_violations = 0;
  int linear_violations = 0;
  int component_violations = 0;
  int penalty_violations = 0;
  double worst_component_ratio = 0.0;
};

// Re-derives ρ*, thresholding and ρ′ per root and checks them from scratch.
const LpRunChecks& conpfl_lp_runs() {
  static const LpRunChecks checks = [] {
    LpRunChecks c;
    GeneratorConfig cfg;
    cfg.capacitated = false;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const Instance inst = generate_euclidean(1 + static_cast<int>(s % 6), 3 + static_cast<int>(s % 8), 7000 + s, cfg);
      ++c.instances;
      for (int v = 0; v < inst.num_facilities(); ++v) {
        ++c.runs;
        const FractionalSolution star = solve_with_cuts(build_conpfl_lp(inst, v), nullptr, {10000, 1e-9});
        const ThresholdResult thr = threshold_penalties(inst, star);

        double paid = 0.0, mass = 0.0;
        for (int j : thr.penalized) {
          paid += *inst.clients[j].penalty;
          mass += *inst.clients[j].penalty * star.z(j);
        }
        if (paid > 2.0 * mass + kCostTol) ++c.penalty_violations;
        if (thr.residual.empty()) continue;

        const FractionalSolution scaled = scale_fractional(star, thr.residual);
        c.sweep_violations += static_cast<int>(separation_sweep(scaled, thr.residual, kSweepTol).size());
        if (std::abs(scaled.w(v) - 1.0) > kCostTol) ++c.linear_violations;
        for (int j : thr.residual) {
          if (std::abs(scaled.x.col(j).sum() - 1.0) > kCostTol) ++c.linear_violations;
          for (int i = 0; i < inst.num_facilities(); ++i)
            if (scaled.x(i, j) > scaled.w(i) + kCostTol) ++c.linear_violations;
        }
        if (scaled.y.maxCoeff() > 1.0 + kCostTol || scaled.w.maxCoeff() > 1.0 + kCostTol) ++c.linear_violations;

        const FractionalCost a = fractional_cost(inst, star, thr.residual);
        const FractionalCost b = fractional_cost(inst, scaled, thr.residual);
        const std::pair<double, double> parts[] = {
            {a.facility, b.facility}, {a.service, b.service}, {a.connection, b.connection}};
        for (const auto& [before, after] : parts) {
          if (after > 2.0 * before + kCostTol) ++c.component_violations;
          if (before > 1e-12) c.worst_component_ratio = std::max(c.worst_component_ratio, after / before);
        }
      }
    }
    return c;
  }();
  return checks;
}

Outcome scaled_solution() {
  const LpRunChecks& c = conpfl_lp_runs();
  Outcome o;
  o.pass = c.sweep_violations == 0 && c.linear_violations == 0 && c.component_violations == 0 && c.instances == 100;
  o.detail = std::to_string(c.instances) + " instances, " + std::to_string(c.runs) + " roots, " +
             std::to_string(c.sweep_violations) + " cut / " + std::to_string(c.linear_violations) +
             " linear / " + std::to_string(c.component_violations) + " component violations, worst component x" +
             fmt("%.4f", c.worst_component_ratio);
  return o;
}

Outcome penalty_threshold() {
  const LpRunChecks& c = conpfl_lp_runs();
  Outcome o;
  int runs = c.runs, bad = c.penalty_violations;
  // Same bound on the ConPFL pipeline runs over the corpus.
  cli::CorpusConfig cfg;
  for (const Instance& inst : cli::make_corpus(cfg)) {
    for (const ConpflRun& run : solve_conpfl(drop_capacities(inst)).runs) {
      ++runs;
      if (run.threshold.penalty_paid > 2.0 * run.threshold.lp_penalty_mass + kCostTol) ++bad;
    }
  }
  o.pass = bad == 0;
  o.detail = std::to_string(runs) + " LP runs, " + std::to_string(bad) + " violations";
  return o;
}

Outcome cpfl_reduction() {
  Outcome o;
  double worst_opt = 0.0, worst_lift = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Instance inst = generate_euclidean(3, 4, 9000 + s);
    const CpflReduction red = cpfl_to_cfl(inst);
    const Solution cfl = solve_exact(red.reduced, parse_kind("cfl"));
    const double reduced_cost = evaluate(red.reduced, cfl, parse_kind("cfl")).total;
    const double direct = evaluate(inst, solve_exact(inst, parse_kind("cpfl")), parse_kind("cpfl")).total;
    const Solution lifted = lift_cfl_solution(cfl, red.reduced, red.map);
    const double lifted_cost = evaluate(inst, lifted, parse_kind("cpfl")).total;
    worst_opt = std::max(worst_opt, std::abs(reduced_cost - direct));
    worst_lift = std::max(worst_lift, std::abs(lifted_cost - reduced_cost));
    if (!validate(inst, lifted, parse_kind("cpfl")).ok) o.pass = false;
  }
  if (worst_opt > kCostTol || worst_lift > kLiftTol) o.pass = false;
  o.detail = "50 instances, max optimum gap " + fmt("%.3g", worst_opt) + ", max lift gap " + fmt("%.3g", worst_lift);
  return o;
}

Outcome cutting_planes() {
  Outcome o;
  GeneratorConfig cfg;
  cfg.capacitated = false;
  double worst = 0.0;
  int dirty = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Instance inst = generate_euclidean(2 + static_cast<int>(s % 5), 3 + static_cast<int>(s % 6), 11000 + s, cfg);
    const int root = static_cast<int>(s % inst.num_facilities());
    const ConnectedLp lp = build_conpfl_lp(inst, root);
    const FractionalSolution cut = solve_with_cuts(lp);
    ConnectedLp full = lp;
    add_all_connectivity_cuts(full);
    const double full_value = solve_lp(full.model).objective;
    worst = std::max(worst, std::abs(cut.objective - full_value));
    if (!separation_sweep(cut, cut.clients, kSweepTol).empty()) ++dirty;
  }
  o.pass = worst <= kLpTol && dirty == 0;
  o.detail = "50 instances, max value gap " + fmt("%.3g", worst) + ", " + std::to_string(dirty) + " failed sweeps";
  return o;
}

Outcome conpfl_chain() {
  Outcome o;
  double worst = 0.0;
  const auto recs = records_of("conpfl");
  for (const auto* r : recs) {
    if (!r->lp_value) {
      o.pass = false;
      continue;
    }
    worst = std::max(worst, *r->lp_ratio);
    if (r->objective > 21.32 * *r->lp_value + kCostTol) o.pass = false;
  }
  o.detail = std::to_string(recs.size()) + " instances, max cost / min LP " + fmt("%.4f", worst);
  return o;
}

Outcome subsolver_gates() {
  Outcome o;
  double worst_ls = 0.0;
  for (const auto* r : records_of("cfl")) {
    if (!r->ratio || *r->ratio > 5.0 + kCostTol) o.pass = false;
    if (r->ratio) worst_ls = std::max(worst_ls, *r->ratio);
  }
  double worst_round = 0.0;
  int runs = 0;
  cli::CorpusConfig cfg;
  for (const Instance& inst : cli::make_corpus(cfg)) {
    Instance view = drop_capacities(inst);
    for (auto& c : view.clients) c.penalty.reset();
    for (const ConflRun& run : solve_confl_runs(view, all_clients(view))) {
      ++runs;
      const double ratio = run.cost / run.lp_value;
      worst_round = std::max(worst_round, ratio);
      if (run.cost > 10.66 * run.lp_value + kCostTol) o.pass = false;
    }
  }
  o.detail = "local search max " + fmt("%.4f", worst_ls) + ", round_confl max " + fmt("%.4f", worst_round) +
             " over " + std::to_string(runs) + " rooted runs";
  return o;
}

Solution line4_both_open(const Instance& inst) {
  Solution s = Solution::empty_for(inst);
  s.open = {0, 1};
  s.assignment = {0, 0, 1, 1};
  s.steiner_edges = {make_edge(0, 1)};
  return s;
}

Outcome validator_and_round_trip() {
  Outcome o;
  Instance inst = load_instance(FACLOC_TEST_DATA "/line4.json");
  inst.k = 2;
  const ProblemKind concfl = parse_kind("concfl");
  const Solution clean = line4_both_open(inst);
  std::vector<std::pair<std::string, bool>> fired;
  Solution m = clean;
  m.assignment[1] = -1;
  fired.push_back({"UNSERVED_CLIENT", validate(inst, m, concfl).has(Violation::UnservedClient)});
  m = clean;
  m.open.erase(1);
  fired.push_back({"CLOSED_ASSIGNMENT", validate(inst, m, concfl).has(Violation::ClosedAssignment)});
  m = clean;
  m.assignment[2] = 0;
  fired.push_back({"CAPACITY_EXCEEDED", validate(inst, m, concfl).has(Violation::CapacityExceeded)});
  Instance one = inst;
  one.k = 1;
  fired.push_back({"CARDINALITY_EXCEEDED", validate(one, clean, parse_kind("conckfl")).has(Violation::CardinalityExceeded)});
  m = clean;
  m.steiner_edges.clear();
  fired.push_back({"DISCONNECTED_OPEN_SET", validate(inst, m, concfl).has(Violation::DisconnectedOpenSet)});
  m = clean;
  m.penalty_set.insert(0);
  fired.push_back({"PENALTY_OVERLAP", validate(inst, m, parse_kind("concpfl")).has(Violation::PenaltyOverlap)});
  m = clean;
  m.claimed_total = 16.5;
  fired.push_back({"COST_MISMATCH", validate(inst, m, concfl).has(Violation::CostMismatch)});
  int missed = 0;
  for (const auto& [code, ok] : fired)
    if (!ok) {
      ++missed;
      o.detail += code + " did not fire; ";
    }
  if (!validate(inst, clean, concfl).ok) ++missed;

  int dirty = 0;
  for (const auto& r : bench().records)
    if (!r.valid) ++dirty;

  const fs::path dir = fs::temp_directory_path() / "facloc_acceptance";
  fs::create_directories(dir);
  const std::string ipath = (dir / "instance.json").string(), spath = (dir / "solution.json").string();
  int pairs = 0, failed = 0;
  std::ostringstream sink;
  cli::CorpusConfig cfg;
  for (const Instance& corpus_inst : cli::make_corpus(cfg)) {
    save_instance(corpus_inst, ipath);
    for (const std::string& kind : cli::default_bench_kinds()) {
      ++pairs;
      const bool solved = cli::run({"solve", ipath, "--kind", kind, "--out", spath}, sink, sink) == 0;
      if (!solved || cli::run({"verify", ipath, spath}, sink, sink) != 0) {
        ++failed;
        if (failed <= 3) o.detail += corpus_inst.name + "/" + kind + " failed; ";
      }
      sink.str("");
    }
  }
  o.pass = missed == 0 && dirty == 0 && failed == 0;
  o.detail += std::to_string(fired.size() - missed) + "/7 codes fire, " + std::to_string(dirty) +
              " invalid solver outputs, solve->verify " + std::to_string(pairs - failed) + "/" +
              std::to_string(pairs) + " exit 0";
  return o;
}

Outcome determinism() {
  Outcome o;
  const fs::path path = fs::temp_directory_path() / "facloc_acceptance" / "bench.jsonl";
  fs::create_directories(path.parent_path());
  std::ostringstream sink;
  cli::run({"bench", "--out", path.string()}, sink, sink);
  std::ifstream in(path, std::ios::binary);
  std::stringstream second;
  second << in.rdbuf();
  const std::string first = cli::results_jsonl(bench());
  o.pass = !first.empty() && first == second.str();
  o.detail = std::to_string(first.size()) + " vs " + std::to_string(second.str().size()) + " bytes" +
             (o.pass ? ", identical" : ", differ");
  return o;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  bench();
  bench_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"combining inequality", combining_inequality},
      {"factor gates vs exhaustive optimum", factor_gates},
      {"scaled ConPFL point", scaled_solution},
      {"penalty thresholding bound", penalty_threshold},
      {"CPFL reduction exactness", cpfl_reduction},
      {"cutting planes vs full enumeration", cutting_planes},
      {"ConPFL chain bound", conpfl_chain},
      {"sub-solver gates", subsolver_gates},
      {"validator mutations and round trip", validator_and_round_trip},
      {"bench determinism", determinism},
  };
  int failures = 0, n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s: %s (%s)\n", n, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", n - failures, n);
  return failures == 0 ? 0 : 1;
}
