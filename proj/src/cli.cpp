#include "facloc/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "facloc/combine.hpp"
#include "facloc/error.hpp"
#include "facloc/subsolvers.hpp"

namespace facloc::cli {

using nlohmann::json;

json to_json(const RunRecord& r) {
  json j{{"instance", r.instance},
         {"kind", r.kind},
         {"capacity_profile", r.capacity_profile},
         {"pipeline", r.pipeline},
         {"seed", r.seed},
         {"cost", facloc::to_json(r.cost)},
         {"objective", r.objective},
         {"valid", r.valid},
         {"violations", r.violations}};
  if (r.certificate) {
    j["certificate"] = facloc::to_json(*r.certificate);
    j["certified"] = r.certified();
  }
  if (r.oracle) j["oracle_optimum"] = *r.oracle;
  if (r.ratio) j["ratio"] = *r.ratio;
  if (r.lp_value) j["lp_value"] = *r.lp_value;
  if (r.lp_ratio) j["lp_ratio"] = *r.lp_ratio;
  if (r.error) j["error"] = *r.error;
  if (r.wall_ms) j["wall_ms"] = *r.wall_ms;
  return j;
}

std::string capacity_profile(const Instance& inst) {
  if (!inst.all_capacitated()) return "none";
  for (const auto& f : inst.facilities)
    if (f.capacity != inst.facilities.front().capacity) return "nonuniform";
  return "uniform";
}

namespace {

double safe_ratio(double value, double reference) {
  if (reference > 1e-12) return value / reference;
  return value <= 1e-12 ? 1.0 : kInfinity;
}

}  // namespace

RunRecord run_one(const Instance& inst, const ProblemKind& kind, const RunOptions& options, Solution* solution_out) {
  RunRecord r;
  r.instance = inst.name;
  r.kind = to_string(kind);
  r.capacity_profile = capacity_profile(inst);
  r.seed = options.pipeline.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    PipelineResult result = solve_kind(inst, kind, options.pipeline);
    r.pipeline = result.pipeline;
    r.cost = evaluate(inst, result.solution, kind);
    r.objective = objective_value(r.cost, kind);
    r.certificate = result.certificate;
    r.lp_value = result.lp_value;
    if (r.lp_value) r.lp_ratio = safe_ratio(r.objective, *r.lp_value);
    const ValidationReport report = validate(inst, result.solution, kind, options.policy);
    r.valid = report.ok;
    for (const auto& [code, detail] : report.violations) r.violations.push_back(to_string(code) + ": " + detail);
    if (options.oracle && within_exact_limits(inst)) {
      const Solution best = solve_exact(inst, kind);
      r.oracle = objective_value(evaluate(inst, best, kind), kind);
      r.ratio = safe_ratio(r.objective, *r.oracle);
    }
    if (solution_out) *solution_out = std::move(result.solution);
  } catch (const Error& e) {
    r.valid = false;
    r.error = e.what();
  }
  if (options.timing)
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<Instance> make_corpus(const CorpusConfig& config) {
  if (config.instances < 0 || config.min_facilities < 1 || config.min_facilities > config.max_facilities ||
      config.min_clients < 1 || config.min_clients > config.max_clients)
    throw Error(ErrorCode::InvalidConfig, "corpus size ranges are empty");
  std::vector<Instance> corpus;
  for (int n = 0; n < config.instances; ++n) {
    const std::uint64_t seed = config.seed * 1000003ULL + static_cast<std::uint64_t>(n);
    std::mt19937_64 rng(seed);
    const int nf = config.min_facilities + static_cast<int>(rng() % (config.max_facilities - config.min_facilities + 1));
    const int nc = config.min_clients + static_cast<int>(rng() % (config.max_clients - config.min_clients + 1));
    GeneratorConfig g;
    g.uniform_capacity = n % 2 == 0;
    g.k = (nf + 1) / 2;
    g.capacity_min = (nc + *g.k - 1) / *g.k;
    g.capacity_max = g.capacity_min + 2;
    char name[64];
    std::snprintf(name, sizeof name, "corpus-%04d-f%d-c%d-%s", n, nf, nc, g.uniform_capacity ? "u" : "nu");
    g.name = name;
    corpus.push_back(generate_euclidean(nf, nc, seed, g));
  }
  return corpus;
}

std::vector<std::string> default_bench_kinds() { return {"cfl", "confl", "cpfl", "conpfl", "concfl", "concpfl", "conckc"}; }

std::vector<Gate> default_gates() {
  return {
      {"cfl", "", "ratio", 5.0},
      {"confl", "", "lp_ratio", 10.66},
      {"conpfl", "", "lp_ratio", 21.32},
      {"concfl", "uniform", "ratio", 9.19},
      {"concfl", "nonuniform", "ratio", 13.19},
      {"concpfl", "", "ratio", 31.32},
      {"conckc", "uniform", "ratio", 18.0},
  };
}

BenchResult run_bench(const BenchConfig& config) {
  const std::vector<Instance> corpus = make_corpus(config.corpus);
  std::vector<ProblemKind> kinds;
  for (const auto& k : config.kinds) kinds.push_back(parse_kind(k));

  struct Task {
    int instance;
    int kind;
  };
  std::vector<Task> tasks;
  for (int i = 0; i < static_cast<int>(corpus.size()); ++i)
    for (int k = 0; k < static_cast<int>(kinds.size()); ++k) tasks.push_back({i, k});

  BenchResult result;
  result.records.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++)
      result.records[t] = run_one(corpus[tasks[t].instance], kinds[tasks[t].kind], config.run);
  };
  const int jobs = std::max(1, config.jobs);
  std::vector<std::thread> pool;
  for (int w = 1; w < jobs; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::stable_sort(result.records.begin(), result.records.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.instance, a.kind) < std::tie(b.instance, b.kind);
  });

  const std::vector<Gate> gates = default_gates();
  std::map<std::pair<std::string, std::string>, SummaryRow> rows;
  for (const RunRecord& r : result.records) {
    SummaryRow& row = rows[{r.kind, r.capacity_profile}];
    row.kind = r.kind;
    row.profile = r.capacity_profile;
    ++row.runs;
    if (!r.ok()) ++row.failures;
    if (r.certificate) {
      ++row.certificates;
      if (r.certified()) ++row.certified;
    }
    if (r.ratio) {
      row.max_ratio = std::max(row.max_ratio, *r.ratio);
      row.mean_ratio += *r.ratio;
      ++row.ratio_count;
    }
    if (r.lp_ratio) row.max_lp_ratio = std::max(row.max_lp_ratio, *r.lp_ratio);
  }
  for (auto& [key, row] : rows) {
    if (row.ratio_count) row.mean_ratio /= row.ratio_count;
    for (const Gate& g : gates)
      if (g.kind == row.kind && (g.profile.empty() || g.profile == row.profile)) row.gate = g;
    if (row.gate) {
      const double observed = row.gate->metric == "ratio" ? row.max_ratio : row.max_lp_ratio;
      row.gate_passed = observed <= row.gate->limit + 1e-9;
    }
    if (row.failures || !row.gate_passed) result.ok = false;
    result.summary.push_back(row);
  }
  return result;
}

std::string results_jsonl(const BenchResult& result) {
  std::string text;
  for (const RunRecord& r : result.records) text += to_json(r).dump() + "\n";
  return text;
}

void print_summary(const BenchResult& result, std::ostream& out) {
  out << std::left << std::setw(9) << "kind" << std::setw(12) << "capacities" << std::right << std::setw(6) << "runs"
      << std::setw(6) << "fail" << std::setw(10) << "certified" << std::setw(11) << "max ratio" << std::setw(11)
      << "mean ratio" << std::setw(9) << "max lp" << std::setw(9) << "gate" << "  status\n";
  out << std::fixed << std::setprecision(4);
  for (const SummaryRow& row : result.summary) {
    std::ostringstream cert;
    if (row.certificates)
      cert << row.certified << "/" << row.certificates;
    else
      cert << "-";
    out << std::left << std::setw(9) << row.kind << std::setw(12) << row.profile << std::right << std::setw(6)
        << row.runs << std::setw(6) << row.failures << std::setw(10) << cert.str() << std::setw(11) << row.max_ratio
        << std::setw(11) << row.mean_ratio << std::setw(9) << row.max_lp_ratio;
    if (row.gate)
      out << std::setw(9) << std::setprecision(2) << row.gate->limit << std::setprecision(4);
    else
      out << std::setw(9) << "-";
    out << "  " << (row.failures == 0 && row.gate_passed ? "ok" : "FAIL") << "\n";
  }
  out.unsetf(std::ios::floatfield);
  out << (result.ok ? "all runs valid, certified and within gates\n" : "some runs failed\n");
}

namespace {

int facility_by_id(const Instance& inst, const std::string& id) {
  const auto idx = inst.facility_index(id);
  if (!idx) throw Error(ErrorCode::UnknownFacility, "no facility '" + id + "'");
  return *idx;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ParseError, "cannot write " + path);
  f << text;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Facility location with capacity, connectivity and penalty constraints"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a seeded Euclidean instance");
  int nf = 4, nc = 8;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  GeneratorConfig gcfg;
  bool no_caps = false, no_penalties = false;
  std::optional<int> gen_k;
  gen->add_option("--facilities", nf, "Number of facilities")->capture_default_str();
  gen->add_option("--clients", nc, "Number of clients")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--cap-min", gcfg.capacity_min, "Smallest capacity")->capture_default_str();
  gen->add_option("--cap-max", gcfg.capacity_max, "Largest capacity")->capture_default_str();
  gen->add_flag("--uniform", gcfg.uniform_capacity, "One capacity for every facility");
  gen->add_flag("--no-capacities", no_caps, "Omit capacities");
  gen->add_flag("--no-penalties", no_penalties, "Omit penalties");
  gen->add_option("--k", gen_k, "Cardinality bound");
  gen->add_option("--edge-factor", gcfg.edge_cost_factor, "Tree edge cost per unit distance")->capture_default_str();
  gen->add_option("--scale", gcfg.connection_scale, "Connection cost multiplier M")->capture_default_str();
  gen->add_option("--out", gen_out, "Output path (stdout when omitted)");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve an instance for one problem kind");
  std::string solve_path, solve_kind_name, solve_out, root_id;
  std::uint64_t solve_seed = 1;
  bool solve_exact_flag = false, solve_oracle = false, solve_timing = false;
  double solve_gamma = 1.0;
  solve->add_option("instance", solve_path, "Instance JSON")->required();
  solve->add_option("--kind", solve_kind_name, "Problem kind, e.g. concfl")->required();
  solve->add_option("--seed", solve_seed, "Local search seed")->capture_default_str();
  solve->add_flag("--exact", solve_exact_flag, "Use the exhaustive oracles as sub-solvers");
  solve->add_option("--v", root_id, "Fix the guessed root facility (id)");
  solve->add_option("--gamma", solve_gamma, "Allowed capacity violation factor")->capture_default_str();
  solve->add_option("--out", solve_out, "Solution output path");
  solve->add_flag("--oracle", solve_oracle, "Also compute the exhaustive optimum");
  solve->add_flag("--timing", solve_timing, "Record wall time");

  // verify
  auto* verify = app.add_subcommand("verify", "Validate a solution file");
  std::string verify_inst, verify_sol, verify_kind;
  double verify_gamma = 1.0;
  verify->add_option("instance", verify_inst, "Instance JSON")->required();
  verify->add_option("solution", verify_sol, "Solution JSON")->required();
  verify->add_option("--kind", verify_kind, "Problem kind (default: from the solution metadata)");
  verify->add_option("--gamma", verify_gamma, "Allowed capacity violation factor")->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "Run the seeded corpus and summarise ratios");
  BenchConfig bcfg;
  std::string bench_out;
  bool no_oracle = false;
  bench->add_option("--instances", bcfg.corpus.instances, "Corpus size")->capture_default_str();
  bench->add_option("--seed", bcfg.corpus.seed, "Corpus seed")->capture_default_str();
  bench->add_option("--min-facilities", bcfg.corpus.min_facilities)->capture_default_str();
  bench->add_option("--max-facilities", bcfg.corpus.max_facilities)->capture_default_str();
  bench->add_option("--min-clients", bcfg.corpus.min_clients)->capture_default_str();
  bench->add_option("--max-clients", bcfg.corpus.max_clients)->capture_default_str();
  bench->add_option("--kinds", bcfg.kinds, "Comma separated kinds")->delimiter(',')->capture_default_str();
  bench->add_option("--jobs", bcfg.jobs, "Worker threads")->capture_default_str();
  bench->add_option("--out", bench_out, "JSON-lines results path");
  bench->add_flag("--exact", bcfg.run.pipeline.exact, "Use the exhaustive oracles as sub-solvers");
  bench->add_flag("--no-oracle", no_oracle, "Skip the exhaustive optimum");
  bench->add_flag("--timing", bcfg.run.timing, "Record wall time (results are then not reproducible)");
  bench->add_option("--gamma", bcfg.run.policy.capacity_violation_gamma)->capture_default_str();

  auto* factors = app.add_subcommand("factors", "Print the composed approximation factors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*gen) {
      gcfg.capacitated = !no_caps;
      gcfg.penalties = !no_penalties;
      gcfg.k = gen_k;
      const std::string text = instance_to_json(generate_euclidean(nf, nc, gen_seed, gcfg)) + "\n";
      if (gen_out.empty())
        out << text;
      else
        write_text(gen_out, text);
      return 0;
    }

    if (*solve) {
      const Instance inst = load_instance(solve_path);
      const ProblemKind kind = parse_kind(solve_kind_name);
      RunOptions opt;
      opt.pipeline.seed = solve_seed;
      opt.pipeline.exact = solve_exact_flag;
      if (!root_id.empty()) opt.pipeline.root = facility_by_id(inst, root_id);
      opt.policy.capacity_violation_gamma = solve_gamma;
      opt.oracle = solve_oracle;
      opt.timing = solve_timing;
      Solution sol;
      const RunRecord record = run_one(inst, kind, opt, &sol);
      if (record.error) {
        err << "error: " << *record.error << "\n";
        return 1;
      }
      if (!solve_out.empty()) save_solution(inst, sol, solve_out);
      out << to_json(record).dump(2) << "\n";
      if (!record.valid) {
        err << "validation failed: " << record.violations.front() << "\n";
        return 1;
      }
      if (!record.certified()) {
        err << "certificate failed: slack " << record.certificate->inequality_slack << "\n";
        return 1;
      }
      return 0;
    }

    if (*verify) {
      const Instance inst = load_instance(verify_inst);
      const Solution sol = load_solution(inst, verify_sol);
      std::string kind_name = verify_kind.empty() ? sol.kind.value_or("") : verify_kind;
      if (kind_name.empty()) throw Error(ErrorCode::InvalidConfig, "no --kind and no kind in the solution metadata");
      ValidationPolicy policy;
      policy.capacity_violation_gamma = verify_gamma;
      const ValidationReport report = validate(inst, sol, parse_kind(kind_name), policy);
      out << facloc::to_json(report).dump(2) << "\n";
      if (!report.ok) err << to_string(report.violations.front().first) << ": " << report.violations.front().second << "\n";
      return report.ok ? 0 : 1;
    }

    if (*bench) {
      bcfg.run.oracle = !no_oracle;
      const BenchResult result = run_bench(bcfg);
      if (!bench_out.empty()) write_text(bench_out, results_jsonl(result));
      print_summary(result, out);
      return result.ok ? 0 : 1;
    }

    if (*factors) {
      struct Row {
        const char* problem;
        double alpha;
        double beta;
        CompositionRule rule;
      };
      const Row rows[] = {
          {"(U)ConCFL", 3.19, 3.0, CompositionRule::ConPlusTwoCap},
          {"(NU)ConCFL", 3.19, 5.0, CompositionRule::ConPlusTwoCap},
          {"ConPFL", 10.66, 0.0, CompositionRule::Double},
          {"ConCPFL", 21.32, 5.0, CompositionRule::ConPlusTwoCap},
      };
      for (const Row& r : rows)
        out << std::left << std::setw(12) << r.problem << compose_guarantee(r.alpha, r.beta, r.rule) << "\n";
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"facloc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace facloc::cli
