#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "facloc/instance.hpp"
#include "facloc/pipeline.hpp"
#include "facloc/verify.hpp"

namespace facloc::cli {

struct RunRecord {
  std::string instance;
  std::string kind;
  std::string capacity_profile;  // uniform, nonuniform or none
  std::string pipeline;
  std::uint64_t seed = 0;
  CostBreakdown cost;
  double objective = 0.0;
  std::optional<BoundCertificate> certificate;
  std::optional<double> oracle;
  std::optional<double> ratio;
  std::optional<double> lp_value;
  std::optional<double> lp_ratio;
  bool valid = false;
  std::vector<std::string> violations;
  std::optional<std::string> error;
  std::optional<double> wall_ms;

  bool certified() const { return !certificate || certify_bound(*certificate); }
  bool ok() const { return valid && certified() && !error; }
};

nlohmann::json to_json(const RunRecord& record);

std::string capacity_profile(const Instance& inst);

struct RunOptions {
  PipelineOptions pipeline;
  ValidationPolicy policy;
  bool oracle = true;
  bool timing = false;
};

/// Solve, validate, certify and (within the oracle limits) compare with the
/// exhaustive optimum. Solver errors are captured in the record.
RunRecord run_one(const Instance& inst, const ProblemKind& kind, const RunOptions& options,
                  Solution* solution_out = nullptr);

struct CorpusConfig {
  int instances = 200;
  std::uint64_t seed = 1;
  int min_facilities = 3;
  int max_facilities = 6;
  int min_clients = 4;
  int max_clients = 12;
};

/// Seeded corpus alternating uniform and non-uniform capacities. Every
/// instance has penalties, k = ceil(|F| / 2), and enough capacity for any
/// k facilities to serve all clients.
std::vector<Instance> make_corpus(const CorpusConfig& config);

std::vector<std::string> default_bench_kinds();

struct BenchConfig {
  CorpusConfig corpus;
  std::vector<std::string> kinds = default_bench_kinds();
  int jobs = 1;
  RunOptions run;
};

struct Gate {
  std::string kind;
  std::string profile;  // empty matches any
  std::string metric;   // "ratio" (vs oracle) or "lp_ratio" (vs relaxation)
  double limit = 0.0;
};

/// Composed factors applied as per-instance limits.
std::vector<Gate> default_gates();

struct SummaryRow {
  std::string kind;
  std::string profile;
  int runs = 0;
  int failures = 0;
  int certificates = 0;
  int certified = 0;
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  int ratio_count = 0;
  double max_lp_ratio = 0.0;
  std::optional<Gate> gate;
  bool gate_passed = true;
};

struct BenchResult {
  std::vector<RunRecord> records;  // sorted by instance, then kind
  std::vector<SummaryRow> summary;
  bool ok = true;
};

BenchResult run_bench(const BenchConfig& config);
std::string results_jsonl(const BenchResult& result);
void print_summary(const BenchResult& result, std::ostream& out);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace facloc::cli
