#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "facloc/combine.hpp"
#include "facloc/instance.hpp"
#include "facloc/solution.hpp"
#include "facloc/verify.hpp"

namespace facloc {

struct PipelineOptions {
  std::uint64_t seed = 1;
  /// Use the exhaustive oracles as sub-solvers.
  bool exact = false;
  /// Fix the guessed root for LP-based connected solvers.
  std::optional<int> root;
};

struct PipelineResult {
  Solution solution;
  std::string pipeline;
  std::optional<BoundCertificate> certificate;
  /// Best relaxation value over the guessed roots, for LP-based pipelines.
  std::optional<double> lp_value;
};

/// Runs the pipeline for `kind`: direct solvers for single-constraint
/// kinds, drop-a-constraint views plus a combiner for the connected
/// capacitated ones. The solution carries its kind and claimed objective.
PipelineResult solve_kind(const Instance& inst, const ProblemKind& kind, const PipelineOptions& options = {});

/// Capacitated prize-collecting solve through the dummy-facility reduction.
Solution solve_cpfl(const Instance& inst, std::uint64_t seed);

}  // namespace facloc
