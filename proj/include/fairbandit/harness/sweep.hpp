#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairbandit/harness/config.hpp"
#include "fairbandit/harness/train.hpp"

namespace fairbandit::harness {

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::optional<metrics::EvalReport> test;  // empty when the run failed
  std::string error;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
};

MeanStd mean_std(const std::vector<double>& values);

struct SweepRow {
  std::vector<std::pair<std::string, std::string>> point;
  std::vector<SeedOutcome> runs;
  bool complete = false;  // every seed finished
  MeanStd accuracy;
  MeanStd gap;
  MeanStd macro_f1;
  double dto = 0.0;  // over the means, against the best_observed utopia
};

struct SweepTable {
  std::vector<std::string> keys;  // grid keys in declaration order
  std::vector<SweepRow> rows;     // grid points in enumeration order
  std::optional<std::size_t> best;
  metrics::UtopianPoint utopia;
};

// Fills means, stds, DTO and the selection from the per-seed outcomes.
// Incomplete rows keep their partial means but never get selected.
void aggregate(SweepTable& table);

using RunFunction = std::function<RunResult(const RunConfig&)>;

// Runs every grid point x seed, up to `sc.jobs` at a time. Configs are built
// and validated up front, so a bad grid value fails before any training.
SweepTable sweep(const SweepConfig& sc, const RunFunction& run = {});

}  // namespace fairbandit::harness
