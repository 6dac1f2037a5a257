#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "fairbandit/agents/agent.hpp"
#include "fairbandit/errors.hpp"
#include "fairbandit/harness/config.hpp"
#include "fairbandit/metrics/metrics.hpp"

namespace fairbandit::harness {

struct RunResult {
  std::vector<metrics::EvalReport> history;  // dev reports in step order
  std::size_t best_index = 0;                // lowest DTO against (1, 1)
  metrics::EvalReport test;                  // from the checkpoint at best_index
  double wall_seconds = 0.0;
  std::uint64_t config_hash = 0;
  std::int64_t total_steps = 0;
  std::int64_t ppo_updates = 0;
  std::vector<std::uint8_t> best_checkpoint;  // FCAG bytes
};

// Raised when a loss or gradient turns non-finite mid-run. Carries the dev
// reports collected before the failure.
class TrainingFailure : public NumericalError {
 public:
  TrainingFailure(const std::string& what, std::vector<metrics::EvalReport> partial)
      : NumericalError(what), partial_history(std::move(partial)) {}
  std::vector<metrics::EvalReport> partial_history;
};

using EvalCallback = std::function<void(const metrics::EvalReport&)>;

// Builds the agent for `cfg` with weights drawn from `init_rng`.
std::unique_ptr<agents::Agent> make_agent(const RunConfig& cfg, int dim, int n_actions,
                                          const reward::RewardScaleMatrix& scales,
                                          numkit::Rng& init_rng);

// Dataset -> transforms -> split -> train counts -> scales -> train_on_splits.
//
// Seeds: root Rng(cfg.seed) forks "transforms", "split", "init", "shuffle",
// "explore" and "buffer". Each child drives exactly one consumer, so adding
// draws to one never shifts another.
RunResult train_run(const RunConfig& cfg, const EvalCallback& on_eval = {});

// The training loop proper, for callers that already hold splits and scales.
RunResult train_on_splits(const RunConfig& cfg, const data::Splits& splits,
                          const reward::RewardScaleMatrix& scales, const EvalCallback& on_eval = {});

}  // namespace fairbandit::harness
