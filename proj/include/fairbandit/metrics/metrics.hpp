#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairbandit/agents/agent.hpp"
#include "fairbandit/data/dataset.hpp"

namespace fairbandit::metrics {

struct SkippedClass {
  int cls = 0;
  std::string reason;
  friend bool operator==(const SkippedClass&, const SkippedClass&) = default;
};

// Metrics at one evaluation point. Values are raw fractions in [0, 1].
// tpr_gap[a] = TPR(a, g=0) - TPR(a, g=1), empty when either group is absent.
struct EvalReport {
  double accuracy = 0.0;
  std::vector<std::optional<double>> tpr_gap;
  double gap_rms = 0.0;
  double macro_f1 = 0.0;
  std::int64_t step = 0;
  std::vector<SkippedClass> skipped_classes;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

EvalReport evaluate_predictions(std::span<const int> predictions, const data::Dataset& ds,
                                std::int64_t step = 0);
EvalReport evaluate(const agents::Agent& agent, const data::Dataset& ds, std::int64_t step = 0);

// sqrt(mean of squared present gaps); 0 when no class qualifies.
double gap_rms(const std::vector<std::optional<double>>& gaps);

enum class UtopiaMode { absolute_ones, best_observed };

struct UtopianPoint {
  double accuracy = 1.0;
  double one_minus_gap = 1.0;
  UtopiaMode mode = UtopiaMode::absolute_ones;

  static UtopianPoint ones() { return {}; }
  // Highest accuracy and lowest GAP seen across `reports`, each taken independently.
  static UtopianPoint best_observed(std::span<const EvalReport> reports);
};

double dto(double accuracy, double gap, const UtopianPoint& utopia);
double dto(const EvalReport& report, const UtopianPoint& utopia);

// Lowest-DTO index; ties go to the earliest report.
std::size_t select_best(std::span<const EvalReport> history, UtopiaMode mode);

}  // namespace fairbandit::metrics
