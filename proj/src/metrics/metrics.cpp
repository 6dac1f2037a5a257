#include "fairbandit/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "fairbandit/errors.hpp"

namespace fairbandit::metrics {

EvalReport evaluate_predictions(std::span<const int> predictions, const data::Dataset& ds,
                                std::int64_t step) {
  const auto n = static_cast<std::size_t>(ds.size());
  if (predictions.size() != n) throw DimensionError("evaluate predictions", n, predictions.size());
  const int n_classes = ds.n_classes();
  const int n_groups = ds.n_groups();

  std::vector<std::int64_t> true_positive(static_cast<std::size_t>(n_classes), 0);
  std::vector<std::int64_t> predicted(static_cast<std::size_t>(n_classes), 0);
  std::vector<std::int64_t> actual(static_cast<std::size_t>(n_classes), 0);
  data::CountTable support(n_classes, n_groups);
  data::CountTable hits(n_classes, n_groups);
  std::int64_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int truth = ds.class_of(static_cast<Eigen::Index>(i));
    const int group = ds.group_of(static_cast<Eigen::Index>(i));
    const int guess = predictions[i];
    if (guess < 0 || guess >= n_classes)
      throw std::out_of_range("prediction " + std::to_string(guess) + " outside class range");
    support.add(truth, group);
    ++actual[static_cast<std::size_t>(truth)];
    ++predicted[static_cast<std::size_t>(guess)];
    if (guess == truth) {
      ++correct;
      ++true_positive[static_cast<std::size_t>(truth)];
      hits.add(truth, group);
    }
  }

  EvalReport report;
  report.step = step;
  report.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  report.tpr_gap.assign(static_cast<std::size_t>(n_classes), std::nullopt);
  for (int a = 0; a < n_classes; ++a) {
    if (n_groups < 2) {
      report.skipped_classes.push_back({a, "dataset has fewer than two groups"});
      continue;
    }
    if (support.at(a, 0) == 0 || support.at(a, 1) == 0) {
      report.skipped_classes.push_back(
          {a, support.class_total(a) == 0 ? "no samples" : "missing samples for one group"});
      continue;
    }
    const double tpr0 = static_cast<double>(hits.at(a, 0)) / static_cast<double>(support.at(a, 0));
    const double tpr1 = static_cast<double>(hits.at(a, 1)) / static_cast<double>(support.at(a, 1));
    report.tpr_gap[static_cast<std::size_t>(a)] = tpr0 - tpr1;
  }
  report.gap_rms = gap_rms(report.tpr_gap);

  double f1_sum = 0.0;
  for (int a = 0; a < n_classes; ++a) {
    const auto tp = static_cast<double>(true_positive[static_cast<std::size_t>(a)]);
    const auto fp = static_cast<double>(predicted[static_cast<std::size_t>(a)]) - tp;
    const auto fn = static_cast<double>(actual[static_cast<std::size_t>(a)]) - tp;
    // 2PR / (P + R) == 2tp / (2tp + fp + fn); zero when tp == 0.
    f1_sum += tp > 0 ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
  }
  report.macro_f1 = f1_sum / static_cast<double>(n_classes);
  return report;
}

EvalReport evaluate(const agents::Agent& agent, const data::Dataset& ds, std::int64_t step) {
  const auto predictions = agent.predict_batch(ds.contexts());
  return evaluate_predictions(predictions, ds, step);
}

double gap_rms(const std::vector<std::optional<double>>& gaps) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& gap : gaps) {
    if (!gap) continue;
    sum += *gap * *gap;
    ++count;
  }
  return count == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(count));
}

UtopianPoint UtopianPoint::best_observed(std::span<const EvalReport> reports) {
  if (reports.empty()) throw ConfigError("best_observed utopia needs at least one report");
  UtopianPoint point{0.0, 0.0, UtopiaMode::best_observed};
  for (const auto& r : reports) {
    point.accuracy = std::max(point.accuracy, r.accuracy);
    point.one_minus_gap = std::max(point.one_minus_gap, 1.0 - r.gap_rms);
  }
  return point;
}

double dto(double accuracy, double gap, const UtopianPoint& utopia) {
  const double da = utopia.accuracy - accuracy;
  const double dg = utopia.one_minus_gap - (1.0 - gap);
  return std::sqrt(da * da + dg * dg);
}

double dto(const EvalReport& report, const UtopianPoint& utopia) {
  return dto(report.accuracy, report.gap_rms, utopia);
}

std::size_t select_best(std::span<const EvalReport> history, UtopiaMode mode) {
  if (history.empty()) throw ConfigError("select_best needs a nonempty history");
  const auto utopia =
      mode == UtopiaMode::absolute_ones ? UtopianPoint::ones() : UtopianPoint::best_observed(history);
  std::size_t best = 0;
  double best_distance = dto(history[0], utopia);
  for (std::size_t i = 1; i < history.size(); ++i) {
    const double d = dto(history[i], utopia);
    if (d < best_distance) {
      best = i;
      best_distance = d;
    }
  }
  return best;
}

}  // namespace fairbandit::metrics
