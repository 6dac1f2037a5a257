#include "fairbandit/harness/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace fairbandit::harness {

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  const auto n = static_cast<double>(values.size());
  for (const double v : values) out.mean += v;
  out.mean /= n;
  // Identical values: report them exactly rather than the rounded sum.
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
    out.mean = values.front();
    return out;
  }
  {
    double ss = 0.0;
    for (const double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

void aggregate(SweepTable& table) {
  std::vector<metrics::EvalReport> means;
  std::vector<std::size_t> complete_rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    auto& row = table.rows[r];
    std::vector<double> acc;
    std::vector<double> gap;
    std::vector<double> f1;
    for (const auto& run : row.runs) {
      if (!run.test) continue;
      acc.push_back(run.test->accuracy);
      gap.push_back(run.test->gap_rms);
      f1.push_back(run.test->macro_f1);
    }
    row.complete = !row.runs.empty() && acc.size() == row.runs.size();
    row.accuracy = mean_std(acc);
    row.gap = mean_std(gap);
    row.macro_f1 = mean_std(f1);
    if (row.complete) {
      metrics::EvalReport m;
      m.accuracy = row.accuracy.mean;
      m.gap_rms = row.gap.mean;
      means.push_back(m);
      complete_rows.push_back(r);
    }
  }
  table.best.reset();
  if (means.empty()) return;
  table.utopia = metrics::UtopianPoint::best_observed(means);
  for (auto& row : table.rows) row.dto = metrics::dto(row.accuracy.mean, row.gap.mean, table.utopia);
  table.best = complete_rows[metrics::select_best(means, metrics::UtopiaMode::best_observed)];
}

SweepTable sweep(const SweepConfig& sc, const RunFunction& run) {
  sc.validate();
  const RunFunction runner = run ? run : [](const RunConfig& cfg) { return train_run(cfg); };

  SweepTable table;
  for (const auto& [key, values] : sc.grid) table.keys.push_back(key);

  struct Task {
    std::size_t row;
    std::size_t slot;
    RunConfig cfg;
  };
  std::vector<Task> tasks;
  for (const auto& point : sc.grid_points()) {
    SweepRow row;
    row.point = point;
    for (const auto seed : sc.seeds) {
      auto kv = sc.base;
      for (const auto& [key, value] : point) kv.set(key, value);
      kv.set("seed", std::to_string(seed));
      tasks.push_back({table.rows.size(), row.runs.size(), run_config_from(kv)});
      row.runs.push_back({seed, std::nullopt, ""});
    }
    table.rows.push_back(std::move(row));
  }

  // Each task writes only its own slot, so workers share nothing mutable
  // beyond the task cursor.
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (std::size_t t = cursor++; t < tasks.size(); t = cursor++) {
      auto& outcome = table.rows[tasks[t].row].runs[tasks[t].slot];
      try {
        outcome.test = runner(tasks[t].cfg).test;
      } catch (const std::exception& e) {
        outcome.error = e.what();
      }
    }
  };
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(sc.jobs), tasks.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  aggregate(table);
  return table;
}

}  // namespace fairbandit::harness
