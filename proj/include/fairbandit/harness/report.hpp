#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "fairbandit/harness/config.hpp"
#include "fairbandit/harness/sweep.hpp"
#include "fairbandit/harness/train.hpp"

namespace fairbandit::harness {

// Fraction -> percentage with one decimal: 0.801 -> "80.1".
std::string percent(double fraction);

nlohmann::json to_json(const metrics::EvalReport& report);
metrics::EvalReport eval_report_from_json(const nlohmann::json& j);

// The checkpoint bytes are not part of the JSON; they go to their own file.
nlohmann::json to_json(const RunResult& result);
RunResult run_result_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SweepTable& table);

// Columns: split,step,accuracy,gap,macro_f1,dto. Rows: dev_best, test.
// Metrics are percentages; dto stays a raw distance with four decimals.
std::string summary_csv(const RunResult& result);
// Columns: step,accuracy,gap,macro_f1,dto, one row per dev evaluation.
std::string history_csv(const RunResult& result);
// Columns: <grid keys...>,seeds,completed,accuracy_mean,accuracy_std,gap_mean,
// gap_std,macro_f1_mean,macro_f1_std,dto,selected.
std::string sweep_csv(const SweepTable& table);

// Writes config.txt, result.json, summary.csv, history.csv and best.fcag under `dir`.
void write_run_report(const RunConfig& cfg, const RunResult& result, const std::filesystem::path& dir);
// Writes sweep.json and sweep.csv under `dir`.
void write_sweep_report(const SweepTable& table, const std::filesystem::path& dir);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fairbandit::harness
