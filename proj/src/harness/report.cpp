#include "fairbandit/harness/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fairbandit/agents/agent.hpp"
#include "fairbandit/errors.hpp"

namespace fairbandit::harness {

using nlohmann::json;

namespace {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string metric_row(const metrics::EvalReport& r) {
  const double d = metrics::dto(r, metrics::UtopianPoint::ones());
  return std::to_string(r.step) + "," + percent(r.accuracy) + "," + percent(r.gap_rms) + "," +
         percent(r.macro_f1) + "," + fixed(d, 4);
}

}  // namespace

std::string percent(double fraction) {
  // Nudge before rounding so binary representation error (e.g. 0.8005 stored
  // as 0.80049999...) does not flip a half-way case.
  const double scaled = fraction * 100.0;
  return fixed(scaled + (scaled >= 0 ? 1e-9 : -1e-9), 1);
}

json to_json(const metrics::EvalReport& report) {
  json gaps = json::array();
  for (const auto& g : report.tpr_gap) gaps.push_back(g ? json(*g) : json(nullptr));
  json skipped = json::array();
  for (const auto& s : report.skipped_classes) skipped.push_back({{"class", s.cls}, {"reason", s.reason}});
  return {{"step", report.step},          {"accuracy", report.accuracy}, {"gap", report.gap_rms},
          {"macro_f1", report.macro_f1}, {"tpr_gap", gaps},             {"skipped_classes", skipped}};
}

metrics::EvalReport eval_report_from_json(const json& j) {
  metrics::EvalReport r;
  r.step = j.at("step").get<std::int64_t>();
  r.accuracy = j.at("accuracy").get<double>();
  r.gap_rms = j.at("gap").get<double>();
  r.macro_f1 = j.at("macro_f1").get<double>();
  for (const auto& g : j.at("tpr_gap"))
    r.tpr_gap.push_back(g.is_null() ? std::nullopt : std::optional<double>(g.get<double>()));
  for (const auto& s : j.at("skipped_classes"))
    r.skipped_classes.push_back({s.at("class").get<int>(), s.at("reason").get<std::string>()});
  return r;
}

json to_json(const RunResult& result) {
  json history = json::array();
  for (const auto& r : result.history) history.push_back(to_json(r));
  return {{"history", history},
          {"best_index", result.best_index},
          {"test", to_json(result.test)},
          {"wall_seconds", result.wall_seconds},
          {"config_hash", hex64(result.config_hash)},
          {"total_steps", result.total_steps},
          {"ppo_updates", result.ppo_updates}};
}

RunResult run_result_from_json(const json& j) {
  try {
    RunResult result;
    for (const auto& r : j.at("history")) result.history.push_back(eval_report_from_json(r));
    result.best_index = j.at("best_index").get<std::size_t>();
    result.test = eval_report_from_json(j.at("test"));
    result.wall_seconds = j.at("wall_seconds").get<double>();
    result.config_hash = std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
    result.total_steps = j.at("total_steps").get<std::int64_t>();
    result.ppo_updates = j.at("ppo_updates").get<std::int64_t>();
    if (result.best_index >= result.history.size())
      throw ConfigError("best_index outside the history");
    return result;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed run result: ") + e.what());
  }
}

json to_json(const SweepTable& table) {
  json rows = json::array();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    json point = json::object();
    for (const auto& [k, v] : row.point) point[k] = v;
    json runs = json::array();
    for (const auto& run : row.runs) {
      json entry = {{"seed", run.seed}};
      if (run.test)
        entry["test"] = to_json(*run.test);
      else
        entry["error"] = run.error;
      runs.push_back(entry);
    }
    rows.push_back({{"point", point},
                    {"runs", runs},
                    {"complete", row.complete},
                    {"accuracy", {{"mean", row.accuracy.mean}, {"std", row.accuracy.std}}},
                    {"gap", {{"mean", row.gap.mean}, {"std", row.gap.std}}},
                    {"macro_f1", {{"mean", row.macro_f1.mean}, {"std", row.macro_f1.std}}},
                    {"dto", row.dto},
                    {"selected", table.best && *table.best == i}});
  }
  return {{"keys", table.keys},
          {"rows", rows},
          {"utopia", {{"accuracy", table.utopia.accuracy}, {"one_minus_gap", table.utopia.one_minus_gap}}},
          {"best", table.best ? json(*table.best) : json(nullptr)}};
}

std::string summary_csv(const RunResult& result) {
  std::string out = "split,step,accuracy,gap,macro_f1,dto\n";
  out += "dev_best," + metric_row(result.history.at(result.best_index)) + "\n";
  out += "test," + metric_row(result.test) + "\n";
  return out;
}

std::string history_csv(const RunResult& result) {
  std::string out = "step,accuracy,gap,macro_f1,dto\n";
  for (const auto& r : result.history) out += metric_row(r) + "\n";
  return out;
}

std::string sweep_csv(const SweepTable& table) {
  std::string out;
  for (const auto& k : table.keys) out += csv_field(k) + ",";
  out += "seeds,completed,accuracy_mean,accuracy_std,gap_mean,gap_std,macro_f1_mean,macro_f1_std,dto,selected\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    for (const auto& [k, v] : row.point) out += csv_field(v) + ",";
    std::size_t completed = 0;
    for (const auto& run : row.runs) completed += run.test ? 1 : 0;
    out += std::to_string(row.runs.size()) + "," + std::to_string(completed) + "," +
           percent(row.accuracy.mean) + "," + percent(row.accuracy.std) + "," + percent(row.gap.mean) +
           "," + percent(row.gap.std) + "," + percent(row.macro_f1.mean) + "," +
           percent(row.macro_f1.std) + "," + (row.complete ? fixed(row.dto, 4) : "") + "," +
           (table.best && *table.best == i ? "1" : "0") + "\n";
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

void write_run_report(const RunConfig& cfg, const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "config.txt", cfg.to_config().to_text());
  write_text_file(dir / "result.json", to_json(result).dump(2) + "\n");
  write_text_file(dir / "summary.csv", summary_csv(result));
  write_text_file(dir / "history.csv", history_csv(result));
  write_text_file(dir / "best.fcag",
                  std::string(result.best_checkpoint.begin(), result.best_checkpoint.end()));
}

void write_sweep_report(const SweepTable& table, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "sweep.json", to_json(table).dump(2) + "\n");
  write_text_file(dir / "sweep.csv", sweep_csv(table));
}

}  // namespace fairbandit::harness
