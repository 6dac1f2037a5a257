// Command-line front end: gen-data, scales, train, sweep, evaluate.
// Exit codes: 0 success, 1 configuration or input error, 2 runtime failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairbandit/agents/agent.hpp"
#include "fairbandit/data/dataset.hpp"
#include "fairbandit/errors.hpp"
#include "fairbandit/harness/config.hpp"
#include "fairbandit/harness/report.hpp"
#include "fairbandit/harness/sweep.hpp"
#include "fairbandit/harness/train.hpp"
#include "fairbandit/metrics/metrics.hpp"
#include "fairbandit/reward/scales.hpp"

namespace fs = std::filesystem;
using namespace fairbandit;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("-c,--config", common.config_path, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", common.overrides, "override a config key (key=value, repeatable)");
}

harness::KeyValueConfig load_common(const Common& common) {
  auto kv = common.config_path.empty() ? harness::KeyValueConfig{}
                                       : harness::KeyValueConfig::load(common.config_path);
  for (const auto& item : common.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + item + "'");
    kv.set(item.substr(0, eq), item.substr(eq + 1));
  }
  return kv;
}

// Flags that mirror config keys. Each one present on the command line wins.
struct RunFlags {
  std::optional<std::string> seed, algo, scale, epochs, eval_every, out;

  void add(CLI::App* cmd, bool required) {
    auto opt = [&](const char* name, std::optional<std::string>& slot, const char* help) {
      auto* o = cmd->add_option(name, slot, help);
      if (required) o->required();
    };
    opt("--seed", seed, "root seed");
    opt("--algo", algo, "sup | linucb | dqn | ppo");
    opt("--scale", scale, "uniform | rho_plus | rho_minus | eo | ipw");
    opt("--epochs", epochs, "training epochs");
    opt("--eval-every", eval_every, "dev evaluation cadence in steps, or 'epoch'");
    opt("--out", out, "output directory");
  }

  void apply(harness::KeyValueConfig& kv) const {
    if (seed) kv.set("seed", *seed);
    if (algo) kv.set("algo", *algo);
    if (scale) kv.set("scale", *scale);
    if (epochs) kv.set("epochs", *epochs);
    if (eval_every) kv.set("eval_every", *eval_every);
    if (out) kv.set("out", *out);
  }
};

void print_report(const char* label, const metrics::EvalReport& r) {
  std::printf("%-9s step %-8lld acc %5s  gap %5s  f1 %5s  dto %.4f\n", label,
              static_cast<long long>(r.step), harness::percent(r.accuracy).c_str(),
              harness::percent(r.gap_rms).c_str(), harness::percent(r.macro_f1).c_str(),
              metrics::dto(r, metrics::UtopianPoint::ones()));
}

int cmd_gen_data(const Common& common, const std::string& out) {
  const auto spec = harness::synthetic_spec_from(load_common(common));
  const auto ds = data::generate_synthetic(spec);
  data::save_embeddings(ds, out);
  std::printf("wrote %lld examples (d=%lld, %d classes) to %s\n", static_cast<long long>(ds.size()),
              static_cast<long long>(ds.dim()), ds.n_classes(), out.c_str());
  return 0;
}

int cmd_scales(const Common& common, const std::string& data_path, const std::string& scheme,
               const std::string& out_dir) {
  auto kv = load_common(common);
  if (!data_path.empty()) kv.set("data.path", data_path);
  harness::DataSource source;
  if (auto p = kv.get("data.path"))
    source.path = *p;
  else
    source.synthetic = harness::synthetic_spec_from(kv);
  const auto ct = data::counts(harness::load_dataset(source));
  std::vector<reward::Scheme> schemes;
  if (scheme == "all")
    schemes.assign(std::begin(reward::kAllSchemes), std::end(reward::kAllSchemes));
  else
    schemes.push_back(reward::parse_scheme(scheme));
  if (!out_dir.empty()) fs::create_directories(out_dir);
  for (const auto s : schemes) {
    const auto csv = reward::to_csv(reward::build_scales(s, ct));
    if (out_dir.empty())
      std::cout << csv << "\n";
    else
      harness::write_text_file(fs::path(out_dir) / ("scales_" + reward::scheme_name(s) + ".csv"), csv);
  }
  return 0;
}

int cmd_train(const Common& common, const RunFlags& flags, bool quiet) {
  auto kv = load_common(common);
  flags.apply(kv);
  const auto cfg = harness::run_config_from(kv);
  harness::EvalCallback on_eval;
  if (!quiet) on_eval = [](const metrics::EvalReport& r) { print_report("dev", r); };
  try {
    const auto result = harness::train_run(cfg, on_eval);
    if (!cfg.out_dir.empty()) harness::write_run_report(cfg, result, cfg.out_dir);
    print_report("best dev", result.history[result.best_index]);
    print_report("test", result.test);
    return 0;
  } catch (const harness::TrainingFailure& failure) {
    if (!cfg.out_dir.empty()) {
      fs::create_directories(cfg.out_dir);
      nlohmann::json partial = nlohmann::json::array();
      for (const auto& r : failure.partial_history) partial.push_back(harness::to_json(r));
      harness::write_text_file(fs::path(cfg.out_dir) / "partial_history.json",
                               nlohmann::json{{"error", failure.what()}, {"history", partial}}.dump(2) + "\n");
    }
    throw;
  }
}

int cmd_sweep(const Common& common, const RunFlags& flags, std::optional<int> jobs) {
  auto kv = load_common(common);
  flags.apply(kv);
  if (jobs) kv.set("jobs", std::to_string(*jobs));
  const auto sc = harness::SweepConfig::from(kv);
  const auto table = harness::sweep(sc);
  const auto out = sc.base.get("out");
  if (out) harness::write_sweep_report(table, *out);
  std::cout << harness::sweep_csv(table);
  for (const auto& row : table.rows)
    for (const auto& run : row.runs)
      if (!run.test) std::fprintf(stderr, "[warn] seed %llu failed: %s\n",
                                  static_cast<unsigned long long>(run.seed), run.error.c_str());
  if (!table.best) {
    std::fprintf(stderr, "no grid point completed\n");
    return 2;
  }
  return 0;
}

int cmd_evaluate(const std::string& checkpoint, const std::string& data_path, const std::string& out) {
  const auto loaded = agents::read_checkpoint_file(checkpoint);
  harness::DataSource source;
  source.path = data_path;
  const auto ds = harness::load_dataset(source);
  if (ds.dim() != loaded.agent->dim())
    throw DimensionError("dataset context dimension", static_cast<std::size_t>(loaded.agent->dim()),
                         static_cast<std::size_t>(ds.dim()));
  const auto report = metrics::evaluate(*loaded.agent, ds, 0);
  const auto text = harness::to_json(report).dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    harness::write_text_file(out, text);
  print_report(agents::algorithm_name(loaded.agent->algorithm()).c_str(), report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness-aware reward scaling for contextual-bandit classifiers"};
  app.require_subcommand(1);
  bool quiet_warnings = false;
  app.add_flag("--no-warnings", quiet_warnings, "silence [warn] lines");

  Common gen_common;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic FCB1 dataset from data.* keys");
  add_common(gen, gen_common);
  gen->add_option("-o,--out", gen_out, "output .fcb path")->required();

  Common scales_common;
  std::string scales_data, scales_scheme = "all", scales_out;
  auto* scales = app.add_subcommand("scales", "print or write reward-scale matrices");
  add_common(scales, scales_common);
  scales->add_option("--data", scales_data, "dataset path (.fcb or .csv)");
  scales->add_option("--scheme", scales_scheme, "scheme name or 'all'");
  scales->add_option("-o,--out", scales_out, "directory for scales_<scheme>.csv files");

  Common train_common;
  RunFlags train_flags;
  bool train_quiet = false;
  auto* train = app.add_subcommand("train", "run one training configuration");
  add_common(train, train_common);
  train_flags.add(train, true);
  train->add_flag("-q,--quiet", train_quiet, "do not print dev evaluations");

  Common sweep_common;
  RunFlags sweep_flags;
  std::optional<int> sweep_jobs;
  auto* sweep = app.add_subcommand("sweep", "grid x seed sweep");
  add_common(sweep, sweep_common);
  sweep_flags.add(sweep, false);
  sweep->add_option("-j,--jobs", sweep_jobs, "concurrent runs");

  std::string eval_ckpt, eval_data, eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on a dataset");
  evaluate->add_option("--checkpoint", eval_ckpt, "FCAG checkpoint")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--data", eval_data, "dataset path (.fcb or .csv)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("-o,--out", eval_out, "write the report JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  set_warnings_enabled(!quiet_warnings);

  try {
    if (*gen) return cmd_gen_data(gen_common, gen_out);
    if (*scales) return cmd_scales(scales_common, scales_data, scales_scheme, scales_out);
    if (*train) return cmd_train(train_common, train_flags, train_quiet);
    if (*sweep) return cmd_sweep(sweep_common, sweep_flags, sweep_jobs);
    if (*evaluate) return cmd_evaluate(eval_ckpt, eval_data, eval_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const DimensionError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
