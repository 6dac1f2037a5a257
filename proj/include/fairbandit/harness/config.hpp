#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairbandit/agents/agent.hpp"
#include "fairbandit/agents/hyperparams.hpp"
#include "fairbandit/data/dataset.hpp"
#include "fairbandit/data/synthetic.hpp"
#include "fairbandit/data/transforms.hpp"
#include "fairbandit/reward/scales.hpp"

namespace fairbandit::harness {

// Ordered `key = value` pairs. Text format: one pair per line, `#` starts a
// comment, blank lines ignored, later keys override earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  std::optional<std::string> get(const std::string& key) const;
  bool contains(const std::string& key) const { return get(key).has_value(); }
  void erase(const std::string& key);
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string to_text() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct DataSource {
  std::optional<data::SyntheticSpec> synthetic;
  std::filesystem::path path;  // .csv loads as CSV, anything else as FCB1
};

struct RunConfig {
  agents::Algorithm algorithm = agents::Algorithm::sup;
  reward::Scheme scale_scheme = reward::Scheme::uniform;
  DataSource data;
  std::vector<data::Transform> transforms;
  data::SplitFractions fractions;
  int epochs = 10;
  std::optional<std::int64_t> eval_every;  // empty: once per epoch (|train| steps)
  std::uint64_t seed = 0;
  std::string preset = "biasbios";
  agents::HyperParams hyper = agents::preset("biasbios");
  std::string out_dir;

  void validate() const;
  // Canonical key = value rendering; hashing it gives the config hash.
  KeyValueConfig to_config() const;
  std::uint64_t hash() const;
};

// Builds a RunConfig from keys. The preset is applied first, individual
// hyperparameter keys afterwards, so `sup.lr` beats `preset`.
RunConfig run_config_from(const KeyValueConfig& kv);

data::Dataset load_dataset(const DataSource& source);
data::SyntheticSpec synthetic_spec_from(const KeyValueConfig& kv);

std::vector<std::string> split_list(const std::string& text);

struct SweepConfig {
  KeyValueConfig base;
  // hyperparameter key -> candidate values, in declaration order
  std::vector<std::pair<std::string, std::vector<std::string>>> grid;
  std::vector<std::uint64_t> seeds;
  int jobs = 1;

  void validate() const;
  // Keys `grid.<key> = v1,v2,...`, `seeds = s1,s2,...` and `jobs = n`; the rest is the base run.
  static SweepConfig from(const KeyValueConfig& kv);
  // Cartesian product, last grid key varying fastest.
  std::vector<std::vector<std::pair<std::string, std::string>>> grid_points() const;
};

}  // namespace fairbandit::harness
