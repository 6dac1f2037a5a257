#include "fairbandit/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "fairbandit/errors.hpp"
#include "fairbandit/numkit/rng.hpp"

namespace fairbandit::harness {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
}

std::int64_t to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used == value.size() && value.front() != '-') return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + value + "'");
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <typename T, typename F>
std::string join(const std::vector<T>& values, F&& render) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += render(values[i]);
  }
  return out;
}

using Setter = std::function<void(agents::HyperParams&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& hyper_setters() {
  static const std::map<std::string, Setter> setters = {
      {"linucb.alpha", [](auto& hp, auto& k, auto& v) { hp.linucb.alpha = to_double(k, v); }},
      {"linucb.lambda", [](auto& hp, auto& k, auto& v) { hp.linucb.lambda = to_double(k, v); }},
      {"dqn.lr", [](auto& hp, auto& k, auto& v) { hp.dqn.lr = to_double(k, v); }},
      {"dqn.batch", [](auto& hp, auto& k, auto& v) { hp.dqn.batch = static_cast<int>(to_int(k, v)); }},
      {"dqn.eps_end", [](auto& hp, auto& k, auto& v) { hp.dqn.eps_end = to_double(k, v); }},
      {"dqn.eps_decay", [](auto& hp, auto& k, auto& v) { hp.dqn.eps_decay_fraction = to_double(k, v); }},
      {"dqn.capacity", [](auto& hp, auto& k, auto& v) { hp.dqn.capacity = static_cast<int>(to_int(k, v)); }},
      {"dqn.gamma", [](auto& hp, auto& k, auto& v) { hp.dqn.gamma = to_double(k, v); }},
      {"dqn.hidden", [](auto& hp, auto& k, auto& v) { hp.dqn.hidden = static_cast<int>(to_int(k, v)); }},
      {"ppo.lr_actor", [](auto& hp, auto& k, auto& v) { hp.ppo.lr_actor = to_double(k, v); }},
      {"ppo.lr_critic", [](auto& hp, auto& k, auto& v) { hp.ppo.lr_critic = to_double(k, v); }},
      {"ppo.batch", [](auto& hp, auto& k, auto& v) { hp.ppo.batch = static_cast<int>(to_int(k, v)); }},
      {"ppo.entropy", [](auto& hp, auto& k, auto& v) { hp.ppo.entropy_coef = to_double(k, v); }},
      {"ppo.clip", [](auto& hp, auto& k, auto& v) { hp.ppo.clip = to_double(k, v); }},
      {"ppo.epochs", [](auto& hp, auto& k, auto& v) { hp.ppo.epochs = static_cast<int>(to_int(k, v)); }},
      {"ppo.minibatch", [](auto& hp, auto& k, auto& v) { hp.ppo.minibatch = static_cast<int>(to_int(k, v)); }},
      {"ppo.normalize_adv", [](auto& hp, auto& k, auto& v) { hp.ppo.normalize_advantages = to_bool(k, v); }},
      {"ppo.hidden", [](auto& hp, auto& k, auto& v) { hp.ppo.hidden = static_cast<int>(to_int(k, v)); }},
      {"sup.lr", [](auto& hp, auto& k, auto& v) { hp.sup.lr = to_double(k, v); }},
      {"sup.batch", [](auto& hp, auto& k, auto& v) { hp.sup.batch = static_cast<int>(to_int(k, v)); }},
      {"sup.hidden", [](auto& hp, auto& k, auto& v) { hp.sup.hidden = static_cast<int>(to_int(k, v)); }},
  };
  return setters;
}

const std::vector<std::string>& run_keys() {
  static const std::vector<std::string> keys = {
      "algo", "scale", "seed", "epochs", "eval_every", "out", "preset", "split", "transforms",
      "data.path", "data.classes", "data.dim", "data.counts", "data.ratios", "data.separation",
      "data.group_signal", "data.noise", "data.seed", "data.stereotype"};
  return keys;
}

bool is_known_run_key(const std::string& key) {
  const auto& keys = run_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end() || hyper_setters().count(key) > 0;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
  KeyValueConfig kv;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    kv.set(key, value);
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

void KeyValueConfig::erase(const std::string& key) {
  std::erase_if(entries_, [&key](const auto& entry) { return entry.first == key; });
}

std::string KeyValueConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

data::SyntheticSpec synthetic_spec_from(const KeyValueConfig& kv) {
  data::SyntheticSpec spec;
  if (auto v = kv.get("data.classes")) spec.n_classes = static_cast<int>(to_int("data.classes", *v));
  if (auto v = kv.get("data.dim")) spec.dim = static_cast<int>(to_int("data.dim", *v));
  if (auto v = kv.get("data.counts")) {
    const auto items = split_list(*v);
    if (items.size() == 1 && spec.n_classes > 1)
      spec.class_counts.assign(static_cast<std::size_t>(spec.n_classes), to_int("data.counts", items[0]));
    else
      for (const auto& item : items) spec.class_counts.push_back(to_int("data.counts", item));
  } else {
    spec.class_counts.assign(static_cast<std::size_t>(spec.n_classes), 1000);
  }
  if (kv.contains("data.ratios") && kv.contains("data.stereotype"))
    throw ConfigError("data.ratios and data.stereotype are mutually exclusive");
  if (auto v = kv.get("data.stereotype")) {
    if (spec.n_classes != 2) throw ConfigError("data.stereotype needs data.classes = 2");
    const double s = to_double("data.stereotype", *v);
    spec.group0_ratio = {s, 1.0 - s};
  } else if (auto v = kv.get("data.ratios")) {
    const auto items = split_list(*v);
    if (items.size() == 1 && spec.n_classes > 1)
      spec.group0_ratio.assign(static_cast<std::size_t>(spec.n_classes), to_double("data.ratios", items[0]));
    else
      for (const auto& item : items) spec.group0_ratio.push_back(to_double("data.ratios", item));
  } else {
    spec.group0_ratio.assign(static_cast<std::size_t>(spec.n_classes), 0.5);
  }
  if (auto v = kv.get("data.separation")) spec.separation = to_double("data.separation", *v);
  if (auto v = kv.get("data.group_signal")) spec.group_signal = to_double("data.group_signal", *v);
  if (auto v = kv.get("data.noise")) spec.noise_sigma = to_double("data.noise", *v);
  if (auto v = kv.get("data.seed")) spec.seed = to_uint("data.seed", *v);
  spec.validate();
  return spec;
}

RunConfig run_config_from(const KeyValueConfig& kv) {
  for (const auto& [key, value] : kv.entries())
    if (!is_known_run_key(key)) throw ConfigError("unknown config key '" + key + "'");

  RunConfig cfg;
  if (auto v = kv.get("preset")) {
    cfg.preset = *v;
    cfg.hyper = agents::preset(*v);
  }
  if (auto v = kv.get("algo")) cfg.algorithm = agents::parse_algorithm(*v);
  if (auto v = kv.get("scale")) cfg.scale_scheme = reward::parse_scheme(*v);
  if (auto v = kv.get("seed")) cfg.seed = to_uint("seed", *v);
  if (auto v = kv.get("epochs"))
    cfg.epochs = static_cast<int>(to_int("epochs", *v));
  else if (cfg.algorithm == agents::Algorithm::linucb)
    cfg.epochs = 2;
  if (auto v = kv.get("eval_every")) {
    if (*v != "epoch") cfg.eval_every = to_int("eval_every", *v);
  }
  if (auto v = kv.get("out")) cfg.out_dir = *v;
  if (auto v = kv.get("split")) {
    const auto items = split_list(*v);
    if (items.size() != 3) throw ConfigError("split needs three fractions train,dev,test");
    cfg.fractions = {to_double("split", items[0]), to_double("split", items[1]),
                     to_double("split", items[2])};
  }
  if (auto v = kv.get("transforms"))
    for (const auto& item : split_list(*v)) cfg.transforms.push_back(data::Transform::parse(item));
  if (auto v = kv.get("data.path")) {
    cfg.data.path = *v;
  } else {
    cfg.data.synthetic = synthetic_spec_from(kv);
  }
  for (const auto& [key, value] : kv.entries()) {
    const auto it = hyper_setters().find(key);
    if (it != hyper_setters().end()) it->second(cfg.hyper, key, value);
  }
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (eval_every && *eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (!data.synthetic && data.path.empty()) throw ConfigError("no dataset source configured");
  if (!(hyper.linucb.alpha >= 0.0) || !(hyper.linucb.lambda > 0.0))
    throw ConfigError("linucb.alpha must be >= 0 and linucb.lambda > 0");
  if (hyper.sup.batch < 1 || hyper.dqn.batch < 1 || hyper.ppo.batch < 1)
    throw ConfigError("batch sizes must be >= 1");
  if (hyper.sup.hidden < 1 || hyper.dqn.hidden < 1 || hyper.ppo.hidden < 1)
    throw ConfigError("hidden sizes must be >= 1");
  if (!(hyper.sup.lr > 0 && hyper.dqn.lr > 0 && hyper.ppo.lr_actor > 0 && hyper.ppo.lr_critic > 0))
    throw ConfigError("learning rates must be positive");
}

KeyValueConfig RunConfig::to_config() const {
  KeyValueConfig kv;
  kv.set("algo", agents::algorithm_name(algorithm));
  kv.set("scale", reward::scheme_name(scale_scheme));
  kv.set("seed", std::to_string(seed));
  kv.set("epochs", std::to_string(epochs));
  kv.set("eval_every", eval_every ? std::to_string(*eval_every) : "epoch");
  kv.set("preset", preset);
  kv.set("split", format_double(fractions.train) + "," + format_double(fractions.dev) + "," +
                      format_double(fractions.test));
  kv.set("transforms", join(transforms, [](const data::Transform& t) { return t.name(); }));
  if (data.synthetic) {
    const auto& s = *data.synthetic;
    kv.set("data.classes", std::to_string(s.n_classes));
    kv.set("data.dim", std::to_string(s.dim));
    kv.set("data.counts", join(s.class_counts, [](std::int64_t c) { return std::to_string(c); }));
    kv.set("data.ratios", join(s.group0_ratio, format_double));
    kv.set("data.separation", format_double(s.separation));
    kv.set("data.group_signal", format_double(s.group_signal));
    kv.set("data.noise", format_double(s.noise_sigma));
    kv.set("data.seed", std::to_string(s.seed));
  } else {
    kv.set("data.path", data.path.string());
  }
  const auto& hp = hyper;
  kv.set("linucb.alpha", format_double(hp.linucb.alpha));
  kv.set("linucb.lambda", format_double(hp.linucb.lambda));
  kv.set("dqn.lr", format_double(hp.dqn.lr));
  kv.set("dqn.batch", std::to_string(hp.dqn.batch));
  kv.set("dqn.eps_end", format_double(hp.dqn.eps_end));
  kv.set("dqn.eps_decay", format_double(hp.dqn.eps_decay_fraction));
  kv.set("dqn.capacity", std::to_string(hp.dqn.capacity));
  kv.set("dqn.gamma", format_double(hp.dqn.gamma));
  kv.set("dqn.hidden", std::to_string(hp.dqn.hidden));
  kv.set("ppo.lr_actor", format_double(hp.ppo.lr_actor));
  kv.set("ppo.lr_critic", format_double(hp.ppo.lr_critic));
  kv.set("ppo.batch", std::to_string(hp.ppo.batch));
  kv.set("ppo.entropy", format_double(hp.ppo.entropy_coef));
  kv.set("ppo.clip", format_double(hp.ppo.clip));
  kv.set("ppo.epochs", std::to_string(hp.ppo.epochs));
  kv.set("ppo.minibatch", std::to_string(hp.ppo.minibatch));
  kv.set("ppo.normalize_adv", hp.ppo.normalize_advantages ? "true" : "false");
  kv.set("ppo.hidden", std::to_string(hp.ppo.hidden));
  kv.set("sup.lr", format_double(hp.sup.lr));
  kv.set("sup.batch", std::to_string(hp.sup.batch));
  kv.set("sup.hidden", std::to_string(hp.sup.hidden));
  return kv;
}

std::uint64_t RunConfig::hash() const { return numkit::Rng::fnv1a64(to_config().to_text()); }

data::Dataset load_dataset(const DataSource& source) {
  if (source.synthetic) return data::generate_synthetic(*source.synthetic);
  if (!std::filesystem::exists(source.path))
    throw ConfigError("data.path '" + source.path.string() + "' does not exist");
  if (source.path.extension() == ".csv") return data::load_csv(source.path);
  return data::load_embeddings(source.path);
}

SweepConfig SweepConfig::from(const KeyValueConfig& kv) {
  SweepConfig sc;
  for (const auto& [key, value] : kv.entries()) {
    if (key.rfind("grid.", 0) == 0) {
      const auto target = key.substr(5);
      if (!is_known_run_key(target)) throw ConfigError("grid over unknown key '" + target + "'");
      sc.grid.emplace_back(target, split_list(value));
    } else if (key == "seeds") {
      for (const auto& item : split_list(value)) sc.seeds.push_back(to_uint("seeds", item));
    } else if (key == "jobs") {
      sc.jobs = static_cast<int>(to_int("jobs", value));
    } else {
      sc.base.set(key, value);
    }
  }
  if (sc.seeds.empty()) {
    const auto seed = kv.get("seed");
    sc.seeds.push_back(seed ? to_uint("seed", *seed) : 0);
  }
  sc.validate();
  return sc;
}

void SweepConfig::validate() const {
  if (grid.empty()) throw ConfigError("sweep grid is empty (add grid.<key> = v1,v2 lines)");
  for (const auto& [key, values] : grid)
    if (values.empty()) throw ConfigError("grid key '" + key + "' has no values");
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

std::vector<std::vector<std::pair<std::string, std::string>>> SweepConfig::grid_points() const {
  std::vector<std::vector<std::pair<std::string, std::string>>> points{{}};
  for (const auto& [key, values] : grid) {
    std::vector<std::vector<std::pair<std::string, std::string>>> next;
    for (const auto& prefix : points) {
      for (const auto& value : values) {
        auto point = prefix;
        point.emplace_back(key, value);
        next.push_back(std::move(point));
      }
    }
    points = std::move(next);
  }
  return points;
}

}  // namespace fairbandit::harness
