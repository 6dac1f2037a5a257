// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "fairbandit/agents/agent.hpp"
#include "fairbandit/agents/linucb.hpp"
#include "fairbandit/agents/losses.hpp"
#include "fairbandit/agents/supervised.hpp"
#include "fairbandit/data/synthetic.hpp"
#include "fairbandit/data/transforms.hpp"
#include "fairbandit/harness/config.hpp"
#include "fairbandit/harness/sweep.hpp"
#include "fairbandit/harness/train.hpp"
#include "fairbandit/metrics/metrics.hpp"
#include "fairbandit/numkit.hpp"
#include "fairbandit/reward/scales.hpp"
#include "support/probe.hpp"

using namespace fairbandit;
using numkit::Rng;

namespace {

// Tolerances and budgets.
constexpr double kExactTol = 1e-12;
constexpr double kGradTol = 1e-4;
constexpr double kInverseTol = 1e-8;
constexpr double kLearnFloor = 0.95;
constexpr double kGapReduction = 0.30;
constexpr double kAccuracyBand = 0.03;
constexpr double kProbeRaised = 0.99;
constexpr double kProbeDebiased = 0.60;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

Eigen::VectorXd random_vector(Eigen::Index n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

data::CountTable random_table(Rng& rng) {
  const int k = 1 + static_cast<int>(rng.below(8));
  std::vector<std::vector<std::int64_t>> cells;
  for (int a = 0; a < k; ++a)
    cells.push_back({1 + static_cast<std::int64_t>(rng.below(5000)), 1 + static_cast<std::int64_t>(rng.below(5000))});
  return data::CountTable(cells);
}

harness::SweepTable run_sweep(const std::string& text) {
  auto kv = harness::KeyValueConfig::parse(text, "<acceptance>");
  kv.set("jobs", std::to_string(jobs()));
  return harness::sweep(harness::SweepConfig::from(kv));
}

// ---------------------------------------------------------------- 1

Outcome scale_oracles() {
  Outcome o;
  const data::CountTable ct({{450, 450}, {900, 100}});
  const auto plus = reward::scale_rho_plus(ct);
  const auto minus = reward::scale_rho_minus(ct);
  const auto eo = reward::scale_eo(ct);
  const auto ipw = reward::scale_ipw(ct);
  o.require(std::abs(plus.at(1, 0) - 1.0 / 9.0) <= kExactTol && plus.at(1, 1) == 1.0, "rho_plus majority 1/9");
  o.require(std::abs(minus.at(1, 1) - 9.0) <= kExactTol && minus.at(1, 0) == 1.0, "rho_minus minority 9");
  o.require(std::abs(eo.at(1, 0) - 0.5 / 0.9) <= kExactTol && std::abs(eo.at(1, 1) - 5.0) <= kExactTol,
            "eo (0.5556, 5)");
  o.require(std::abs(ipw.at(1, 0) - 1900.0 / 900.0) <= kExactTol, "ipw 1900/900");
  o.require(reward::scale_uniform(ct).w.isOnes(0.0), "uniform ones");

  Rng rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto table = random_table(rng);
    const auto w = reward::scale_eo(table);
    for (int a = 0; a < table.n_classes(); ++a) {
      const double c0 = static_cast<double>(table.at(a, 0)), c1 = static_cast<double>(table.at(a, 1));
      const double m0 = w.at(a, 0) * c0, m1 = w.at(a, 1) * c1;
      worst = std::max({worst, std::abs(m0 - m1) / std::max(m0, 1.0), std::abs((m0 + m1) / (c0 + c1) - 1.0)});
    }
  }
  o.require(worst <= kExactTol, "eo axioms");
  o.note("worst eo axiom error " + fmt("%.2e", worst) + " over 1000 tables");
  return o;
}

// ---------------------------------------------------------------- 2

Outcome metric_oracles() {
  using namespace metrics;
  Outcome o;
  auto cells_dataset = [](const std::vector<std::array<int, 4>>& cells, std::vector<int>& predictions) {
    std::vector<int> y, g;
    for (const auto& [a, grp, n, hits] : cells)
      for (int i = 0; i < n; ++i) {
        y.push_back(a);
        g.push_back(grp);
        predictions.push_back(i < hits ? a : 1 - a);
      }
    return testsupport::labeled_dataset(y, g, 2);
  };
  {
    std::vector<int> p;
    const auto ds = cells_dataset({{0, 0, 10, 9}, {0, 1, 10, 7}}, p);
    const auto r = evaluate_predictions(p, ds, 0);
    o.require(r.tpr_gap[0] && std::abs(*r.tpr_gap[0] - 0.2) <= kExactTol, "gap 0.2");
    o.require(std::abs(r.gap_rms - 0.2) <= kExactTol, "GAP 0.2");
  }
  {
    std::vector<int> p;
    const auto ds = cells_dataset({{0, 0, 10, 9}, {0, 1, 10, 7}, {1, 0, 5, 5}, {1, 1, 5, 5}}, p);
    const auto r = evaluate_predictions(p, ds, 0);
    o.require(std::abs(r.gap_rms - std::sqrt(0.02)) <= kExactTol, "GAP 0.1414");
    // class 0: tp 16, fp 0, fn 4; class 1: tp 10, fp 4, fn 0.
    const double f1 = (32.0 / 36.0 + 20.0 / 24.0) / 2.0;
    o.require(std::abs(r.macro_f1 - f1) <= kExactTol, "macro-F1");
  }
  {
    const std::vector<int> y = {0, 1, 0, 1};
    const auto r = evaluate_predictions(y, testsupport::labeled_dataset(y, {0, 0, 1, 1}, 2), 0);
    o.require(r.accuracy == 1.0 && r.gap_rms == 0.0 && r.macro_f1 == 1.0, "perfect predictor");
  }
  auto at = [](double acc, double gap) {
    EvalReport r;
    r.accuracy = acc;
    r.gap_rms = gap;
    return r;
  };
  o.require(std::abs(dto(0.8, 0.1, UtopianPoint::ones()) - std::sqrt(0.05)) <= kExactTol, "dto 0.2236");
  o.require(std::abs(dto(0.8, 0.1, UtopianPoint{0.85, 0.95, UtopiaMode::best_observed}) - std::sqrt(0.005)) <=
                kExactTol,
            "dto 0.0707");
  const std::vector<EvalReport> two = {at(0.9, 0.3), at(0.8, 0.1)};
  o.require(std::abs(dto(two[0], UtopianPoint::ones()) - std::sqrt(0.1)) <= kExactTol, "dto 0.3162");
  o.require(select_best(two, UtopiaMode::absolute_ones) == 1, "select_best second");
  o.require(select_best(std::vector<EvalReport>{at(0.8, 0.1), at(0.8, 0.1)}, UtopiaMode::absolute_ones) == 0,
            "select_best tie");
  o.require(select_best(std::vector<EvalReport>{at(0.5, 0.5)}, UtopiaMode::absolute_ones) == 0,
            "select_best single");

  Rng rng(77);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int k = 2 + static_cast<int>(rng.below(5));
    const int n = 20 + static_cast<int>(rng.below(200));
    std::vector<int> y, g, flipped, p;
    for (int i = 0; i < n; ++i) {
      y.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(k))));
      g.push_back(static_cast<int>(rng.below(2)));
      flipped.push_back(1 - g.back());
      p.push_back(rng.uniform() < 0.6 ? y.back() : static_cast<int>(rng.below(static_cast<std::uint64_t>(k))));
    }
    const auto a = evaluate_predictions(p, testsupport::labeled_dataset(y, g, k), 0);
    const auto b = evaluate_predictions(p, testsupport::labeled_dataset(y, flipped, k), 0);
    worst = std::max({worst, std::abs(a.gap_rms - b.gap_rms), std::abs(a.accuracy - b.accuracy),
                      std::abs(a.macro_f1 - b.macro_f1),
                      std::abs(dto(a, UtopianPoint::ones()) - dto(b, UtopianPoint::ones()))});
    for (int c = 0; c < k; ++c) {
      const auto& ga = a.tpr_gap[static_cast<std::size_t>(c)];
      const auto& gb = b.tpr_gap[static_cast<std::size_t>(c)];
      if (ga.has_value() != gb.has_value()) worst = 1.0;
      else if (ga) worst = std::max(worst, std::abs(*ga + *gb));
    }
  }
  o.require(worst <= kExactTol, "group relabel invariance");
  o.note("relabel max deviation " + fmt("%.2e", worst) + " over 1000 sets");
  return o;
}

// ---------------------------------------------------------------- 3

template <typename F>
double fd_error(const agents::MlpD& net, F&& loss) {
  numkit::LossWithGradient<double> fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd* grad) {
    const auto candidate = numkit::unflatten(p, net);
    agents::MlpD g;
    const double v = loss(candidate, grad ? &g : nullptr);
    if (grad) *grad = numkit::flatten(g);
    return v;
  };
  return numkit::finite_diff_check(fn, numkit::flatten(net));
}

Outcome numerics() {
  Outcome o;
  Rng rng(303);
  double fd_dqn = 0, fd_actor = 0, fd_critic = 0, fd_ce = 0;
  for (int t = 0; t < 10; ++t) {
    const int d = 4, k = 3, n = 8;
    Eigen::MatrixXd X(d, n);
    for (int j = 0; j < n; ++j) X.col(j) = random_vector(d, rng);
    std::vector<int> actions(n);
    for (auto& a : actions) a = static_cast<int>(rng.below(k));
    const auto r = random_vector(n, rng);
    const auto q = numkit::make_mlp(d, 16, k, rng);
    fd_dqn = std::max(fd_dqn, fd_error(q, [&](const agents::MlpD& m, agents::MlpD* g) {
      return agents::dqn_loss(m, X, actions, r, g);
    }));
    const auto actor = numkit::make_mlp(d, 16, k, rng);
    Eigen::VectorXd old_lp(n);
    for (int j = 0; j < n; ++j)
      old_lp(j) = numkit::log_softmax(numkit::mlp_forward(actor, X.col(j)))(actions[static_cast<std::size_t>(j)]) +
                  0.3 * rng.normal();
    const auto adv = random_vector(n, rng);
    fd_actor = std::max(fd_actor, fd_error(actor, [&](const agents::MlpD& m, agents::MlpD* g) {
      return agents::ppo_actor_loss(m, X, actions, old_lp, adv, 0.2, 0.1, g).loss;
    }));
    const auto critic = numkit::make_mlp(d, 16, 1, rng);
    fd_critic = std::max(fd_critic, fd_error(critic, [&](const agents::MlpD& m, agents::MlpD* g) {
      return agents::critic_loss(m, X, r, g);
    }));
    const auto clf = numkit::make_mlp(d, 16, k, rng);
    Eigen::VectorXd w(n);
    for (int j = 0; j < n; ++j) w(j) = 0.1 + 5.0 * rng.uniform();
    fd_ce = std::max(fd_ce, fd_error(clf, [&](const agents::MlpD& m, agents::MlpD* g) {
      return agents::weighted_cross_entropy(m, X, actions, w, g);
    }));
  }
  o.require(fd_dqn <= kGradTol, "dqn gradient");
  o.require(fd_actor <= kGradTol && fd_critic <= kGradTol, "ppo gradients");
  o.require(fd_ce <= kGradTol, "weighted cross-entropy gradient");

  double sm = 0.0;
  for (const int d : {2, 8, 32})
    for (int seq = 0; seq < 100; ++seq) {
      const double lambda = 0.5 + rng.uniform();
      auto ic = numkit::InverseCovariance<double>::identity(d, lambda);
      Eigen::MatrixXd a = lambda * Eigen::MatrixXd::Identity(d, d);
      for (int k = 0; k < 50; ++k) {
        const auto x = random_vector(d, rng);
        numkit::sherman_morrison_update(ic, x);
        a += x * x.transpose();
      }
      const Eigen::MatrixXd direct = a.inverse();
      sm = std::max(sm, (ic.a_inv - direct).norm() / direct.norm());
    }
  o.require(sm <= kInverseTol, "sherman-morrison");

  double ridge = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 8;
    agents::LinUcbAgent agent(d, 2, {1.5, 1.0});
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
    for (int k = 0; k < 200; ++k) {
      const auto x = random_vector(d, rng);
      const double rew = rng.normal();
      agent.update(x, 1, rew);
      A += x * x.transpose();
      b += rew * x;
    }
    const Eigen::VectorXd closed = A.ldlt().solve(b);
    ridge = std::max(ridge, (agent.theta(1).transpose() - closed).cwiseAbs().maxCoeff());
  }
  o.require(ridge <= kInverseTol, "linucb ridge");
  o.note("fd dqn/actor/critic/ce " + fmt("%.1e", fd_dqn) + "/" + fmt("%.1e", fd_actor) + "/" +
         fmt("%.1e", fd_critic) + "/" + fmt("%.1e", fd_ce) + ", sm " + fmt("%.1e", sm) + ", ridge " +
         fmt("%.1e", ridge));
  return o;
}

// ---------------------------------------------------------------- 4

Outcome learnability() {
  Outcome o;
  const std::string base =
      "preset = biasbios\nscale = uniform\nseed = 1\n"
      "data.classes = 2\ndata.dim = 16\ndata.counts = 3077\ndata.group_signal = 0\n"
      "data.separation = 4\ndata.noise = 1\n";
  for (const auto* algo : {"sup", "linucb", "dqn", "ppo"}) {
    auto kv = harness::KeyValueConfig::parse(base);
    kv.set("algo", algo);
    kv.set("epochs", std::string(algo) == "linucb" ? "2" : "10");
    const auto cfg = harness::run_config_from(kv);
    const auto result = harness::train_run(cfg);
    const auto n_train = result.total_steps / cfg.epochs;
    o.require(result.test.accuracy >= kLearnFloor, std::string(algo) + " accuracy");
    o.note(std::string(algo) + " " + fmt("%.3f", result.test.accuracy));
    if (std::string(algo) == "sup") o.note("|train| " + std::to_string(n_train));
  }
  return o;
}

// ---------------------------------------------------------------- 5

Outcome fairness_direction() {
  Outcome o;
  const auto table = run_sweep(
      "algo = sup\npreset = emoji\nepochs = 10\n"
      "data.classes = 2\ndata.dim = 32\ndata.counts = 15385\ndata.stereotype = 0.1\n"
      "data.group_signal = 0.5\ndata.noise = 0.4\ndata.separation = 0.5\n"
      "grid.scale = uniform,eo\nseeds = 1,2,3,4,5\n");
  const auto& uni = table.rows.at(0);
  const auto& eo = table.rows.at(1);
  o.require(uni.complete && eo.complete, "all seeds finished");
  const double reduction = 1.0 - eo.gap.mean / uni.gap.mean;
  o.require(reduction >= kGapReduction, "GAP reduction");
  o.require(std::abs(eo.accuracy.mean - uni.accuracy.mean) <= kAccuracyBand, "accuracy band");
  o.note("uniform acc " + fmt("%.3f", uni.accuracy.mean) + " GAP " + fmt("%.3f", uni.gap.mean) + ", eo acc " +
         fmt("%.3f", eo.accuracy.mean) + " GAP " + fmt("%.3f", eo.gap.mean) + ", reduction " +
         fmt("%.0f%%", 100 * reduction));
  return o;
}

// ---------------------------------------------------------------- 6

Outcome sparse_class() {
  Outcome o;
  constexpr int kSparse = 5;
  auto kv = harness::KeyValueConfig::parse(
      "algo = sup\npreset = biasbios\nscale = uniform\nseed = 1\nepochs = 30\n"
      "data.classes = 6\ndata.dim = 16\ndata.counts = 2000,2000,2000,2000,2000,50\n"
      "data.separation = 8\ndata.noise = 1\ndata.group_signal = 0.5\n");
  const auto cfg = harness::run_config_from(kv);
  const auto full = harness::load_dataset(cfg.data);
  const auto freq = static_cast<double>(data::counts(full).class_total(kSparse)) / static_cast<double>(full.size());
  o.require(std::abs(freq - 0.005) < 0.0005, "sparse class at 0.5%");

  const auto result = harness::train_run(cfg);
  const numkit::Rng root(cfg.seed);
  const auto splits = data::split(full, cfg.fractions, root.fork("split").seed());
  const auto loaded = agents::load_checkpoint(result.best_checkpoint);
  const auto* sup = dynamic_cast<const agents::SupervisedAgent*>(loaded.agent.get());
  o.require(sup != nullptr, "supervised checkpoint");
  if (!sup) return o;

  const auto& test = splits.test;
  const auto trained = metrics::evaluate(*sup, test);
  std::vector<int> forced(static_cast<std::size_t>(test.size()));
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    Eigen::VectorXd logits = numkit::mlp_forward(sup->classifier(), test.context(i));
    logits(kSparse) = -std::numeric_limits<double>::infinity();
    forced[static_cast<std::size_t>(i)] = numkit::argmax(logits);
  }
  const auto never = metrics::evaluate_predictions(forced, test);
  const auto& gap = never.tpr_gap[kSparse];
  o.require(gap.has_value() && *gap == 0.0, "forced TPR gap exactly 0");
  o.require(never.macro_f1 < trained.macro_f1, "forced macro-F1 strictly lower");
  o.note("sparse test samples " + std::to_string(data::counts(test).class_total(kSparse)) + ", trained F1 " +
         fmt("%.4f", trained.macro_f1) + " vs forced " + fmt("%.4f", never.macro_f1) + ", trained sparse gap " +
         (trained.tpr_gap[kSparse] ? fmt("%.3f", *trained.tpr_gap[kSparse]) : std::string("n/a")));
  return o;
}

// ---------------------------------------------------------------- 7

Outcome stereotype_sweep() {
  Outcome o;
  for (const auto* algo : {"linucb", "sup", "ppo", "dqn"}) {
    const auto table = run_sweep(std::string("algo = ") + algo +
                                 "\npreset = emoji\nscale = eo\n"
                                 "data.classes = 2\ndata.dim = 32\ndata.counts = 3077\n"
                                 "data.group_signal = 0.5\ndata.noise = 0.4\ndata.separation = 0.5\n"
                                 "grid.data.stereotype = 0.1,0.3,0.5,0.7,0.9\nseeds = 1,2,3,4,5\n");
    bool complete = true;
    for (const auto& row : table.rows) complete = complete && row.complete;
    o.require(complete, std::string(algo) + " all runs finished");
    const double g01 = table.rows.at(0).gap.mean, g05 = table.rows.at(2).gap.mean, g09 = table.rows.at(4).gap.mean;
    o.require(g05 <= g01 && g05 <= g09, std::string(algo) + " balanced GAP lowest of the ends");
    o.note(std::string(algo) + " GAP " + fmt("%.1f", 100 * g01) + "/" + fmt("%.1f", 100 * g05) + "/" +
           fmt("%.1f", 100 * g09));
  }
  return o;
}

// ---------------------------------------------------------------- 8

Outcome transforms() {
  Outcome o;
  data::SyntheticSpec plain;
  plain.dim = 8;
  plain.class_counts = {1000, 1000};
  plain.group0_ratio = {0.5, 0.5};
  plain.separation = 2.0;
  plain.seed = 5;
  const double before_append = testsupport::group_probe_accuracy(data::generate_synthetic(plain));
  const double raised = testsupport::group_probe_accuracy(data::append_group_feature(data::generate_synthetic(plain)));
  o.require(raised >= kProbeRaised, "append_group_feature probe");

  auto signal = plain;
  signal.class_counts = {2000, 2000};
  signal.group_signal = 0.5;
  signal.noise_sigma = 0.4;
  const auto ds = data::generate_synthetic(signal);
  const double before = testsupport::group_probe_accuracy(ds);
  const double after = testsupport::group_probe_accuracy(data::mp_debias(ds));
  o.require(after <= kProbeDebiased, "mp_debias probe");

  auto skewed = plain;
  skewed.group0_ratio = {0.1, 0.75};
  const auto down = data::eo_downsample(data::generate_synthetic(skewed), 11);
  const auto ct = data::counts(down);
  bool parity = true;
  for (int a = 0; a < ct.n_classes(); ++a) parity = parity && ct.at(a, 0) == ct.at(a, 1) && ct.at(a, 0) > 0;
  o.require(parity, "eo_downsample parity");
  o.note("probe " + fmt("%.3f", before_append) + " -> appended " + fmt("%.3f", raised) + "; signal " +
         fmt("%.3f", before) + " -> debiased " + fmt("%.3f", after) + "; cells " + std::to_string(ct.at(0, 0)) +
         "/" + std::to_string(ct.at(1, 0)));
  return o;
}

// ---------------------------------------------------------------- 9

Outcome determinism() {
  Outcome o;
  for (const auto* algo : {"sup", "linucb", "dqn", "ppo"}) {
    auto kv = harness::KeyValueConfig::parse(
        "preset = emoji\nscale = eo\nseed = 9\nepochs = 2\neval_every = 200\n"
        "data.classes = 3\ndata.dim = 8\ndata.counts = 400\ndata.ratios = 0.2,0.5,0.8\n"
        "data.group_signal = 0.5\ndata.separation = 2\ntransforms = mp_debias\n");
    kv.set("algo", algo);
    const auto cfg = harness::run_config_from(kv);
    const auto a = harness::train_run(cfg);
    const auto b = harness::train_run(cfg);
    o.require(a.history == b.history && a.best_checkpoint == b.best_checkpoint && a.test == b.test,
              std::string(algo) + " identical reruns");
    const numkit::Rng root(cfg.seed);
    const auto ds = data::apply_transforms(harness::load_dataset(cfg.data), cfg.transforms,
                                           root.fork("transforms").seed());
    const auto splits = data::split(ds, cfg.fractions, root.fork("split").seed());
    const auto loaded = agents::load_checkpoint(a.best_checkpoint);
    const auto& best = a.history[a.best_index];
    o.require(metrics::evaluate(*loaded.agent, splits.dev, best.step) == best,
              std::string(algo) + " checkpoint reproduces dev report");
    o.require(metrics::evaluate(*loaded.agent, splits.test, best.step) == a.test,
              std::string(algo) + " test report from checkpoint");
    o.note(std::string(algo) + " " + std::to_string(a.history.size()) + " evals, best " +
           std::to_string(a.best_index));
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  set_warnings_enabled(false);
  const std::vector<Criterion> criteria = {
      {1, "scale-matrix oracles", 1.0, scale_oracles},
      {2, "metric oracles", 1.0, metric_oracles},
      {3, "numerics", 30.0, numerics},
      {4, "learnability floor", 300.0, learnability},
      {5, "fairness direction (sup, EO vs uniform)", 600.0, fairness_direction},
      {6, "sparse-class F1/GAP tension", 60.0, sparse_class},
      {7, "stereotyping-ratio sweep shape", 1800.0, stereotype_sweep},
      {8, "transform correctness", 60.0, transforms},
      {9, "determinism and checkpoint discipline", 300.0, determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.require(secs <= c.budget_seconds, "runtime over " + fmt("%.0f s", c.budget_seconds));
    failures += out.pass ? 0 : 1;
    std::printf("%s  %d  %-42s %7.2f s  %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, secs, out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
