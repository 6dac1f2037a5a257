#include "fairbandit/harness/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "fairbandit/agents/dqn.hpp"
#include "fairbandit/agents/linucb.hpp"
#include "fairbandit/agents/ppo.hpp"
#include "fairbandit/agents/supervised.hpp"
#include "fairbandit/numkit/rng.hpp"

namespace fairbandit::harness {

using agents::Algorithm;
using agents::Mode;

std::unique_ptr<agents::Agent> make_agent(const RunConfig& cfg, int dim, int n_actions,
                                          const reward::RewardScaleMatrix& scales,
                                          numkit::Rng& init_rng) {
  switch (cfg.algorithm) {
    case Algorithm::sup:
      return std::make_unique<agents::SupervisedAgent>(dim, n_actions, cfg.hyper.sup, scales, init_rng);
    case Algorithm::linucb:
      return std::make_unique<agents::LinUcbAgent>(dim, n_actions, cfg.hyper.linucb);
    case Algorithm::dqn:
      return std::make_unique<agents::DqnAgent>(dim, n_actions, cfg.hyper.dqn, init_rng);
    case Algorithm::ppo:
      return std::make_unique<agents::PpoAgent>(dim, n_actions, cfg.hyper.ppo, init_rng);
  }
  throw ConfigError("unhandled algorithm");
}

RunResult train_run(const RunConfig& cfg, const EvalCallback& on_eval) {
  cfg.validate();
  numkit::Rng root(cfg.seed);
  const auto full = load_dataset(cfg.data);
  const auto transformed = data::apply_transforms(full, cfg.transforms, root.fork("transforms").seed());
  const auto splits = data::split(transformed, cfg.fractions, root.fork("split").seed());
  const auto scales = reward::build_scales(cfg.scale_scheme, data::counts(splits.train));
  return train_on_splits(cfg, splits, scales, on_eval);
}

namespace {

// Tracks the step counter, the dev history and the best checkpoint.
class Evaluator {
 public:
  Evaluator(const RunConfig& cfg, const data::Dataset& dev, std::int64_t eval_every,
            const EvalCallback& on_eval)
      : cfg_(cfg), dev_(dev), eval_every_(eval_every), next_eval_(eval_every), on_eval_(on_eval) {}

  // Called after the step counter advanced. A minibatch that crosses several
  // boundaries at once yields a single report.
  void after_steps(const agents::Agent& agent, std::int64_t steps) {
    if (steps < next_eval_) return;
    record(agent, steps);
    while (next_eval_ <= steps) next_eval_ += eval_every_;
  }

  void record(const agents::Agent& agent, std::int64_t step) {
    auto report = metrics::evaluate(agent, dev_, step);
    const double distance = metrics::dto(report, metrics::UtopianPoint::ones());
    if (history_.empty() || distance < best_distance_) {
      best_distance_ = distance;
      best_index_ = history_.size();
      best_checkpoint_ = agents::save_checkpoint(agent, cfg_.scale_scheme);
    }
    history_.push_back(std::move(report));
    if (on_eval_) on_eval_(history_.back());
  }

  std::vector<metrics::EvalReport>& history() { return history_; }
  std::size_t best_index() const { return best_index_; }
  std::vector<std::uint8_t>& best_checkpoint() { return best_checkpoint_; }

 private:
  const RunConfig& cfg_;
  const data::Dataset& dev_;
  std::int64_t eval_every_;
  std::int64_t next_eval_;
  const EvalCallback& on_eval_;
  std::vector<metrics::EvalReport> history_;
  std::size_t best_index_ = 0;
  double best_distance_ = 0.0;
  std::vector<std::uint8_t> best_checkpoint_;
};

std::vector<int> shuffled_order(Eigen::Index n, numkit::Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());
  return order;
}

}  // namespace

RunResult train_on_splits(const RunConfig& cfg, const data::Splits& splits,
                          const reward::RewardScaleMatrix& scales, const EvalCallback& on_eval) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto& train = splits.train;
  if (scales.n_classes() != train.n_classes() || scales.n_groups() != train.n_groups())
    throw DimensionError("scale matrix classes", static_cast<std::size_t>(train.n_classes()),
                         static_cast<std::size_t>(scales.n_classes()));

  numkit::Rng root(cfg.seed);
  auto init_rng = root.fork("init");
  auto shuffle_rng = root.fork("shuffle");
  auto explore_rng = root.fork("explore");
  auto buffer_rng = root.fork("buffer");

  const int dim = static_cast<int>(train.dim());
  const int n_actions = train.n_classes();
  auto agent = make_agent(cfg, dim, n_actions, scales, init_rng);

  const std::int64_t n_train = train.size();
  const std::int64_t total_steps = static_cast<std::int64_t>(cfg.epochs) * n_train;
  const std::int64_t eval_every = cfg.eval_every.value_or(n_train);
  Evaluator evaluator(cfg, splits.dev, eval_every, on_eval);

  RunResult result;
  result.config_hash = cfg.hash();
  result.total_steps = total_steps;

  std::int64_t step = 0;
  try {
    switch (cfg.algorithm) {
      case Algorithm::sup: {
        auto& sup = static_cast<agents::SupervisedAgent&>(*agent);
        const auto batch = static_cast<std::int64_t>(cfg.hyper.sup.batch);
        Eigen::MatrixXd xb;
        std::vector<int> cb;
        std::vector<int> gb;
        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
          const auto order = shuffled_order(n_train, shuffle_rng);
          for (std::int64_t begin = 0; begin < n_train; begin += batch) {
            const auto count = std::min(batch, n_train - begin);
            xb.resize(dim, count);
            cb.resize(static_cast<std::size_t>(count));
            gb.resize(static_cast<std::size_t>(count));
            for (std::int64_t j = 0; j < count; ++j) {
              const int i = order[static_cast<std::size_t>(begin + j)];
              xb.col(j) = train.context(i);
              cb[static_cast<std::size_t>(j)] = train.class_of(i);
              gb[static_cast<std::size_t>(j)] = train.group_of(i);
            }
            sup.train_step(xb, cb, gb);
            step += count;
            evaluator.after_steps(sup, step);
          }
        }
        break;
      }
      case Algorithm::linucb: {
        auto& ucb = static_cast<agents::LinUcbAgent&>(*agent);
        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
          for (const int i : shuffled_order(n_train, shuffle_rng)) {
            const auto x = train.context(i);
            const int a = ucb.act(x, Mode::explore);
            ucb.update(x, a, reward::reward(scales, train.class_of(i), a, train.group_of(i)));
            evaluator.after_steps(ucb, ++step);
          }
        }
        break;
      }
      case Algorithm::dqn: {
        auto& dqn = static_cast<agents::DqnAgent&>(*agent);
        dqn.set_total_steps(total_steps);
        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
          for (const int i : shuffled_order(n_train, shuffle_rng)) {
            const auto x = train.context(i);
            const int a = dqn.act(x, step, Mode::explore, explore_rng);
            dqn.remember(x, a, reward::reward(scales, train.class_of(i), a, train.group_of(i)));
            dqn.train_step(buffer_rng);
            evaluator.after_steps(dqn, ++step);
          }
        }
        break;
      }
      case Algorithm::ppo: {
        auto& ppo = static_cast<agents::PpoAgent&>(*agent);
        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
          for (const int i : shuffled_order(n_train, shuffle_rng)) {
            const auto x = train.context(i);
            const auto sampled = ppo.act(x, Mode::explore, explore_rng);
            ppo.store(x, sampled.action, sampled.log_prob,
                      reward::reward(scales, train.class_of(i), sampled.action, train.group_of(i)));
            if (ppo.buffer_full()) {
              ppo.update(buffer_rng);
              ++result.ppo_updates;
            }
            evaluator.after_steps(ppo, ++step);
          }
        }
        break;
      }
    }
  } catch (const NumericalError& e) {
    throw TrainingFailure(std::string(e.what()) + " (at step " + std::to_string(step) + ")",
                          evaluator.history());
  }

  if (evaluator.history().empty()) evaluator.record(*agent, step);

  result.history = std::move(evaluator.history());
  result.best_index = evaluator.best_index();
  result.best_checkpoint = std::move(evaluator.best_checkpoint());
  const auto best = agents::load_checkpoint(result.best_checkpoint);
  result.test = metrics::evaluate(*best.agent, splits.test, result.history[result.best_index].step);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace fairbandit::harness
