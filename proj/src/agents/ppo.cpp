#include "fairbandit/agents/ppo.hpp"

#include <numeric>

#include "fairbandit/errors.hpp"
#include "serialize.hpp"

namespace fairbandit::agents {

PpoAgent::PpoAgent(int dim, int n_actions, PpoParams params, numkit::Rng& init_rng)
    : PpoAgent(params, numkit::make_mlp(dim, params.hidden, n_actions, init_rng),
               numkit::make_mlp(dim, params.hidden, 1, init_rng)) {}

PpoAgent::PpoAgent(PpoParams params, MlpD actor, MlpD critic)
    : params_(params),
      actor_(std::move(actor)),
      critic_(std::move(critic)),
      actor_adam_(numkit::make_adam(actor_, params.lr_actor)),
      critic_adam_(numkit::make_adam(critic_, params.lr_critic)) {
  if (params.batch < 1) throw ConfigError("PPO batch must be >= 1");
  if (params.epochs < 1) throw ConfigError("PPO epochs must be >= 1");
  if (!(params.clip > 0.0)) throw ConfigError("PPO clip must be positive");
  if (params.minibatch < 0) throw ConfigError("PPO minibatch must be >= 0");
}

numkit::SampledAction PpoAgent::act(const ConstVectorRef& x, Mode mode, numkit::Rng& rng) const {
  const Eigen::VectorXd z = logits(x);
  if (mode == Mode::explore) return numkit::softmax_sample(z, rng);
  const int best = numkit::argmax(z);
  return {best, numkit::log_softmax(z)(best)};
}

void PpoAgent::store(const ConstVectorRef& x, int action, double log_prob, double reward) {
  if (x.size() != dim())
    throw DimensionError("PPO context", static_cast<std::size_t>(dim()), static_cast<std::size_t>(x.size()));
  if (buffer_full()) throw std::logic_error("PPO rollout buffer already full; call update()");
  contexts_.insert(contexts_.end(), x.data(), x.data() + x.size());
  actions_.push_back(action);
  log_probs_.push_back(log_prob);
  rewards_.push_back(reward);
}

PpoUpdateStats PpoAgent::update(numkit::Rng& rng) {
  if (!buffer_full())
    throw std::logic_error("PPO update called with " + std::to_string(buffered()) + " of " +
                           std::to_string(params_.batch) + " rollout entries");
  const auto n = static_cast<Eigen::Index>(actions_.size());
  const Eigen::MatrixXd contexts = Eigen::Map<const Eigen::MatrixXd>(contexts_.data(), dim(), n);
  const Eigen::VectorXd old_log_probs = Eigen::Map<const Eigen::VectorXd>(log_probs_.data(), n);
  const Eigen::VectorXd rewards = Eigen::Map<const Eigen::VectorXd>(rewards_.data(), n);

  // Advantages from the critic as it stood at collection time, fixed for all epochs.
  const auto values = numkit::mlp_forward_batch(critic_, contexts).output;
  Eigen::VectorXd advantages = rewards - values.row(0).transpose();
  if (params_.normalize_advantages && n > 1) {
    const double mean = advantages.mean();
    const double stddev = std::sqrt((advantages.array() - mean).square().mean());
    advantages = (advantages.array() - mean) / (stddev + 1e-8);
  }

  const Eigen::Index chunk = params_.minibatch > 0 ? std::min<Eigen::Index>(params_.minibatch, n) : n;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  PpoUpdateStats stats;
  bool first = true;
  for (int epoch = 0; epoch < params_.epochs; ++epoch) {
    if (chunk < n) rng.shuffle(order.begin(), order.end());
    for (Eigen::Index start = 0; start < n; start += chunk) {
      const Eigen::Index count = std::min(chunk, n - start);
      Eigen::MatrixXd x(dim(), count);
      std::vector<int> a(static_cast<std::size_t>(count));
      Eigen::VectorXd lp(count), adv(count), r(count);
      for (Eigen::Index k = 0; k < count; ++k) {
        const Eigen::Index idx = order[static_cast<std::size_t>(start + k)];
        x.col(k) = contexts.col(idx);
        a[static_cast<std::size_t>(k)] = actions_[static_cast<std::size_t>(idx)];
        lp(k) = old_log_probs(idx);
        adv(k) = advantages(idx);
        r(k) = rewards(idx);
      }
      MlpD actor_grad, critic_grad;
      const auto actor_terms =
          ppo_actor_loss(actor_, x, a, lp, adv, params_.clip, params_.entropy_coef, &actor_grad);
      const double value_loss = critic_loss(critic_, x, r, &critic_grad);
      if (!std::isfinite(actor_terms.loss) || !std::isfinite(value_loss))
        throw NumericalError("PPO loss is not finite (actor " + std::to_string(actor_terms.loss) +
                             ", critic " + std::to_string(value_loss) + ")");
      if (first) {
        stats.actor_loss = actor_terms.loss;
        stats.surrogate = actor_terms.surrogate;
        stats.entropy = actor_terms.entropy;
        stats.critic_loss = value_loss;
        first = false;
      }
      numkit::adam_step(actor_adam_, actor_, actor_grad);
      numkit::adam_step(critic_adam_, critic_, critic_grad);
    }
  }
  contexts_.clear();
  actions_.clear();
  log_probs_.clear();
  rewards_.clear();
  return stats;
}

int PpoAgent::predict(const ConstVectorRef& x) const { return numkit::argmax(logits(x)); }

std::vector<int> PpoAgent::predict_batch(const Eigen::MatrixXd& contexts) const {
  const auto act = numkit::mlp_forward_batch(actor_, contexts);
  std::vector<int> out(static_cast<std::size_t>(contexts.cols()));
  for (Eigen::Index j = 0; j < contexts.cols(); ++j)
    out[static_cast<std::size_t>(j)] = numkit::argmax(act.output.col(j));
  return out;
}

void PpoAgent::write_state(ByteWriter& out) const {
  out.put<double>(params_.lr_actor);
  out.put<double>(params_.lr_critic);
  out.put<std::int32_t>(params_.batch);
  out.put<double>(params_.entropy_coef);
  out.put<double>(params_.clip);
  out.put<std::int32_t>(params_.epochs);
  out.put<std::int32_t>(params_.minibatch);
  out.put<std::uint8_t>(params_.normalize_advantages ? 1 : 0);
  detail::write_mlp(out, actor_);
  detail::write_mlp(out, critic_);
  detail::write_adam(out, actor_adam_);
  detail::write_adam(out, critic_adam_);
}

std::unique_ptr<PpoAgent> PpoAgent::read_state(ByteReader& in, int dim, int n_actions) {
  PpoParams params;
  params.lr_actor = in.get<double>("lr_actor");
  params.lr_critic = in.get<double>("lr_critic");
  params.batch = in.get<std::int32_t>("batch");
  params.entropy_coef = in.get<double>("entropy_coef");
  params.clip = in.get<double>("clip");
  params.epochs = in.get<std::int32_t>("epochs");
  params.minibatch = in.get<std::int32_t>("minibatch");
  params.normalize_advantages = in.get<std::uint8_t>("normalize_advantages") != 0;
  auto at = in.offset();
  auto actor = detail::read_mlp(in);
  detail::expect_dims(actor, dim, n_actions, at);
  at = in.offset();
  auto critic = detail::read_mlp(in);
  detail::expect_dims(critic, dim, 1, at);
  params.hidden = static_cast<int>(actor.hidden_dim());
  std::unique_ptr<PpoAgent> agent(new PpoAgent(params, std::move(actor), std::move(critic)));
  agent->actor_adam_ = detail::read_adam(in);
  agent->critic_adam_ = detail::read_adam(in);
  return agent;
}

}  // namespace fairbandit::agents
