#include "fairbandit/agents/dqn.hpp"

#include <algorithm>

#include "fairbandit/agents/losses.hpp"
#include "fairbandit/errors.hpp"
#include "fairbandit/numkit/linalg.hpp"
#include "serialize.hpp"

namespace fairbandit::agents {

ReplayBuffer::ReplayBuffer(int dim, int capacity) : dim_(dim), capacity_(capacity) {
  if (capacity < 1) throw ConfigError("replay buffer capacity must be >= 1");
}

void ReplayBuffer::push(const ConstVectorRef& x, int action, double reward) {
  if (x.size() != dim_)
    throw DimensionError("replay buffer context", static_cast<std::size_t>(dim_), static_cast<std::size_t>(x.size()));
  if (size_ < capacity_) {
    contexts_.insert(contexts_.end(), x.data(), x.data() + dim_);
    actions_.push_back(action);
    rewards_.push_back(reward);
    ++size_;
  } else {
    std::copy(x.data(), x.data() + dim_, contexts_.begin() + static_cast<std::ptrdiff_t>(next_) * dim_);
    actions_[static_cast<std::size_t>(next_)] = action;
    rewards_[static_cast<std::size_t>(next_)] = reward;
  }
  next_ = (next_ + 1) % capacity_;
}

ReplayBuffer::Batch ReplayBuffer::gather(const std::vector<int>& slots) const {
  Batch batch;
  batch.contexts.resize(dim_, static_cast<Eigen::Index>(slots.size()));
  batch.rewards.resize(static_cast<Eigen::Index>(slots.size()));
  batch.actions.reserve(slots.size());
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const int slot = slots[k];
    if (slot < 0 || slot >= size_) throw std::out_of_range("replay slot outside filled region");
    batch.contexts.col(static_cast<Eigen::Index>(k)) =
        Eigen::Map<const Eigen::VectorXd>(contexts_.data() + static_cast<std::ptrdiff_t>(slot) * dim_, dim_);
    batch.actions.push_back(actions_[static_cast<std::size_t>(slot)]);
    batch.rewards(static_cast<Eigen::Index>(k)) = rewards_[static_cast<std::size_t>(slot)];
  }
  return batch;
}

ReplayBuffer::Batch ReplayBuffer::sample(int count, numkit::Rng& rng) const {
  std::vector<int> slots(static_cast<std::size_t>(count));
  for (auto& slot : slots) slot = static_cast<int>(rng.below(static_cast<std::uint64_t>(size_)));
  return gather(slots);
}

DqnAgent::DqnAgent(int dim, int n_actions, DqnParams params, numkit::Rng& init_rng)
    : DqnAgent(params, numkit::make_mlp(dim, params.hidden, n_actions, init_rng)) {}

DqnAgent::DqnAgent(DqnParams params, MlpD q)
    : params_(params),
      q_(std::move(q)),
      adam_(numkit::make_adam(q_, params.lr)),
      buffer_(static_cast<int>(q_.in_dim()), params.capacity) {
  if (params.batch < 1) throw ConfigError("DQN batch must be >= 1");
  if (!(params.eps_end >= 0.0 && params.eps_end <= 1.0)) throw ConfigError("DQN eps_end must be in [0, 1]");
  if (!(params.eps_decay_fraction > 0.0)) throw ConfigError("DQN eps_decay_fraction must be positive");
}

double DqnAgent::epsilon(std::int64_t step) const {
  const double horizon = params_.eps_decay_fraction * static_cast<double>(std::max<std::int64_t>(total_steps_, 1));
  const double linear = 1.0 - (1.0 - params_.eps_end) * static_cast<double>(step) / horizon;
  return std::max(params_.eps_end, linear);
}

int DqnAgent::act(const ConstVectorRef& x, std::int64_t step, Mode mode, numkit::Rng& rng) const {
  if (mode == Mode::greedy) return predict(x);
  if (rng.uniform() < epsilon(step)) return static_cast<int>(rng.below(static_cast<std::uint64_t>(n_actions())));
  return predict(x);
}

void DqnAgent::remember(const ConstVectorRef& x, int action, double reward) {
  buffer_.push(x, action, reward);
}

double DqnAgent::train_on(const ReplayBuffer::Batch& batch) {
  MlpD grad;
  const double loss = dqn_loss(q_, batch.contexts, batch.actions, batch.rewards, &grad);
  if (!std::isfinite(loss)) throw NumericalError("DQN loss is not finite");
  numkit::adam_step(adam_, q_, grad);
  return loss;
}

std::optional<double> DqnAgent::train_step(numkit::Rng& rng) {
  if (buffer_.size() < params_.batch) return std::nullopt;
  return train_on(buffer_.sample(params_.batch, rng));
}

int DqnAgent::predict(const ConstVectorRef& x) const { return numkit::argmax(q_values(x)); }

std::vector<int> DqnAgent::predict_batch(const Eigen::MatrixXd& contexts) const {
  const auto act = numkit::mlp_forward_batch(q_, contexts);
  std::vector<int> out(static_cast<std::size_t>(contexts.cols()));
  for (Eigen::Index j = 0; j < contexts.cols(); ++j)
    out[static_cast<std::size_t>(j)] = numkit::argmax(act.output.col(j));
  return out;
}

void DqnAgent::write_state(ByteWriter& out) const {
  out.put<double>(params_.lr);
  out.put<std::int32_t>(params_.batch);
  out.put<double>(params_.eps_end);
  out.put<double>(params_.eps_decay_fraction);
  out.put<std::int32_t>(params_.capacity);
  out.put<double>(params_.gamma);
  out.put<std::int64_t>(total_steps_);
  detail::write_mlp(out, q_);
  detail::write_adam(out, adam_);
}

std::unique_ptr<DqnAgent> DqnAgent::read_state(ByteReader& in, int dim, int n_actions) {
  DqnParams params;
  params.lr = in.get<double>("lr");
  params.batch = in.get<std::int32_t>("batch");
  params.eps_end = in.get<double>("eps_end");
  params.eps_decay_fraction = in.get<double>("eps_decay_fraction");
  params.capacity = in.get<std::int32_t>("capacity");
  params.gamma = in.get<double>("gamma");
  const auto total_steps = in.get<std::int64_t>("total_steps");
  const auto at = in.offset();
  auto q = detail::read_mlp(in);
  detail::expect_dims(q, dim, n_actions, at);
  params.hidden = static_cast<int>(q.hidden_dim());
  std::unique_ptr<DqnAgent> agent(new DqnAgent(params, std::move(q)));
  agent->total_steps_ = total_steps;
  agent->adam_ = detail::read_adam(in);
  return agent;
}

}  // namespace fairbandit::agents
