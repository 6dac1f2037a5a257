#pragma once

#include <optional>
#include <vector>

#include "fairbandit/agents/agent.hpp"
#include "fairbandit/agents/hyperparams.hpp"
#include "fairbandit/numkit/adam.hpp"

namespace fairbandit::agents {

// Ring buffer of (x, a, r) transitions; contexts are stored column-contiguous.
class ReplayBuffer {
 public:
  ReplayBuffer(int dim, int capacity);

  void push(const ConstVectorRef& x, int action, double reward);
  int size() const { return size_; }
  int capacity() const { return capacity_; }

  struct Batch {
    Eigen::MatrixXd contexts;
    std::vector<int> actions;
    Eigen::VectorXd rewards;
  };
  // Uniform with replacement over the filled slots.
  Batch sample(int count, numkit::Rng& rng) const;
  Batch gather(const std::vector<int>& slots) const;

 private:
  int dim_;
  int capacity_;
  int size_ = 0;
  int next_ = 0;
  std::vector<double> contexts_;
  std::vector<int> actions_;
  std::vector<double> rewards_;
};

// Bandit DQN: Q(x, .) regressed onto the immediate reward. No target network.
class DqnAgent final : public Agent {
 public:
  DqnAgent(int dim, int n_actions, DqnParams params, numkit::Rng& init_rng);

  Algorithm algorithm() const override { return Algorithm::dqn; }
  int dim() const override { return static_cast<int>(q_.in_dim()); }
  int n_actions() const override { return static_cast<int>(q_.out_dim()); }

  // Length of the run the epsilon schedule is laid out over.
  void set_total_steps(std::int64_t total_steps) { total_steps_ = total_steps; }
  // max(eps_end, 1 - (1 - eps_end) * step / (decay_fraction * total_steps))
  double epsilon(std::int64_t step) const;

  int act(const ConstVectorRef& x, std::int64_t step, Mode mode, numkit::Rng& rng) const;
  void remember(const ConstVectorRef& x, int action, double reward);
  // One Adam step on a sampled minibatch; returns the pre-step loss, or
  // nullopt (and leaves parameters alone) while the buffer holds fewer than
  // `batch` transitions.
  std::optional<double> train_step(numkit::Rng& rng);
  // Same update on an explicit batch.
  double train_on(const ReplayBuffer::Batch& batch);

  Eigen::VectorXd q_values(const ConstVectorRef& x) const { return numkit::mlp_forward(q_, x); }
  int predict(const ConstVectorRef& x) const override;
  std::vector<int> predict_batch(const Eigen::MatrixXd& contexts) const override;
  std::unique_ptr<Agent> clone() const override { return std::make_unique<DqnAgent>(*this); }
  void write_state(ByteWriter& out) const override;
  static std::unique_ptr<DqnAgent> read_state(ByteReader& in, int dim, int n_actions);

  const DqnParams& params() const { return params_; }
  const MlpD& q_network() const { return q_; }
  MlpD& q_network() { return q_; }
  const ReplayBuffer& buffer() const { return buffer_; }

 private:
  DqnAgent(DqnParams params, MlpD q);

  DqnParams params_;
  MlpD q_;
  numkit::AdamState<MlpD> adam_;
  ReplayBuffer buffer_;
  std::int64_t total_steps_ = 1;
};

}  // namespace fairbandit::agents
