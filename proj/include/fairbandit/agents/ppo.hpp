#pragma once

#include <vector>

#include "fairbandit/agents/agent.hpp"
#include "fairbandit/agents/hyperparams.hpp"
#include "fairbandit/agents/losses.hpp"
#include "fairbandit/numkit/adam.hpp"
#include "fairbandit/numkit/linalg.hpp"

namespace fairbandit::agents {

struct PpoUpdateStats {
  double actor_loss = 0.0;   // first gradient step, i.e. at the collection policy
  double critic_loss = 0.0;
  double entropy = 0.0;
  double surrogate = 0.0;
};

// Bandit PPO: softmax actor, scalar critic V(x) as baseline, advantages r - V(x).
class PpoAgent final : public Agent {
 public:
  PpoAgent(int dim, int n_actions, PpoParams params, numkit::Rng& init_rng);

  Algorithm algorithm() const override { return Algorithm::ppo; }
  int dim() const override { return static_cast<int>(actor_.in_dim()); }
  int n_actions() const override { return static_cast<int>(actor_.out_dim()); }

  // explore samples the softmax policy; greedy takes the argmax logit.
  numkit::SampledAction act(const ConstVectorRef& x, Mode mode, numkit::Rng& rng) const;
  void store(const ConstVectorRef& x, int action, double log_prob, double reward);
  int buffered() const { return static_cast<int>(actions_.size()); }
  bool buffer_full() const { return buffered() >= params_.batch; }

  // K epochs over the full rollout buffer, then clears it. The buffer must be full.
  PpoUpdateStats update(numkit::Rng& rng);

  Eigen::VectorXd logits(const ConstVectorRef& x) const { return numkit::mlp_forward(actor_, x); }
  double value(const ConstVectorRef& x) const { return numkit::mlp_forward(critic_, x)(0); }
  int predict(const ConstVectorRef& x) const override;
  std::vector<int> predict_batch(const Eigen::MatrixXd& contexts) const override;
  std::unique_ptr<Agent> clone() const override { return std::make_unique<PpoAgent>(*this); }
  void write_state(ByteWriter& out) const override;
  static std::unique_ptr<PpoAgent> read_state(ByteReader& in, int dim, int n_actions);

  const PpoParams& params() const { return params_; }
  const MlpD& actor() const { return actor_; }
  const MlpD& critic() const { return critic_; }
  MlpD& actor() { return actor_; }
  MlpD& critic() { return critic_; }

 private:
  PpoAgent(PpoParams params, MlpD actor, MlpD critic);

  PpoParams params_;
  MlpD actor_;
  MlpD critic_;
  numkit::AdamState<MlpD> actor_adam_;
  numkit::AdamState<MlpD> critic_adam_;

  std::vector<double> contexts_;
  std::vector<int> actions_;
  std::vector<double> log_probs_;
  std::vector<double> rewards_;
};

}  // namespace fairbandit::agents
