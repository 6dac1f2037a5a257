#pragma once

#include <span>
#include <vector>

#include "fairbandit/agents/agent.hpp"
#include "fairbandit/agents/hyperparams.hpp"
#include "fairbandit/numkit/adam.hpp"
#include "fairbandit/reward/scales.hpp"

namespace fairbandit::agents {

// MLP classifier trained with W(a, g)-weighted cross-entropy.
class SupervisedAgent final : public Agent {
 public:
  SupervisedAgent(int dim, int n_classes, SupParams params, reward::RewardScaleMatrix scales,
                  numkit::Rng& init_rng);

  Algorithm algorithm() const override { return Algorithm::sup; }
  int dim() const override { return static_cast<int>(net_.in_dim()); }
  int n_actions() const override { return static_cast<int>(net_.out_dim()); }

  // One Adam step on the batch; returns the pre-step loss.
  double train_step(const Eigen::MatrixXd& contexts, std::span<const int> classes,
                    std::span<const int> groups);

  int predict(const ConstVectorRef& x) const override;
  std::vector<int> predict_batch(const Eigen::MatrixXd& contexts) const override;
  std::unique_ptr<Agent> clone() const override { return std::make_unique<SupervisedAgent>(*this); }
  void write_state(ByteWriter& out) const override;
  static std::unique_ptr<SupervisedAgent> read_state(ByteReader& in, int dim, int n_actions);

  const SupParams& params() const { return params_; }
  const reward::RewardScaleMatrix& scales() const { return scales_; }
  const MlpD& classifier() const { return net_; }
  MlpD& classifier() { return net_; }

 private:
  SupervisedAgent(SupParams params, MlpD net, reward::RewardScaleMatrix scales);

  SupParams params_;
  MlpD net_;
  numkit::AdamState<MlpD> adam_;
  reward::RewardScaleMatrix scales_;
};

}  // namespace fairbandit::agents
