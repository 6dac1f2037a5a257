#pragma once

#include <Eigen/Dense>

#include <span>

#include "fairbandit/numkit/mlp.hpp"

namespace fairbandit::agents {

using numkit::MlpD;

// All losses average over the columns of `contexts`. When `grad` is non-null
// it receives the gradient with respect to the network parameters.

// mean_j (r_j - Q(x_j, a_j))^2; the one-step target is the reward itself.
double dqn_loss(const MlpD& q_network, const Eigen::MatrixXd& contexts,
                std::span<const int> actions, const Eigen::VectorXd& rewards, MlpD* grad);

struct ActorLoss {
  double loss = 0.0;       // -surrogate - entropy_coef * entropy
  double surrogate = 0.0;  // mean_j min(ratio A, clip(ratio) A)
  double entropy = 0.0;    // mean policy entropy
};

ActorLoss ppo_actor_loss(const MlpD& actor, const Eigen::MatrixXd& contexts,
                         std::span<const int> actions, const Eigen::VectorXd& old_log_probs,
                         const Eigen::VectorXd& advantages, double clip, double entropy_coef,
                         MlpD* grad);

// mean_j (V(x_j) - r_j)^2
double critic_loss(const MlpD& critic, const Eigen::MatrixXd& contexts,
                   const Eigen::VectorXd& returns, MlpD* grad);

// mean_j -w_j log softmax(f(x_j))[y_j]
double weighted_cross_entropy(const MlpD& classifier, const Eigen::MatrixXd& contexts,
                              std::span<const int> labels, const Eigen::VectorXd& weights,
                              MlpD* grad);

// Clipped surrogate contribution of one sample.
double clipped_surrogate(double ratio, double advantage, double clip);

// Entropy of softmax(logits).
double softmax_entropy(const Eigen::VectorXd& logits);

}  // namespace fairbandit::agents
