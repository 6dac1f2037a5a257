#include "fairbandit/agents/losses.hpp"

#include <algorithm>
#include <cmath>

#include "fairbandit/errors.hpp"
#include "fairbandit/numkit/linalg.hpp"

namespace fairbandit::agents {

namespace {

void check_batch(const Eigen::MatrixXd& contexts, std::size_t labels, Eigen::Index values,
                 const char* what) {
  const auto n = static_cast<std::size_t>(contexts.cols());
  if (n == 0) throw DimensionError(std::string(what) + " batch", 1, 0);
  if (labels != n) throw DimensionError(std::string(what) + " labels", n, labels);
  if (static_cast<std::size_t>(values) != n)
    throw DimensionError(std::string(what) + " values", n, static_cast<std::size_t>(values));
}

// Column-wise log-softmax of a logits matrix.
Eigen::MatrixXd log_softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) out.col(j) = numkit::log_softmax(logits.col(j));
  return out;
}

void check_action(int action, Eigen::Index n_actions) {
  if (action < 0 || action >= n_actions)
    throw std::out_of_range("action " + std::to_string(action) + " outside [0, " +
                            std::to_string(n_actions) + ")");
}

}  // namespace

double dqn_loss(const MlpD& q_network, const Eigen::MatrixXd& contexts,
                std::span<const int> actions, const Eigen::VectorXd& rewards, MlpD* grad) {
  check_batch(contexts, actions.size(), rewards.size(), "dqn_loss");
  const auto act = numkit::mlp_forward_batch(q_network, contexts);
  const auto n = static_cast<double>(contexts.cols());
  Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(act.output.rows(), act.output.cols());
  double loss = 0.0;
  for (Eigen::Index j = 0; j < contexts.cols(); ++j) {
    const int a = actions[static_cast<std::size_t>(j)];
    check_action(a, act.output.rows());
    const double residual = rewards(j) - act.output(a, j);
    loss += residual * residual;
    upstream(a, j) = -2.0 * residual / n;
  }
  if (grad) *grad = numkit::mlp_backward_batch(q_network, contexts, act, upstream);
  return loss / n;
}

double clipped_surrogate(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return std::min(ratio * advantage, clipped * advantage);
}

double softmax_entropy(const Eigen::VectorXd& logits) {
  const Eigen::VectorXd log_p = numkit::log_softmax(logits);
  return -(log_p.array().exp() * log_p.array()).sum();
}

ActorLoss ppo_actor_loss(const MlpD& actor, const Eigen::MatrixXd& contexts,
                         std::span<const int> actions, const Eigen::VectorXd& old_log_probs,
                         const Eigen::VectorXd& advantages, double clip, double entropy_coef,
                         MlpD* grad) {
  check_batch(contexts, actions.size(), old_log_probs.size(), "ppo_actor_loss");
  check_batch(contexts, actions.size(), advantages.size(), "ppo_actor_loss");
  const auto act = numkit::mlp_forward_batch(actor, contexts);
  const Eigen::MatrixXd log_p = log_softmax_columns(act.output);
  const Eigen::MatrixXd p = log_p.array().exp();
  const auto n = static_cast<double>(contexts.cols());

  Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(p.rows(), p.cols());
  double surrogate = 0.0, entropy = 0.0;
  for (Eigen::Index j = 0; j < contexts.cols(); ++j) {
    const int a = actions[static_cast<std::size_t>(j)];
    check_action(a, p.rows());
    const double ratio = std::exp(log_p(a, j) - old_log_probs(j));
    const double adv = advantages(j);
    const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
    const double unclipped_term = ratio * adv;
    const double clipped_term = clipped * adv;
    surrogate += std::min(unclipped_term, clipped_term);
    const double h = -(p.col(j).array() * log_p.col(j).array()).sum();
    entropy += h;

    // d(-surrogate)/dz: the clipped branch is constant in the parameters.
    // Inside the band both branches coincide and the unclipped one is used.
    if (unclipped_term <= clipped_term) {
      Eigen::VectorXd dlogp = -p.col(j);
      dlogp(a) += 1.0;
      upstream.col(j) -= (adv * ratio / n) * dlogp;
    }
    // d(-c2 H)/dz_k = c2 p_k (log p_k + H) / n
    upstream.col(j).array() +=
        (entropy_coef / n) * p.col(j).array() * (log_p.col(j).array() + h);
  }
  ActorLoss result;
  result.surrogate = surrogate / n;
  result.entropy = entropy / n;
  result.loss = -result.surrogate - entropy_coef * result.entropy;
  if (grad) *grad = numkit::mlp_backward_batch(actor, contexts, act, upstream);
  return result;
}

double critic_loss(const MlpD& critic, const Eigen::MatrixXd& contexts,
                   const Eigen::VectorXd& returns, MlpD* grad) {
  if (critic.out_dim() != 1) throw DimensionError("critic output", 1, static_cast<std::size_t>(critic.out_dim()));
  check_batch(contexts, static_cast<std::size_t>(returns.size()), returns.size(), "critic_loss");
  const auto act = numkit::mlp_forward_batch(critic, contexts);
  const auto n = static_cast<double>(contexts.cols());
  const Eigen::RowVectorXd residual = act.output.row(0) - returns.transpose();
  if (grad) {
    const Eigen::MatrixXd upstream = (2.0 / n) * residual;
    *grad = numkit::mlp_backward_batch(critic, contexts, act, upstream);
  }
  return residual.squaredNorm() / n;
}

double weighted_cross_entropy(const MlpD& classifier, const Eigen::MatrixXd& contexts,
                              std::span<const int> labels, const Eigen::VectorXd& weights,
                              MlpD* grad) {
  check_batch(contexts, labels.size(), weights.size(), "weighted_cross_entropy");
  const auto act = numkit::mlp_forward_batch(classifier, contexts);
  const Eigen::MatrixXd log_q = log_softmax_columns(act.output);
  const auto n = static_cast<double>(contexts.cols());
  Eigen::MatrixXd upstream = log_q.array().exp();
  double loss = 0.0;
  for (Eigen::Index j = 0; j < contexts.cols(); ++j) {
    const int y = labels[static_cast<std::size_t>(j)];
    check_action(y, log_q.rows());
    loss -= weights(j) * log_q(y, j);
    upstream(y, j) -= 1.0;
    upstream.col(j) *= weights(j) / n;
  }
  if (grad) *grad = numkit::mlp_backward_batch(classifier, contexts, act, upstream);
  return loss / n;
}

}  // namespace fairbandit::agents
