#pragma once

#include <vector>

#include "fairbandit/agents/agent.hpp"
#include "fairbandit/agents/hyperparams.hpp"
#include "fairbandit/numkit/linalg.hpp"

namespace fairbandit::agents {

// Disjoint LinUCB: one ridge regression (A_a^-1, b_a, theta_a) per arm.
class LinUcbAgent final : public Agent {
 public:
  LinUcbAgent(int dim, int n_actions, LinUcbParams params);

  Algorithm algorithm() const override { return Algorithm::linucb; }
  int dim() const override { return dim_; }
  int n_actions() const override { return static_cast<int>(arms_.size()); }

  // explore: theta^T x + alpha sqrt(x^T A^-1 x); greedy: theta^T x. Ties -> lowest arm.
  double score(int arm, const ConstVectorRef& x, Mode mode) const;
  int act(const ConstVectorRef& x, Mode mode) const;
  void update(const ConstVectorRef& x, int action, double reward);

  int predict(const ConstVectorRef& x) const override { return act(x, Mode::greedy); }
  std::vector<int> predict_batch(const Eigen::MatrixXd& contexts) const override;
  std::unique_ptr<Agent> clone() const override { return std::make_unique<LinUcbAgent>(*this); }
  void write_state(ByteWriter& out) const override;
  static std::unique_ptr<LinUcbAgent> read_state(ByteReader& in, int dim, int n_actions);

  const LinUcbParams& params() const { return params_; }
  void set_alpha(double alpha) { params_.alpha = alpha; }
  const Eigen::MatrixXd& a_inv(int arm) const { return arms_[static_cast<std::size_t>(arm)].cov.a_inv; }
  const Eigen::VectorXd& b(int arm) const { return arms_[static_cast<std::size_t>(arm)].b; }
  auto theta(int arm) const { return thetas_.row(arm); }

 private:
  struct Arm {
    numkit::InverseCovariance<double> cov;
    Eigen::VectorXd b;
  };

  int dim_;
  LinUcbParams params_;
  std::vector<Arm> arms_;
  Eigen::MatrixXd thetas_;  // n_actions x dim, row a = (A_a^-1 b_a)^T
};

}  // namespace fairbandit::agents
