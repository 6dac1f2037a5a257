#include "fairbandit/agents/linucb.hpp"

#include <cmath>

#include "fairbandit/errors.hpp"

namespace fairbandit::agents {

LinUcbAgent::LinUcbAgent(int dim, int n_actions, LinUcbParams params)
    : dim_(dim), params_(params), thetas_(Eigen::MatrixXd::Zero(n_actions, dim)) {
  if (dim < 1 || n_actions < 1) throw ConfigError("LinUCB needs dim >= 1 and n_actions >= 1");
  if (!(params.alpha >= 0.0)) throw ConfigError("LinUCB alpha must be nonnegative");
  arms_.reserve(static_cast<std::size_t>(n_actions));
  for (int a = 0; a < n_actions; ++a)
    arms_.push_back({numkit::InverseCovariance<double>::identity(dim, params.lambda),
                     Eigen::VectorXd::Zero(dim)});
}

double LinUcbAgent::score(int arm, const ConstVectorRef& x, Mode mode) const {
  const double mean = thetas_.row(arm).dot(x);
  if (mode == Mode::greedy) return mean;
  const double variance = x.dot(a_inv(arm) * x);
  return mean + params_.alpha * std::sqrt(std::max(variance, 0.0));
}

int LinUcbAgent::act(const ConstVectorRef& x, Mode mode) const {
  if (x.size() != dim_)
    throw DimensionError("LinUCB context", static_cast<std::size_t>(dim_), static_cast<std::size_t>(x.size()));
  int best = 0;
  double best_score = score(0, x, mode);
  for (int a = 1; a < n_actions(); ++a) {
    const double s = score(a, x, mode);
    if (s > best_score) {
      best = a;
      best_score = s;
    }
  }
  return best;
}

void LinUcbAgent::update(const ConstVectorRef& x, int action, double reward) {
  if (action < 0 || action >= n_actions())
    throw std::out_of_range("LinUCB action " + std::to_string(action) + " out of range");
  auto& arm = arms_[static_cast<std::size_t>(action)];
  numkit::sherman_morrison_update(arm.cov, x);
  arm.b += reward * x;
  thetas_.row(action) = (arm.cov.a_inv * arm.b).transpose();
}

std::vector<int> LinUcbAgent::predict_batch(const Eigen::MatrixXd& contexts) const {
  const Eigen::MatrixXd scores = thetas_ * contexts;
  std::vector<int> out(static_cast<std::size_t>(contexts.cols()));
  for (Eigen::Index j = 0; j < contexts.cols(); ++j)
    out[static_cast<std::size_t>(j)] = numkit::argmax(scores.col(j));
  return out;
}

void LinUcbAgent::write_state(ByteWriter& out) const {
  out.put<double>(params_.alpha);
  out.put<double>(params_.lambda);
  for (const auto& arm : arms_) {
    out.put_matrix(arm.cov.a_inv);
    out.put_matrix(arm.b);
  }
  out.put_matrix(thetas_);
}

std::unique_ptr<LinUcbAgent> LinUcbAgent::read_state(ByteReader& in, int dim, int n_actions) {
  LinUcbParams params;
  params.alpha = in.get<double>("alpha");
  params.lambda = in.get<double>("lambda");
  auto agent = std::make_unique<LinUcbAgent>(dim, n_actions, params);
  for (auto& arm : agent->arms_) {
    const auto at = in.offset();
    arm.cov.a_inv = in.get_matrix("a_inv");
    arm.b = in.get_vector("b");
    if (arm.cov.a_inv.rows() != dim || arm.cov.a_inv.cols() != dim || arm.b.size() != dim)
      throw ParseError("LinUCB arm shape disagrees with checkpoint header", at);
  }
  const auto at = in.offset();
  agent->thetas_ = in.get_matrix("theta");
  if (agent->thetas_.rows() != n_actions || agent->thetas_.cols() != dim)
    throw ParseError("LinUCB theta shape disagrees with checkpoint header", at);
  return agent;
}

}  // namespace fairbandit::agents
