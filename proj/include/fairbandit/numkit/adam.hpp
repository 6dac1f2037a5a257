#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>

#include "fairbandit/errors.hpp"
#include "fairbandit/numkit/mlp.hpp"

namespace fairbandit::numkit {

// Single flat parameter vector; lets Adam drive plain Eigen vectors.
template <typename Scalar>
std::vector<std::pair<std::string_view, Eigen::Map<VectorX<Scalar>>>> blocks(VectorX<Scalar>& v) {
  return {{"params", Eigen::Map<VectorX<Scalar>>(v.data(), v.size())}};
}

template <typename Scalar>
std::vector<std::pair<std::string_view, Eigen::Map<const VectorX<Scalar>>>> blocks(
    const VectorX<Scalar>& v) {
  return {{"params", Eigen::Map<const VectorX<Scalar>>(v.data(), v.size())}};
}

template <typename Scalar>
Mlp<Scalar> zeros_like(const Mlp<Scalar>& like) {
  return Mlp<Scalar>::zeros_like(like);
}

template <typename Scalar>
VectorX<Scalar> zeros_like(const VectorX<Scalar>& like) {
  return VectorX<Scalar>::Zero(like.size());
}

template <typename Params>
struct AdamState {
  std::int64_t step_count = 0;
  Params first_moment;
  Params second_moment;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Params>
AdamState<Params> make_adam(const Params& like, double learning_rate) {
  AdamState<Params> state;
  state.first_moment = zeros_like(like);
  state.second_moment = zeros_like(like);
  state.learning_rate = learning_rate;
  return state;
}

// Bias-corrected Adam. Rejects the whole step (no parameter touched) if any
// gradient entry is non-finite.
template <typename Params>
void adam_step(AdamState<Params>& state, Params& params, const Params& grads) {
  auto param_blocks = blocks(params);
  const auto grad_blocks = blocks(grads);
  auto m_blocks = blocks(state.first_moment);
  auto v_blocks = blocks(state.second_moment);
  for (std::size_t b = 0; b < param_blocks.size(); ++b) {
    const auto& [name, g] = grad_blocks[b];
    if (g.size() != param_blocks[b].second.size() || m_blocks[b].second.size() != g.size())
      throw DimensionError("adam_step block " + std::string(name),
                           static_cast<std::size_t>(param_blocks[b].second.size()),
                           static_cast<std::size_t>(g.size()));
    if (!g.allFinite())
      throw NumericalError("adam_step: non-finite gradient in parameter block '" +
                           std::string(name) + "'");
  }

  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t b = 0; b < param_blocks.size(); ++b) {
    auto& p = param_blocks[b].second;
    auto& m = m_blocks[b].second;
    auto& v = v_blocks[b].second;
    const auto& g = grad_blocks[b].second;
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseAbs2();
    p.array() -= state.learning_rate * (m.array() / correction1) /
                 ((v.array() / correction2).sqrt() + state.epsilon);
  }
}

}  // namespace fairbandit::numkit
