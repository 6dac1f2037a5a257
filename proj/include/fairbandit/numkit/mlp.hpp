#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string_view>
#include <utility>
#include <vector>

#include "fairbandit/errors.hpp"
#include "fairbandit/numkit/rng.hpp"

namespace fairbandit::numkit {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr int kDefaultHidden = 128;

// One-hidden-layer perceptron: w2 * relu(w1 * x + b1) + b2.
// The same type doubles as the gradient container (identical shapes).
template <typename Scalar>
struct Mlp {
  MatrixX<Scalar> w1;  // hidden x in
  VectorX<Scalar> b1;  // hidden
  MatrixX<Scalar> w2;  // out x hidden
  VectorX<Scalar> b2;  // out

  Eigen::Index in_dim() const { return w1.cols(); }
  Eigen::Index hidden_dim() const { return w1.rows(); }
  Eigen::Index out_dim() const { return w2.rows(); }

  static Mlp zeros(Eigen::Index in, Eigen::Index hidden, Eigen::Index out) {
    return Mlp{MatrixX<Scalar>::Zero(hidden, in), VectorX<Scalar>::Zero(hidden),
               MatrixX<Scalar>::Zero(out, hidden), VectorX<Scalar>::Zero(out)};
  }

  static Mlp zeros_like(const Mlp& other) {
    return zeros(other.in_dim(), other.hidden_dim(), other.out_dim());
  }

  Eigen::Index parameter_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }

  friend bool operator==(const Mlp& a, const Mlp& b) {
    return a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2;
  }
};

using MlpD = Mlp<double>;

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases of each layer.
template <typename Scalar = double>
Mlp<Scalar> make_mlp(Eigen::Index in, Eigen::Index hidden, Eigen::Index out, Rng& rng) {
  auto net = Mlp<Scalar>::zeros(in, hidden, out);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(in));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  auto fill = [&rng](auto& block, double bound) {
    for (Eigen::Index i = 0; i < block.size(); ++i)
      block.data()[i] = static_cast<Scalar>(rng.uniform(-bound, bound));
  };
  fill(net.w1, bound1);
  fill(net.b1, bound1);
  fill(net.w2, bound2);
  fill(net.b2, bound2);
  return net;
}

// Named flat views over each parameter block, in w1, b1, w2, b2 order.
template <typename Scalar>
std::vector<std::pair<std::string_view, Eigen::Map<VectorX<Scalar>>>> blocks(Mlp<Scalar>& net) {
  using Map = Eigen::Map<VectorX<Scalar>>;
  return {{"w1", Map(net.w1.data(), net.w1.size())},
          {"b1", Map(net.b1.data(), net.b1.size())},
          {"w2", Map(net.w2.data(), net.w2.size())},
          {"b2", Map(net.b2.data(), net.b2.size())}};
}

template <typename Scalar>
std::vector<std::pair<std::string_view, Eigen::Map<const VectorX<Scalar>>>> blocks(
    const Mlp<Scalar>& net) {
  using Map = Eigen::Map<const VectorX<Scalar>>;
  return {{"w1", Map(net.w1.data(), net.w1.size())},
          {"b1", Map(net.b1.data(), net.b1.size())},
          {"w2", Map(net.w2.data(), net.w2.size())},
          {"b2", Map(net.b2.data(), net.b2.size())}};
}

template <typename Scalar>
VectorX<Scalar> flatten(const Mlp<Scalar>& net) {
  VectorX<Scalar> flat(net.parameter_count());
  Eigen::Index offset = 0;
  for (const auto& [name, view] : blocks(net)) {
    flat.segment(offset, view.size()) = view;
    offset += view.size();
  }
  return flat;
}

template <typename Scalar, typename Derived>
Mlp<Scalar> unflatten(const Eigen::MatrixBase<Derived>& flat, const Mlp<Scalar>& like) {
  if (flat.size() != like.parameter_count())
    throw DimensionError("unflatten", static_cast<std::size_t>(like.parameter_count()),
                         static_cast<std::size_t>(flat.size()));
  auto net = Mlp<Scalar>::zeros_like(like);
  Eigen::Index offset = 0;
  for (auto& [name, view] : blocks(net)) {
    view = flat.segment(offset, view.size());
    offset += view.size();
  }
  return net;
}

namespace detail {
template <typename Scalar>
void check_input_rows(const Mlp<Scalar>& net, Eigen::Index rows, const char* what) {
  if (rows != net.in_dim())
    throw DimensionError(what, static_cast<std::size_t>(net.in_dim()),
                         static_cast<std::size_t>(rows));
}
}  // namespace detail

template <typename Scalar, typename Derived>
VectorX<Scalar> mlp_forward(const Mlp<Scalar>& net, const Eigen::MatrixBase<Derived>& x) {
  detail::check_input_rows(net, x.rows(), "mlp_forward input");
  const VectorX<Scalar> hidden = ((net.w1 * x).colwise() + net.b1).cwiseMax(Scalar(0));
  return net.w2 * hidden + net.b2;
}

// Batched pass over the columns of `inputs`. Keeps the hidden activations
// needed by mlp_backward_batch.
template <typename Scalar>
struct MlpActivations {
  MatrixX<Scalar> hidden;  // relu(w1 x + b1), hidden x batch
  MatrixX<Scalar> output;  // out x batch
};

template <typename Scalar, typename Derived>
MlpActivations<Scalar> mlp_forward_batch(const Mlp<Scalar>& net,
                                         const Eigen::MatrixBase<Derived>& inputs) {
  detail::check_input_rows(net, inputs.rows(), "mlp_forward_batch input");
  MlpActivations<Scalar> act;
  act.hidden.noalias() = net.w1 * inputs;
  act.hidden.colwise() += net.b1;
  act.hidden = act.hidden.cwiseMax(Scalar(0));
  act.output.noalias() = net.w2 * act.hidden;
  act.output.colwise() += net.b2;
  return act;
}

// Gradient of sum_j loss_j w.r.t. the parameters, given dloss_j/doutput_j in
// the columns of `upstream`. ReLU subgradient at 0 is 0 (hidden > 0 mask).
template <typename Scalar, typename DerivedX, typename DerivedG>
Mlp<Scalar> mlp_backward_batch(const Mlp<Scalar>& net, const Eigen::MatrixBase<DerivedX>& inputs,
                               const MlpActivations<Scalar>& act,
                               const Eigen::MatrixBase<DerivedG>& upstream) {
  detail::check_input_rows(net, inputs.rows(), "mlp_backward_batch input");
  if (upstream.rows() != net.out_dim())
    throw DimensionError("mlp_backward_batch upstream rows",
                         static_cast<std::size_t>(net.out_dim()),
                         static_cast<std::size_t>(upstream.rows()));
  if (upstream.cols() != inputs.cols() || act.hidden.cols() != inputs.cols())
    throw DimensionError("mlp_backward_batch batch size", static_cast<std::size_t>(inputs.cols()),
                         static_cast<std::size_t>(upstream.cols()));
  Mlp<Scalar> grad;
  grad.w2.noalias() = upstream * act.hidden.transpose();
  grad.b2 = upstream.rowwise().sum();
  MatrixX<Scalar> delta_hidden = net.w2.transpose() * upstream;
  delta_hidden.array() *= (act.hidden.array() > Scalar(0)).template cast<Scalar>();
  grad.w1.noalias() = delta_hidden * inputs.transpose();
  grad.b1 = delta_hidden.rowwise().sum();
  return grad;
}

template <typename Scalar, typename DerivedX, typename DerivedG>
Mlp<Scalar> mlp_backward(const Mlp<Scalar>& net, const Eigen::MatrixBase<DerivedX>& x,
                         const Eigen::MatrixBase<DerivedG>& upstream_grad) {
  detail::check_input_rows(net, x.rows(), "mlp_backward input");
  if (upstream_grad.size() != net.out_dim())
    throw DimensionError("mlp_backward upstream", static_cast<std::size_t>(net.out_dim()),
                         static_cast<std::size_t>(upstream_grad.size()));
  const auto act = mlp_forward_batch(net, x);
  return mlp_backward_batch(net, x, act, upstream_grad);
}

}  // namespace fairbandit::numkit
