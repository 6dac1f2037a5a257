#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "fairbandit/errors.hpp"
#include "fairbandit/numkit/mlp.hpp"
#include "fairbandit/numkit/rng.hpp"

namespace fairbandit::numkit {

// Running inverse of A = lambda * I + sum x x^T.
template <typename Scalar>
struct InverseCovariance {
  MatrixX<Scalar> a_inv;
  Scalar lambda = Scalar(1);

  static InverseCovariance identity(Eigen::Index dim, Scalar ridge) {
    if (!(ridge > Scalar(0))) throw ConfigError("InverseCovariance: ridge lambda must be positive");
    return InverseCovariance{MatrixX<Scalar>::Identity(dim, dim) / ridge, ridge};
  }

  Eigen::Index dim() const { return a_inv.rows(); }
};

// In-place rank-one update: a_inv <- a_inv - (a_inv x)(a_inv x)^T / (1 + x^T a_inv x).
// u u^T is symmetric entry for entry, so a_inv stays exactly symmetric.
template <typename Scalar, typename Derived>
void sherman_morrison_update(InverseCovariance<Scalar>& ic, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != ic.dim())
    throw DimensionError("sherman_morrison_update", static_cast<std::size_t>(ic.dim()),
                         static_cast<std::size_t>(x.size()));
  const VectorX<Scalar> u = ic.a_inv * x;
  const Scalar denom = Scalar(1) + x.dot(u);
  if (!(denom > Scalar(1e-12)))
    throw NumericalError("sherman_morrison_update: denominator " + std::to_string(denom) +
                         " <= 1e-12; inverse covariance is not positive definite");
  ic.a_inv.noalias() -= (u / denom) * u.transpose();
}

// Max-subtracted log-softmax.
template <typename Derived>
VectorX<typename Derived::Scalar> log_softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  const Scalar top = logits.maxCoeff();
  const auto shifted = (logits.array() - top).matrix().eval();
  const Scalar log_norm = std::log(shifted.array().exp().sum());
  return (shifted.array() - log_norm).matrix();
}

template <typename Derived>
VectorX<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& logits) {
  return log_softmax(logits).array().exp().matrix();
}

// Lowest index among maximal entries.
template <typename Derived>
int argmax(const Eigen::MatrixBase<Derived>& values) {
  int best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (values(i) > values(best)) best = static_cast<int>(i);
  return best;
}

struct SampledAction {
  int action = 0;
  double log_prob = 0.0;
};

template <typename Derived>
SampledAction softmax_sample(const Eigen::MatrixBase<Derived>& logits, Rng& rng) {
  if (logits.size() == 0) throw DimensionError("softmax_sample logits", 1, 0);
  if (!logits.allFinite()) throw NumericalError("softmax_sample: non-finite logits");
  const auto log_probs = log_softmax(logits);
  const double u = rng.uniform();
  double cumulative = 0.0;
  int chosen = static_cast<int>(logits.size()) - 1;
  for (Eigen::Index i = 0; i < log_probs.size(); ++i) {
    cumulative += std::exp(static_cast<double>(log_probs(i)));
    if (u < cumulative) {
      chosen = static_cast<int>(i);
      break;
    }
  }
  return {chosen, static_cast<double>(log_probs(chosen))};
}

// Loss callback for finite_diff_check: returns the loss at `params` and, when
// `grad` is non-null, writes the analytic gradient into it.
template <typename Scalar>
using LossWithGradient = std::function<Scalar(const VectorX<Scalar>& params, VectorX<Scalar>* grad)>;

// Max over coordinates of |analytic - numeric| / max(|analytic|, |numeric|, 1e-8),
// with central differences of width 2*step.
template <typename Scalar>
Scalar finite_diff_check(const LossWithGradient<Scalar>& loss_fn, const VectorX<Scalar>& params,
                         Scalar step = Scalar(1e-5)) {
  VectorX<Scalar> analytic(params.size());
  loss_fn(params, &analytic);
  VectorX<Scalar> probe = params;
  Scalar worst = Scalar(0);
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const Scalar original = probe(i);
    probe(i) = original + step;
    const Scalar up = loss_fn(probe, nullptr);
    probe(i) = original - step;
    const Scalar down = loss_fn(probe, nullptr);
    probe(i) = original;
    const Scalar numeric = (up - down) / (Scalar(2) * step);
    const Scalar denom =
        std::max({std::abs(analytic(i)), std::abs(numeric), Scalar(1e-8)});
    worst = std::max(worst, std::abs(analytic(i) - numeric) / denom);
  }
  return worst;
}

}  // namespace fairbandit::numkit
