#include "fairbandit/agents/supervised.hpp"

#include <sstream>

#include "fairbandit/agents/losses.hpp"
#include "fairbandit/errors.hpp"
#include "fairbandit/numkit/linalg.hpp"
#include "serialize.hpp"

namespace fairbandit::agents {

SupervisedAgent::SupervisedAgent(int dim, int n_classes, SupParams params,
                                 reward::RewardScaleMatrix scales, numkit::Rng& init_rng)
    : SupervisedAgent(params, numkit::make_mlp(dim, params.hidden, n_classes, init_rng),
                      std::move(scales)) {}

SupervisedAgent::SupervisedAgent(SupParams params, MlpD net, reward::RewardScaleMatrix scales)
    : params_(params),
      net_(std::move(net)),
      adam_(numkit::make_adam(net_, params.lr)),
      scales_(std::move(scales)) {
  if (params.batch < 1) throw ConfigError("supervised batch must be >= 1");
  if (scales_.n_classes() != net_.out_dim())
    throw DimensionError("supervised scale matrix classes", static_cast<std::size_t>(net_.out_dim()),
                         static_cast<std::size_t>(scales_.n_classes()));
  if ((scales_.w.array() < 0.0).any()) throw ConfigError("loss weights must be nonnegative");
}

double SupervisedAgent::train_step(const Eigen::MatrixXd& contexts, std::span<const int> classes,
                                   std::span<const int> groups) {
  if (contexts.cols() == 0) throw ConfigError("supervised train_step needs a nonempty batch");
  if (groups.size() != classes.size())
    throw DimensionError("supervised groups", classes.size(), groups.size());
  Eigen::VectorXd weights(static_cast<Eigen::Index>(classes.size()));
  for (std::size_t j = 0; j < classes.size(); ++j)
    weights(static_cast<Eigen::Index>(j)) = scales_.at(classes[j], groups[j]);
  MlpD grad;
  const double loss = weighted_cross_entropy(net_, contexts, classes, weights, &grad);
  if (!std::isfinite(loss)) {
    std::ostringstream os;
    os << "supervised loss is not finite (batch of " << contexts.cols()
       << ", context max |x| = " << contexts.cwiseAbs().maxCoeff()
       << ", weight range [" << weights.minCoeff() << ", " << weights.maxCoeff() << "])";
    throw NumericalError(os.str());
  }
  numkit::adam_step(adam_, net_, grad);
  return loss;
}

int SupervisedAgent::predict(const ConstVectorRef& x) const {
  return numkit::argmax(numkit::mlp_forward(net_, x));
}

std::vector<int> SupervisedAgent::predict_batch(const Eigen::MatrixXd& contexts) const {
  const auto act = numkit::mlp_forward_batch(net_, contexts);
  std::vector<int> out(static_cast<std::size_t>(contexts.cols()));
  for (Eigen::Index j = 0; j < contexts.cols(); ++j)
    out[static_cast<std::size_t>(j)] = numkit::argmax(act.output.col(j));
  return out;
}

void SupervisedAgent::write_state(ByteWriter& out) const {
  out.put<double>(params_.lr);
  out.put<std::int32_t>(params_.batch);
  out.put<std::uint8_t>(static_cast<std::uint8_t>(scales_.scheme));
  out.put<std::uint64_t>(scales_.source_hash);
  out.put_matrix(scales_.w);
  detail::write_mlp(out, net_);
  detail::write_adam(out, adam_);
}

std::unique_ptr<SupervisedAgent> SupervisedAgent::read_state(ByteReader& in, int dim,
                                                             int n_actions) {
  SupParams params;
  params.lr = in.get<double>("lr");
  params.batch = in.get<std::int32_t>("batch");
  reward::RewardScaleMatrix scales;
  const auto scheme = in.get<std::uint8_t>("scheme");
  if (scheme > static_cast<std::uint8_t>(reward::Scheme::ipw))
    throw ParseError("unknown scale scheme tag", in.offset() - 1);
  scales.scheme = static_cast<reward::Scheme>(scheme);
  scales.source_hash = in.get<std::uint64_t>("source_hash");
  scales.w = in.get_matrix("scales");
  const auto at = in.offset();
  auto net = detail::read_mlp(in);
  detail::expect_dims(net, dim, n_actions, at);
  params.hidden = static_cast<int>(net.hidden_dim());
  std::unique_ptr<SupervisedAgent> agent(new SupervisedAgent(params, std::move(net), std::move(scales)));
  agent->adam_ = detail::read_adam(in);
  return agent;
}

}  // namespace fairbandit::agents
