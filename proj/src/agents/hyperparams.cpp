#include "fairbandit/agents/hyperparams.hpp"

#include "fairbandit/errors.hpp"

namespace fairbandit::agents {

HyperParams preset(const std::string& name) {
  HyperParams hp;
  if (name == "biasbios") {
    hp.ppo.lr_actor = 1e-4;
    hp.ppo.lr_critic = 1e-3;
    hp.ppo.batch = 512;
    hp.ppo.entropy_coef = 0.2;
    hp.ppo.clip = 0.1;
    hp.sup.lr = 3e-4;
    hp.sup.batch = 128;
    hp.dqn.lr = 3e-6;
    hp.dqn.batch = 256;
    hp.dqn.eps_end = 0.1;
    hp.dqn.eps_decay_fraction = 0.5;
    hp.linucb.alpha = 1.5;
    return hp;
  }
  if (name == "emoji") {
    hp.ppo.lr_actor = 3e-5;
    hp.ppo.lr_critic = 1e-4;
    hp.ppo.batch = 512;
    hp.ppo.entropy_coef = 0.1;
    hp.ppo.clip = 0.3;
    hp.sup.lr = 1e-3;
    hp.sup.batch = 512;
    hp.dqn.lr = 3e-4;
    hp.dqn.batch = 32;
    hp.dqn.eps_end = 0.01;
    hp.dqn.eps_decay_fraction = 0.5;
    hp.linucb.alpha = 2.5;
    return hp;
  }
  throw ConfigError("unknown hyperparameter preset '" + name + "' (expected biasbios or emoji)");
}

}  // namespace fairbandit::agents
