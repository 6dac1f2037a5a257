#pragma once

#include <cstdint>
#include <string>

#include "fairbandit/numkit/mlp.hpp"

namespace fairbandit::agents {

struct LinUcbParams {
  double alpha = 1.5;
  double lambda = 1.0;
};

struct DqnParams {
  double lr = 3e-6;
  int batch = 256;
  double eps_end = 0.1;
  double eps_decay_fraction = 0.5;
  int capacity = 50000;
  double gamma = 0.99;  // kept for the record; every next state is terminal
  int hidden = numkit::kDefaultHidden;
};

struct PpoParams {
  double lr_actor = 1e-4;
  double lr_critic = 1e-3;
  int batch = 512;  // rollout size N
  double entropy_coef = 0.2;
  double clip = 0.1;
  int epochs = 4;          // K passes over each rollout
  int minibatch = 0;       // 0 = whole rollout per gradient step
  bool normalize_advantages = true;
  int hidden = numkit::kDefaultHidden;
};

struct SupParams {
  double lr = 3e-4;
  int batch = 128;
  int hidden = numkit::kDefaultHidden;
};

struct HyperParams {
  LinUcbParams linucb;
  DqnParams dqn;
  PpoParams ppo;
  SupParams sup;
};

// Best values of the published grid search: "biasbios" (28-class) and "emoji" (binary).
HyperParams preset(const std::string& name);

}  // namespace fairbandit::agents
