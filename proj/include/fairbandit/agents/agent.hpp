#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fairbandit/binary.hpp"
#include "fairbandit/numkit/mlp.hpp"
#include "fairbandit/reward/scales.hpp"

namespace fairbandit::agents {

enum class Algorithm : std::uint8_t { sup = 0, linucb = 1, dqn = 2, ppo = 3 };

Algorithm parse_algorithm(const std::string& text);
std::string algorithm_name(Algorithm algorithm);

enum class Mode { explore, greedy };

using ConstVectorRef = Eigen::Ref<const Eigen::VectorXd>;
using numkit::MlpD;

// Shared contract of every learner. predict() is the deterministic greedy
// action and never mutates state; the per-algorithm act/observe entry points
// live on the concrete classes.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual Algorithm algorithm() const = 0;
  virtual int dim() const = 0;
  virtual int n_actions() const = 0;

  virtual int predict(const ConstVectorRef& x) const = 0;
  // Greedy action for every column of `contexts`.
  virtual std::vector<int> predict_batch(const Eigen::MatrixXd& contexts) const;

  virtual std::unique_ptr<Agent> clone() const = 0;

  // Module-defined parameter dump (hyperparameters, weights, optimizer state).
  virtual void write_state(ByteWriter& out) const = 0;
};

// "FCAG" | u16 version | u8 algorithm | u8 scheme | u32 dim | u32 n_actions | state
inline constexpr char kCheckpointMagic[4] = {'F', 'C', 'A', 'G'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

std::vector<std::uint8_t> save_checkpoint(const Agent& agent, reward::Scheme scheme);

struct LoadedCheckpoint {
  std::unique_ptr<Agent> agent;
  reward::Scheme scheme = reward::Scheme::uniform;
};

LoadedCheckpoint load_checkpoint(const std::vector<std::uint8_t>& bytes);

void write_checkpoint_file(const Agent& agent, reward::Scheme scheme, const std::string& path);
LoadedCheckpoint read_checkpoint_file(const std::string& path);

// FNV-1a of the serialized state; equal hashes mean equal agents.
std::uint64_t state_hash(const Agent& agent);

}  // namespace fairbandit::agents
