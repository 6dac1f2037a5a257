#include "fairbandit/agents/agent.hpp"

#include <fstream>
#include <iterator>

#include "fairbandit/agents/dqn.hpp"
#include "fairbandit/agents/linucb.hpp"
#include "fairbandit/agents/ppo.hpp"
#include "fairbandit/agents/supervised.hpp"
#include "fairbandit/errors.hpp"
#include "fairbandit/numkit/rng.hpp"

namespace fairbandit::agents {

Algorithm parse_algorithm(const std::string& text) {
  if (text == "sup") return Algorithm::sup;
  if (text == "linucb") return Algorithm::linucb;
  if (text == "dqn") return Algorithm::dqn;
  if (text == "ppo") return Algorithm::ppo;
  throw ConfigError("unknown algorithm '" + text + "' (expected sup, linucb, dqn or ppo)");
}

std::string algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::sup: return "sup";
    case Algorithm::linucb: return "linucb";
    case Algorithm::dqn: return "dqn";
    case Algorithm::ppo: return "ppo";
  }
  return "?";
}

std::vector<int> Agent::predict_batch(const Eigen::MatrixXd& contexts) const {
  std::vector<int> out(static_cast<std::size_t>(contexts.cols()));
  for (Eigen::Index j = 0; j < contexts.cols(); ++j)
    out[static_cast<std::size_t>(j)] = predict(contexts.col(j));
  return out;
}

std::vector<std::uint8_t> save_checkpoint(const Agent& agent, reward::Scheme scheme) {
  std::vector<std::uint8_t> bytes;
  ByteWriter out(bytes);
  out.put_bytes(kCheckpointMagic, 4);
  out.put<std::uint16_t>(kCheckpointVersion);
  out.put<std::uint8_t>(static_cast<std::uint8_t>(agent.algorithm()));
  out.put<std::uint8_t>(static_cast<std::uint8_t>(scheme));
  out.put<std::uint32_t>(static_cast<std::uint32_t>(agent.dim()));
  out.put<std::uint32_t>(static_cast<std::uint32_t>(agent.n_actions()));
  agent.write_state(out);
  return bytes;
}

LoadedCheckpoint load_checkpoint(const std::vector<std::uint8_t>& bytes) {
  ByteReader in(bytes);
  for (std::size_t i = 0; i < 4; ++i)
    if (in.get<std::uint8_t>("magic") != static_cast<std::uint8_t>(kCheckpointMagic[i]))
      throw ParseError("bad checkpoint magic: expected \"FCAG\"", 0);
  const auto version = in.get<std::uint16_t>("version");
  if (version != kCheckpointVersion)
    throw ParseError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                         std::to_string(kCheckpointVersion) + ")",
                     4);
  const auto algorithm = in.get<std::uint8_t>("algorithm");
  const auto scheme = in.get<std::uint8_t>("scheme");
  if (scheme > static_cast<std::uint8_t>(reward::Scheme::ipw))
    throw ParseError("unknown scheme tag " + std::to_string(scheme), 7);
  const auto dim = static_cast<int>(in.get<std::uint32_t>("dim"));
  const auto n_actions = static_cast<int>(in.get<std::uint32_t>("n_actions"));

  LoadedCheckpoint loaded;
  loaded.scheme = static_cast<reward::Scheme>(scheme);
  switch (static_cast<Algorithm>(algorithm)) {
    case Algorithm::sup: loaded.agent = SupervisedAgent::read_state(in, dim, n_actions); break;
    case Algorithm::linucb: loaded.agent = LinUcbAgent::read_state(in, dim, n_actions); break;
    case Algorithm::dqn: loaded.agent = DqnAgent::read_state(in, dim, n_actions); break;
    case Algorithm::ppo: loaded.agent = PpoAgent::read_state(in, dim, n_actions); break;
    default: throw ParseError("unknown algorithm tag " + std::to_string(algorithm), 6);
  }
  if (in.remaining() != 0) throw ParseError("trailing bytes after checkpoint state", in.offset());
  return loaded;
}

void write_checkpoint_file(const Agent& agent, reward::Scheme scheme, const std::string& path) {
  const auto bytes = save_checkpoint(agent, scheme);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path);
}

LoadedCheckpoint read_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_checkpoint(bytes);
}

std::uint64_t state_hash(const Agent& agent) {
  std::vector<std::uint8_t> bytes;
  ByteWriter out(bytes);
  agent.write_state(out);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto byte : bytes) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace fairbandit::agents
