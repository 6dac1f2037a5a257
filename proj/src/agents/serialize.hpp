#pragma once

#include "fairbandit/binary.hpp"
#include "fairbandit/numkit/adam.hpp"
#include "fairbandit/numkit/mlp.hpp"

namespace fairbandit::agents::detail {

inline void write_mlp(ByteWriter& out, const numkit::MlpD& net) {
  out.put_matrix(net.w1);
  out.put_matrix(net.b1);
  out.put_matrix(net.w2);
  out.put_matrix(net.b2);
}

inline numkit::MlpD read_mlp(ByteReader& in) {
  numkit::MlpD net;
  net.w1 = in.get_matrix("w1");
  net.b1 = in.get_vector("b1");
  net.w2 = in.get_matrix("w2");
  net.b2 = in.get_vector("b2");
  if (net.b1.size() != net.w1.rows() || net.w2.cols() != net.w1.rows() ||
      net.b2.size() != net.w2.rows())
    throw ParseError("inconsistent network shapes", in.offset());
  return net;
}

inline void write_adam(ByteWriter& out, const numkit::AdamState<numkit::MlpD>& adam) {
  out.put<std::int64_t>(adam.step_count);
  out.put<double>(adam.learning_rate);
  out.put<double>(adam.beta1);
  out.put<double>(adam.beta2);
  out.put<double>(adam.epsilon);
  write_mlp(out, adam.first_moment);
  write_mlp(out, adam.second_moment);
}

inline numkit::AdamState<numkit::MlpD> read_adam(ByteReader& in) {
  numkit::AdamState<numkit::MlpD> adam;
  adam.step_count = in.get<std::int64_t>("adam step");
  adam.learning_rate = in.get<double>("adam lr");
  adam.beta1 = in.get<double>("adam beta1");
  adam.beta2 = in.get<double>("adam beta2");
  adam.epsilon = in.get<double>("adam epsilon");
  adam.first_moment = read_mlp(in);
  adam.second_moment = read_mlp(in);
  return adam;
}

inline void expect_dims(const numkit::MlpD& net, int dim, int out, std::size_t offset) {
  if (net.in_dim() != dim || net.out_dim() != out)
    throw ParseError("network shape disagrees with checkpoint header", offset);
}

}  // namespace fairbandit::agents::detail
