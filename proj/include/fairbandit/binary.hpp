#pragma once

#include <Eigen/Dense>

#include <bit>
#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include "fairbandit/errors.hpp"

namespace fairbandit {

namespace detail {
template <typename T>
using UnsignedOfSize = std::conditional_t<
    sizeof(T) == 1, std::uint8_t,
    std::conditional_t<sizeof(T) == 2, std::uint16_t,
                       std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
}  // namespace detail

// Little-endian append-only writer.
class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  template <typename T>
  void put(T value) {
    static_assert(std::is_arithmetic_v<T>);
    const auto bits = std::bit_cast<detail::UnsignedOfSize<T>>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i)
      out_.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xffU));
  }

  void put_bytes(const char* data, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) out_.push_back(static_cast<std::uint8_t>(data[i]));
  }

  // u32 rows, u32 cols, then column-major f64 entries.
  template <typename Derived>
  void put_matrix(const Eigen::MatrixBase<Derived>& m) {
    put<std::uint32_t>(static_cast<std::uint32_t>(m.rows()));
    put<std::uint32_t>(static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) put<double>(static_cast<double>(m(i, j)));
  }

 private:
  std::vector<std::uint8_t>& out_;
};

// Bounds-checked little-endian reader; failures raise ParseError with the offset.
class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& in) : in_(in) {}

  std::size_t offset() const { return offset_; }
  std::size_t remaining() const { return in_.size() - offset_; }
  void skip(std::size_t count) {
    if (remaining() < count) throw ParseError("truncated input", offset_);
    offset_ += count;
  }

  template <typename T>
  T get(const char* field) {
    static_assert(std::is_arithmetic_v<T>);
    using U = detail::UnsignedOfSize<T>;
    if (remaining() < sizeof(T))
      throw ParseError(std::string("truncated input while reading ") + field, offset_);
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      bits = static_cast<U>(bits | (static_cast<U>(in_[offset_ + i]) << (8 * i)));
    offset_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }

  Eigen::MatrixXd get_matrix(const char* field) {
    const auto rows = get<std::uint32_t>(field);
    const auto cols = get<std::uint32_t>(field);
    if (remaining() / 8 < static_cast<std::size_t>(rows) * cols)
      throw ParseError(std::string("truncated input while reading ") + field, offset_);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = get<double>(field);
    return m;
  }

  Eigen::VectorXd get_vector(const char* field) {
    const std::size_t at = offset_;
    Eigen::MatrixXd m = get_matrix(field);
    if (m.cols() != 1 && m.size() != 0)
      throw ParseError(std::string("expected a column vector for ") + field, at);
    return Eigen::Map<Eigen::VectorXd>(m.data(), m.size());
  }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t offset_ = 0;
};

}  // namespace fairbandit
