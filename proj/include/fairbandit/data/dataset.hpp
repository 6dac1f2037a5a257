#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fairbandit::data {

struct LabeledExample {
  Eigen::VectorXd context;
  int class_label = 0;
  int group_label = 0;
};

// Column-per-example dataset. Contexts live in one d x n matrix; class and
// group labels are parallel arrays.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Eigen::MatrixXd contexts, std::vector<int> classes, std::vector<int> groups,
          int n_classes, int n_groups, std::string provenance);

  static Dataset from_examples(const std::vector<LabeledExample>& examples, int n_classes,
                               int n_groups, std::string provenance);

  Eigen::Index size() const { return contexts_.cols(); }
  Eigen::Index dim() const { return contexts_.rows(); }
  int n_classes() const { return n_classes_; }
  int n_groups() const { return n_groups_; }
  const std::string& provenance() const { return provenance_; }

  const Eigen::MatrixXd& contexts() const { return contexts_; }
  auto context(Eigen::Index i) const { return contexts_.col(i); }
  const std::vector<int>& classes() const { return classes_; }
  const std::vector<int>& groups() const { return groups_; }
  int class_of(Eigen::Index i) const { return classes_[static_cast<std::size_t>(i)]; }
  int group_of(Eigen::Index i) const { return groups_[static_cast<std::size_t>(i)]; }

  LabeledExample example(Eigen::Index i) const;

  // Examples at `indices`, in that order.
  Dataset subset(const std::vector<Eigen::Index>& indices, std::string provenance) const;

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  void validate() const;

  Eigen::MatrixXd contexts_;
  std::vector<int> classes_;
  std::vector<int> groups_;
  int n_classes_ = 0;
  int n_groups_ = 0;
  std::string provenance_;
};

// counts[a][g] plus row and grand totals.
class CountTable {
 public:
  CountTable(int n_classes, int n_groups);
  explicit CountTable(std::vector<std::vector<std::int64_t>> cells);

  int n_classes() const { return static_cast<int>(cells_.size()); }
  int n_groups() const { return n_groups_; }
  std::int64_t at(int cls, int group) const {
    return cells_[static_cast<std::size_t>(cls)][static_cast<std::size_t>(group)];
  }
  std::int64_t class_total(int cls) const;
  std::int64_t grand_total() const;
  const std::vector<std::vector<std::int64_t>>& cells() const { return cells_; }

  void add(int cls, int group, std::int64_t amount = 1);

  // FNV-1a over the cell values; tags scale matrices with their source.
  std::uint64_t hash() const;

  friend bool operator==(const CountTable&, const CountTable&) = default;

 private:
  std::vector<std::vector<std::int64_t>> cells_;
  int n_groups_ = 0;
};

CountTable counts(const Dataset& ds);

struct Splits {
  Dataset train;
  Dataset dev;
  Dataset test;
};

struct SplitFractions {
  double train = 0.65;
  double dev = 0.10;
  double test = 0.25;
};

// Seeded shuffle, then floor(n * dev) dev and floor(n * test) test examples;
// the remainder goes to train.
Splits split(const Dataset& ds, const SplitFractions& fractions, std::uint64_t seed);

// Canonical little-endian binary format:
//   "FCB1" | u16 version=1 | u32 n | u32 d | u32 n_classes | u32 n_groups
//   then n records of [d x f32 context][u16 class][u16 group].
inline constexpr std::array<char, 4> kEmbeddingMagic{'F', 'C', 'B', '1'};
inline constexpr std::uint16_t kEmbeddingVersion = 1;
inline constexpr std::size_t kEmbeddingHeaderBytes = 4 + 2 + 4 * 4;

std::size_t embedding_file_size(std::size_t n, std::size_t d);

std::vector<std::uint8_t> encode_embeddings(const Dataset& ds);
Dataset decode_embeddings(const std::vector<std::uint8_t>& bytes, std::string provenance);

void save_embeddings(const Dataset& ds, const std::filesystem::path& path);
Dataset load_embeddings(const std::filesystem::path& path);

// Optional header row (f0..f{d-1},class,group), then one example per line.
Dataset load_csv(const std::filesystem::path& path);

}  // namespace fairbandit::data
