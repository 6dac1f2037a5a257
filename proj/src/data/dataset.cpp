#include "fairbandit/data/dataset.hpp"

#include <cmath>
#include <numeric>

#include "fairbandit/errors.hpp"
#include "fairbandit/numkit/rng.hpp"

namespace fairbandit::data {

Dataset::Dataset(Eigen::MatrixXd contexts, std::vector<int> classes, std::vector<int> groups,
                 int n_classes, int n_groups, std::string provenance)
    : contexts_(std::move(contexts)),
      classes_(std::move(classes)),
      groups_(std::move(groups)),
      n_classes_(n_classes),
      n_groups_(n_groups),
      provenance_(std::move(provenance)) {
  validate();
}

Dataset Dataset::from_examples(const std::vector<LabeledExample>& examples, int n_classes,
                               int n_groups, std::string provenance) {
  if (examples.empty()) throw ConfigError("dataset must be nonempty");
  const Eigen::Index d = examples.front().context.size();
  Eigen::MatrixXd contexts(d, static_cast<Eigen::Index>(examples.size()));
  std::vector<int> classes, groups;
  classes.reserve(examples.size());
  groups.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].context.size() != d)
      throw DimensionError("example " + std::to_string(i) + " context", static_cast<std::size_t>(d),
                           static_cast<std::size_t>(examples[i].context.size()));
    contexts.col(static_cast<Eigen::Index>(i)) = examples[i].context;
    classes.push_back(examples[i].class_label);
    groups.push_back(examples[i].group_label);
  }
  return Dataset(std::move(contexts), std::move(classes), std::move(groups), n_classes, n_groups,
                 std::move(provenance));
}

void Dataset::validate() const {
  if (contexts_.cols() == 0) throw ConfigError("dataset must be nonempty");
  if (n_classes_ < 1 || n_groups_ < 1) throw ConfigError("dataset needs n_classes, n_groups >= 1");
  const auto n = static_cast<std::size_t>(contexts_.cols());
  if (classes_.size() != n || groups_.size() != n)
    throw DimensionError("dataset label arrays", n, classes_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (classes_[i] < 0 || classes_[i] >= n_classes_)
      throw ConfigError("example " + std::to_string(i) + ": class label " +
                        std::to_string(classes_[i]) + " outside [0, " + std::to_string(n_classes_) +
                        ")");
    if (groups_[i] < 0 || groups_[i] >= n_groups_)
      throw ConfigError("example " + std::to_string(i) + ": group label " +
                        std::to_string(groups_[i]) + " outside [0, " + std::to_string(n_groups_) +
                        ")");
  }
}

LabeledExample Dataset::example(Eigen::Index i) const {
  return {contexts_.col(i), class_of(i), group_of(i)};
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& indices, std::string provenance) const {
  Eigen::MatrixXd contexts(dim(), static_cast<Eigen::Index>(indices.size()));
  std::vector<int> classes, groups;
  classes.reserve(indices.size());
  groups.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    contexts.col(static_cast<Eigen::Index>(k)) = contexts_.col(indices[k]);
    classes.push_back(class_of(indices[k]));
    groups.push_back(group_of(indices[k]));
  }
  return Dataset(std::move(contexts), std::move(classes), std::move(groups), n_classes_, n_groups_,
                 std::move(provenance));
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.n_classes_ == b.n_classes_ && a.n_groups_ == b.n_groups_ &&
         a.contexts_.rows() == b.contexts_.rows() && a.contexts_.cols() == b.contexts_.cols() &&
         a.contexts_ == b.contexts_ && a.classes_ == b.classes_ && a.groups_ == b.groups_;
}

CountTable::CountTable(int n_classes, int n_groups)
    : cells_(static_cast<std::size_t>(n_classes),
             std::vector<std::int64_t>(static_cast<std::size_t>(n_groups), 0)),
      n_groups_(n_groups) {}

CountTable::CountTable(std::vector<std::vector<std::int64_t>> cells) : cells_(std::move(cells)) {
  if (cells_.empty()) throw ConfigError("count table needs at least one class");
  n_groups_ = static_cast<int>(cells_.front().size());
  for (const auto& row : cells_) {
    if (static_cast<int>(row.size()) != n_groups_)
      throw DimensionError("count table row", static_cast<std::size_t>(n_groups_), row.size());
    for (auto c : row)
      if (c < 0) throw ConfigError("count table cells must be nonnegative");
  }
}

std::int64_t CountTable::class_total(int cls) const {
  const auto& row = cells_[static_cast<std::size_t>(cls)];
  return std::accumulate(row.begin(), row.end(), std::int64_t{0});
}

std::int64_t CountTable::grand_total() const {
  std::int64_t total = 0;
  for (int a = 0; a < n_classes(); ++a) total += class_total(a);
  return total;
}

void CountTable::add(int cls, int group, std::int64_t amount) {
  cells_.at(static_cast<std::size_t>(cls)).at(static_cast<std::size_t>(group)) += amount;
}

std::uint64_t CountTable::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t value) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (value >> (8 * byte)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  feed(static_cast<std::uint64_t>(n_classes()));
  feed(static_cast<std::uint64_t>(n_groups_));
  for (const auto& row : cells_)
    for (auto c : row) feed(static_cast<std::uint64_t>(c));
  return h;
}

CountTable counts(const Dataset& ds) {
  CountTable table(ds.n_classes(), ds.n_groups());
  for (Eigen::Index i = 0; i < ds.size(); ++i) table.add(ds.class_of(i), ds.group_of(i));
  return table;
}

Splits split(const Dataset& ds, const SplitFractions& fractions, std::uint64_t seed) {
  if (!(fractions.train > 0 && fractions.dev > 0 && fractions.test > 0))
    throw ConfigError("split fractions must be positive");
  if (std::abs(fractions.train + fractions.dev + fractions.test - 1.0) > 1e-9)
    throw ConfigError("split fractions must sum to 1");

  const auto n = static_cast<std::size_t>(ds.size());
  // The small epsilon keeps e.g. 0.29 * 100 from flooring to 28.
  auto floor_count = [n](double fraction) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
  };
  const std::size_t n_dev = floor_count(fractions.dev);
  const std::size_t n_test = floor_count(fractions.test);
  if (n_dev + n_test >= n || n_dev == 0 || n_test == 0)
    throw ConfigError("split of " + std::to_string(n) + " examples leaves an empty partition");
  const std::size_t n_train = n - n_dev - n_test;

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  numkit::Rng rng(seed);
  rng.shuffle(order.begin(), order.end());

  auto take = [&](std::size_t begin, std::size_t count, const char* tag) {
    std::vector<Eigen::Index> idx(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                  order.begin() + static_cast<std::ptrdiff_t>(begin + count));
    return ds.subset(idx, ds.provenance() + "|split:" + tag);
  };
  return Splits{take(0, n_train, "train"), take(n_train, n_dev, "dev"),
                take(n_train + n_dev, n_test, "test")};
}

}  // namespace fairbandit::data
