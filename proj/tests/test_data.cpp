#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "fairbandit/data/dataset.hpp"
#include "fairbandit/data/synthetic.hpp"
#include "fairbandit/data/transforms.hpp"
#include "fairbandit/errors.hpp"
#include "fairbandit/reward/scales.hpp"
#include "support/probe.hpp"

using namespace fairbandit;
using namespace fairbandit::data;
using testsupport::dataset_with_cells;
using testsupport::group_probe_accuracy;
using testsupport::labeled_dataset;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fairbandit_test_data_" + name);
}

// Multiset of (context bits, class, group) rows, for cover and sub-multiset checks.
std::multiset<std::vector<double>> rows(const Dataset& ds) {
  std::multiset<std::vector<double>> out;
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    std::vector<double> row(ds.context(i).data(), ds.context(i).data() + ds.dim());
    row.push_back(ds.class_of(i));
    row.push_back(ds.group_of(i));
    out.insert(row);
  }
  return out;
}

SyntheticSpec two_class_spec(double ratio0, double ratio1, std::int64_t per_class, double signal) {
  SyntheticSpec spec;
  spec.dim = 8;
  spec.class_counts = {per_class, per_class};
  spec.group0_ratio = {ratio0, ratio1};
  spec.separation = 2.0;
  spec.group_signal = signal;
  spec.seed = 5;
  return spec;
}

}  // namespace

TEST_CASE("dataset validates labels and shapes") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 3);
  CHECK_THROWS_AS(Dataset(x, {0, 1, 2}, {0, 0, 0}, 2, 2, "t"), ConfigError);
  CHECK_THROWS_AS(Dataset(x, {0, 1, 0}, {0, 2, 0}, 2, 2, "t"), ConfigError);
  CHECK_THROWS_AS(Dataset(x, {0, 1}, {0, 0}, 2, 2, "t"), DimensionError);
  CHECK_THROWS_AS(Dataset(Eigen::MatrixXd(2, 0), {}, {}, 2, 2, "t"), ConfigError);
  const Dataset ok(x, {0, 1, 0}, {0, 1, 1}, 2, 2, "t");
  CHECK(ok.size() == 3);
  CHECK(ok.dim() == 2);
}

TEST_CASE("counts: three examples") {
  // (0, f), (0, m), (1, f) with f = 0, m = 1
  const auto ds = labeled_dataset({0, 0, 1}, {0, 1, 0}, 2);
  const auto ct = counts(ds);
  CHECK(ct == CountTable({{1, 1}, {1, 0}}));
  CHECK(ct.grand_total() == 3);
  CHECK(ct.class_total(0) == 2);
}

TEST_CASE("counts: empty class row is allowed") {
  const auto ds = labeled_dataset({0, 0, 2}, {0, 1, 0}, 3);
  const auto ct = counts(ds);
  CHECK(ct.class_total(1) == 0);
  CHECK(ct.grand_total() == 3);
}

TEST_CASE("counts: cells sum to the number of examples on random datasets") {
  numkit::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_classes = 1 + static_cast<int>(rng.below(6));
    const int n = 1 + static_cast<int>(rng.below(200));
    std::vector<int> cls(static_cast<std::size_t>(n));
    std::vector<int> grp(static_cast<std::size_t>(n));
    std::map<std::pair<int, int>, std::int64_t> oracle;
    for (int i = 0; i < n; ++i) {
      cls[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_classes)));
      grp[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(2));
      ++oracle[{cls[static_cast<std::size_t>(i)], grp[static_cast<std::size_t>(i)]}];
    }
    const auto ct = counts(labeled_dataset(cls, grp, n_classes));
    CHECK(ct.grand_total() == n);
    for (int a = 0; a < n_classes; ++a)
      for (int g = 0; g < 2; ++g) CHECK(ct.at(a, g) == oracle[{a, g}]);
  }
}

TEST_CASE("split: 100 examples give 65/10/25") {
  const auto ds = dataset_with_cells({{50, 50}});
  const auto s = split(ds, {0.65, 0.10, 0.25}, 1);
  CHECK(s.train.size() == 65);
  CHECK(s.dev.size() == 10);
  CHECK(s.test.size() == 25);
}

TEST_CASE("split: same seed gives identical partitions, different seed differs") {
  const auto ds = dataset_with_cells({{40, 60}, {70, 30}});
  const auto a = split(ds, {0.65, 0.10, 0.25}, 9);
  const auto b = split(ds, {0.65, 0.10, 0.25}, 9);
  const auto c = split(ds, {0.65, 0.10, 0.25}, 10);
  CHECK(a.train == b.train);
  CHECK(a.dev == b.dev);
  CHECK(a.test == b.test);
  CHECK_FALSE(a.train == c.train);
}

TEST_CASE("split: partitions are a disjoint cover on random datasets") {
  numkit::Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::int64_t n0 = 10 + static_cast<std::int64_t>(rng.below(100));
    const std::int64_t n1 = 10 + static_cast<std::int64_t>(rng.below(100));
    const auto ds = dataset_with_cells({{n0, n1}}, 3, 100 + static_cast<std::uint64_t>(trial));
    const auto s = split(ds, {0.65, 0.10, 0.25}, rng());
    auto all = rows(s.train);
    for (const auto& r : rows(s.dev)) all.insert(r);
    for (const auto& r : rows(s.test)) all.insert(r);
    CHECK(all == rows(ds));
    const auto n = ds.size();
    CHECK(s.dev.size() == static_cast<Eigen::Index>(std::floor(n * 0.10 + 1e-9)));
    CHECK(s.test.size() == static_cast<Eigen::Index>(std::floor(n * 0.25 + 1e-9)));
  }
}

TEST_CASE("split: rejects bad fractions and empty partitions") {
  const auto ds = dataset_with_cells({{2, 2}});
  CHECK_THROWS_AS(split(ds, {0.5, 0.2, 0.2}, 1), ConfigError);
  CHECK_THROWS_AS(split(ds, {0.65, 0.10, 0.25}, 1), ConfigError);  // dev = floor(0.4) = 0
  CHECK_THROWS_AS(split(ds, {1.0, 0.0, 0.0}, 1), ConfigError);
}

TEST_CASE("generate_synthetic: counts are forced") {
  SyntheticSpec spec;
  spec.class_counts = {1000, 1000};
  spec.group0_ratio = {0.8, 0.2};
  const auto ds = generate_synthetic(spec);
  CHECK(counts(ds) == CountTable({{800, 200}, {200, 800}}));
}

TEST_CASE("generate_synthetic: cell counts are exact for every stereotyping ratio") {
  for (const double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    auto spec = SyntheticSpec::stereotyped(s, 333, 4);
    const auto ds = generate_synthetic(spec);
    const auto cells = spec.cell_counts();
    const auto ct = counts(ds);
    for (int a = 0; a < 2; ++a)
      for (int g = 0; g < 2; ++g) CHECK(ct.at(a, g) == cells[static_cast<std::size_t>(a)][static_cast<std::size_t>(g)]);
    CHECK(cells[0][0] == std::llround(s * 333));
  }
}

TEST_CASE("generate_synthetic: deterministic in seed") {
  auto spec = two_class_spec(0.3, 0.7, 200, 1.0);
  CHECK(generate_synthetic(spec) == generate_synthetic(spec));
  auto other = spec;
  other.seed = 6;
  CHECK_FALSE(generate_synthetic(spec) == generate_synthetic(other));
}

TEST_CASE("generate_synthetic: group_signal 0 leaves no linear group information") {
  const auto ds = generate_synthetic(two_class_spec(0.5, 0.5, 2000, 0.0));
  CHECK(group_probe_accuracy(ds) <= 0.55);
}

TEST_CASE("generate_synthetic: balanced ratio gives balanced cells and EO weights of one") {
  const auto ds = generate_synthetic(SyntheticSpec::stereotyped(0.5, 400, 4));
  const auto ct = counts(ds);
  CHECK(ct.at(0, 0) == ct.at(0, 1));
  CHECK(ct.at(1, 0) == ct.at(1, 1));
  const auto w = reward::scale_eo(ct);
  CHECK(w.w.isOnes(0.0));
}

TEST_CASE("generate_synthetic rejects invalid specs") {
  SyntheticSpec spec;
  spec.class_counts = {10, -1};
  spec.group0_ratio = {0.5, 0.5};
  CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
  spec.class_counts = {10, 10};
  spec.group0_ratio = {0.5, 1.5};
  CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
}

TEST_CASE("append_group_feature adds the group bit") {
  Eigen::MatrixXd x(1, 2);
  x << 0.5, -1.0;
  const Dataset ds(x, {0, 1}, {1, 0}, 2, 2, "t");
  const auto out = append_group_feature(ds);
  CHECK(out.dim() == 2);
  CHECK(out.context(0)(0) == 0.5);
  CHECK(out.context(0)(1) == 1.0);
  CHECK(out.context(1)(1) == 0.0);
  CHECK(out.classes() == ds.classes());
  CHECK(out.groups() == ds.groups());
}

TEST_CASE("append_group_feature needs exactly two groups") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(1, 3);
  const Dataset ds(x, {0, 0, 0}, {0, 1, 2}, 1, 3, "t");
  CHECK_THROWS_AS(append_group_feature(ds), ConfigError);
}

TEST_CASE("append_group_feature makes the group linearly decodable") {
  const auto ds = generate_synthetic(two_class_spec(0.5, 0.5, 1000, 0.0));
  CHECK(group_probe_accuracy(append_group_feature(ds)) >= 0.99);
}

TEST_CASE("mp_debias equalizes the group means along the removed direction") {
  const auto ds = generate_synthetic(two_class_spec(0.3, 0.7, 500, 2.0));
  const auto out = mp_debias(ds);
  Eigen::VectorXd m0 = Eigen::VectorXd::Zero(ds.dim());
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(ds.dim());
  Eigen::VectorXd o0 = m0, o1 = m1;
  double n0 = 0, n1 = 0;
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    if (ds.group_of(i) == 0) {
      m0 += ds.context(i);
      o0 += out.context(i);
      ++n0;
    } else {
      m1 += ds.context(i);
      o1 += out.context(i);
      ++n1;
    }
  }
  const Eigen::VectorXd v = (m0 / n0 - m1 / n1).normalized();
  CHECK(std::abs(v.dot(o0 / n0) - v.dot(o1 / n1)) <= 1e-10);
}

TEST_CASE("mp_debias: one-dimensional x = g collapses to zero") {
  Eigen::MatrixXd x(1, 4);
  x << 0.0, 1.0, 0.0, 1.0;
  const Dataset ds(x, {0, 0, 1, 1}, {0, 1, 0, 1}, 2, 2, "t");
  CHECK(mp_debias(ds).contexts().cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("mp_debias is idempotent") {
  const auto ds = generate_synthetic(two_class_spec(0.2, 0.6, 300, 1.0));
  const auto once = mp_debias(ds);
  set_warnings_enabled(false);
  const auto twice = mp_debias(once);
  set_warnings_enabled(true);
  CHECK((once.contexts() - twice.contexts()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("mp_debias removes a linear group signal") {
  auto spec = two_class_spec(0.5, 0.5, 2000, 0.5);
  spec.noise_sigma = 0.4;
  const auto ds = generate_synthetic(spec);
  CHECK(group_probe_accuracy(ds) > 0.62);
  CHECK(group_probe_accuracy(mp_debias(ds)) <= 0.6);
}

TEST_CASE("mp_debias: coinciding means are a no-op") {
  Eigen::MatrixXd x(1, 4);
  x << 1.0, 1.0, 2.0, 2.0;
  const Dataset ds(x, {0, 0, 1, 1}, {0, 1, 0, 1}, 2, 2, "t");
  set_warnings_enabled(false);
  CHECK(mp_debias(ds).contexts() == ds.contexts());
  set_warnings_enabled(true);
}

TEST_CASE("eo_downsample: (900, 100) becomes (100, 100)") {
  const auto ds = dataset_with_cells({{900, 100}, {50, 50}});
  const auto out = eo_downsample(ds, 3);
  CHECK(counts(out) == CountTable({{100, 100}, {50, 50}}));
}

TEST_CASE("eo_downsample output is a sub-multiset with per-class parity") {
  numkit::Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<std::int64_t>> cells;
    for (int a = 0; a < 4; ++a)
      cells.push_back({1 + static_cast<std::int64_t>(rng.below(60)), 1 + static_cast<std::int64_t>(rng.below(60))});
    const auto ds = dataset_with_cells(cells, 2, static_cast<std::uint64_t>(trial));
    const auto out = eo_downsample(ds, rng());
    const auto ct = counts(out);
    for (int a = 0; a < 4; ++a) CHECK(ct.at(a, 0) == ct.at(a, 1));
    const auto in_rows = rows(ds);
    for (const auto& r : rows(out)) CHECK(in_rows.count(r) >= 1);
  }
}

TEST_CASE("eo_downsample keeps single-group classes") {
  const auto ds = dataset_with_cells({{30, 0}, {20, 10}});
  set_warnings_enabled(false);
  const auto out = eo_downsample(ds, 1);
  set_warnings_enabled(true);
  CHECK(counts(out) == CountTable({{30, 0}, {10, 10}}));
}

TEST_CASE("filter_min_count keeps qualifying classes and re-indexes them") {
  const auto ds = dataset_with_cells({{1200, 1100}, {900, 5000}});
  const auto out = filter_min_count(ds, 1000);
  CHECK(out.n_classes() == 1);
  CHECK(counts(out) == CountTable({{1200, 1100}}));
  CHECK(out.provenance().find("0->0") != std::string::npos);
}

TEST_CASE("filter_min_count: threshold 0 is the identity") {
  const auto ds = dataset_with_cells({{3, 0}, {0, 4}, {2, 2}});
  CHECK(filter_min_count(ds, 0) == ds);
}

TEST_CASE("filter_min_count: labels stay in range after re-indexing") {
  const auto ds = dataset_with_cells({{5, 1}, {6, 7}, {0, 9}, {8, 8}});
  const auto out = filter_min_count(ds, 5);
  CHECK(out.n_classes() == 2);
  for (const int c : out.classes()) {
    CHECK(c >= 0);
    CHECK(c < out.n_classes());
  }
  CHECK(counts(out) == CountTable({{6, 7}, {8, 8}}));
  CHECK_THROWS_AS(filter_min_count(ds, 100), ConfigError);
}

TEST_CASE("transforms apply in declared order and record it") {
  const auto ds = generate_synthetic(two_class_spec(0.3, 0.7, 200, 1.0));
  const std::vector<Transform> order_a = {Transform::parse("mp_debias"), Transform::parse("append_group_feature")};
  const std::vector<Transform> order_b = {Transform::parse("append_group_feature"), Transform::parse("mp_debias")};
  const auto a = apply_transforms(ds, order_a, 1);
  const auto b = apply_transforms(ds, order_b, 1);
  CHECK(a.provenance().find("mp_debias") < a.provenance().find("append_group_feature"));
  CHECK(b.provenance().find("append_group_feature") < b.provenance().find("mp_debias"));
  // Appending after debiasing reintroduces an explicit group signal.
  CHECK(group_probe_accuracy(a) >= 0.99);
  CHECK(group_probe_accuracy(b) < 0.99);
  CHECK(Transform::parse("filter_min_count:12").min_per_cell == 12);
  CHECK(Transform::parse("filter_min_count:12").name() == "filter_min_count:12");
  CHECK_THROWS_AS(Transform::parse("shuffle"), ConfigError);
}

TEST_CASE("embedding file: save then load is the identity") {
  const auto ds = generate_synthetic(two_class_spec(0.3, 0.7, 50, 1.0));
  const auto path = temp_path("roundtrip.fcb");
  save_embeddings(ds, path);
  const auto back = load_embeddings(path);
  CHECK(back == ds);
  CHECK(std::filesystem::file_size(path) == embedding_file_size(100, 8));
  std::filesystem::remove(path);
}

TEST_CASE("embedding file: n=2, d=3 is 54 bytes") {
  CHECK(kEmbeddingHeaderBytes == 4 + 2 + 4 * 4);
  CHECK(embedding_file_size(2, 3) == 54u);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 2);
  const Dataset ds(x, {0, 1}, {1, 0}, 2, 2, "t");
  CHECK(encode_embeddings(ds).size() == 54u);
}

TEST_CASE("embedding file: byte layout is little-endian FCB1") {
  Eigen::MatrixXd x(1, 1);
  x << 1.0;
  const Dataset ds(x, {1}, {0}, 2, 2, "t");
  const auto bytes = encode_embeddings(ds);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "FCB1");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 1);  // n = 1
  CHECK(bytes[10] == 1);  // d = 1
  CHECK(bytes[14] == 2);  // n_classes
  CHECK(bytes[18] == 2);  // n_groups
  // 1.0f = 0x3f800000
  CHECK(bytes[22] == 0x00);
  CHECK(bytes[25] == 0x3f);
  CHECK(bytes[26] == 1);  // class
  CHECK(bytes[28] == 0);  // group
}

TEST_CASE("embedding file: corrupt input reports the byte offset") {
  const auto ds = generate_synthetic(two_class_spec(0.5, 0.5, 4, 0.0));
  const auto good = encode_embeddings(ds);

  auto bad_magic = good;
  bad_magic[0] = 'X';
  try {
    decode_embeddings(bad_magic, "t");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 0u);
  }

  auto bad_version = good;
  bad_version[4] = 2;
  try {
    decode_embeddings(bad_version, "t");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4u);
  }

  auto truncated = good;
  truncated.resize(truncated.size() - 3);
  CHECK_THROWS_AS(decode_embeddings(truncated, "t"), ParseError);

  auto bad_label = good;
  const std::size_t class_offset = kEmbeddingHeaderBytes + 8 * 4;
  bad_label[class_offset] = 7;
  try {
    decode_embeddings(bad_label, "t");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == class_offset);
  }

  auto trailing = good;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_embeddings(trailing, "t"), ParseError);
}

TEST_CASE("csv loader reads an optional header") {
  const auto path = temp_path("small.csv");
  {
    std::ofstream out(path);
    out << "f0,f1,class,group\n0.5,1.5,1,0\n-2,3,0,1\n";
  }
  const auto ds = load_csv(path);
  CHECK(ds.size() == 2);
  CHECK(ds.dim() == 2);
  CHECK(ds.context(1)(0) == -2.0);
  CHECK(ds.class_of(0) == 1);
  CHECK(ds.group_of(1) == 1);
  CHECK(ds.n_classes() == 2);
  {
    std::ofstream out(path);
    out << "0.5,1.5,1,0\n-2,oops,0,1\n";
  }
  CHECK_THROWS_AS(load_csv(path), ParseError);
  std::filesystem::remove(path);
}
