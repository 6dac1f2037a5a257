#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fairbandit/data/dataset.hpp"

namespace fairbandit::data {

// Gaussian class blobs with a shared two-sided group offset.
//
// class a has center mu_a (standard normal direction scaled to norm
// `separation`); group g adds +-(group_signal / 2) * v along one fixed unit
// vector v. Each example is mu_a + delta_g + noise_sigma * N(0, I).
struct SyntheticSpec {
  int n_classes = 2;
  int n_groups = 2;
  int dim = 16;
  std::vector<std::int64_t> class_counts;  // samples per class
  std::vector<double> group0_ratio;         // p(g = 0 | a)
  double separation = 4.0;
  double group_signal = 0.0;
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;

  // Two classes, ratio s for class 0 and 1 - s for class 1.
  static SyntheticSpec stereotyped(double ratio, std::int64_t per_class, int dim);

  // Exact per-(class, group) counts: round(ratio * n_a) for g = 0, remainder for g = 1.
  std::vector<std::array<std::int64_t, 2>> cell_counts() const;

  void validate() const;
  std::string describe() const;
};

// Contexts are rounded to f32 precision so they survive the binary format.
Dataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace fairbandit::data
