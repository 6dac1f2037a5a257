#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairbandit/data/dataset.hpp"

namespace fairbandit::data {

// Adds one dimension holding the group label (0 or 1).
Dataset append_group_feature(const Dataset& ds);

// Removes the direction between the two global group means from every context.
// Returns the input unchanged (with a warning) when the means coincide.
Dataset mp_debias(const Dataset& ds);

// Within each class, subsample the larger group down to the smaller group's count.
Dataset eo_downsample(const Dataset& ds, std::uint64_t seed);

// Keeps classes whose every group cell has at least `min_per_cell` examples and
// re-indexes the surviving classes densely.
Dataset filter_min_count(const Dataset& ds, std::int64_t min_per_cell);

enum class TransformKind { append_group_feature, mp_debias, eo_downsample, filter_min_count };

struct Transform {
  TransformKind kind;
  std::int64_t min_per_cell = 0;  // filter_min_count only

  // "append_group_feature", "mp_debias", "eo_downsample", "filter_min_count:<n>".
  static Transform parse(const std::string& text);
  std::string name() const;
};

// Applies transforms strictly in order; each appends its name to provenance.
Dataset apply_transforms(const Dataset& ds, const std::vector<Transform>& transforms,
                         std::uint64_t seed);

}  // namespace fairbandit::data
