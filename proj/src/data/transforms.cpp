#include "fairbandit/data/transforms.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>

#include "fairbandit/errors.hpp"
#include "fairbandit/numkit/rng.hpp"

namespace fairbandit::data {

Dataset append_group_feature(const Dataset& ds) {
  if (ds.n_groups() != 2)
    throw ConfigError("append_group_feature supports exactly 2 groups, dataset has " +
                      std::to_string(ds.n_groups()));
  Eigen::MatrixXd contexts(ds.dim() + 1, ds.size());
  contexts.topRows(ds.dim()) = ds.contexts();
  for (Eigen::Index i = 0; i < ds.size(); ++i)
    contexts(ds.dim(), i) = static_cast<double>(ds.group_of(i));
  return Dataset(std::move(contexts), ds.classes(), ds.groups(), ds.n_classes(), ds.n_groups(),
                 ds.provenance() + "|append_group_feature");
}

Dataset mp_debias(const Dataset& ds) {
  Eigen::VectorXd sum0 = Eigen::VectorXd::Zero(ds.dim());
  Eigen::VectorXd sum1 = Eigen::VectorXd::Zero(ds.dim());
  Eigen::Index n0 = 0, n1 = 0;
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    if (ds.group_of(i) == 0) {
      sum0 += ds.context(i);
      ++n0;
    } else if (ds.group_of(i) == 1) {
      sum1 += ds.context(i);
      ++n1;
    }
  }
  if (n0 == 0 || n1 == 0) throw ConfigError("mp_debias needs both groups present");
  Eigen::VectorXd direction = sum0 / static_cast<double>(n0) - sum1 / static_cast<double>(n1);
  const double norm = direction.norm();
  if (norm < 1e-12) {
    warn("mp_debias: group means coincide; contexts left unchanged");
    return Dataset(ds.contexts(), ds.classes(), ds.groups(), ds.n_classes(), ds.n_groups(),
                   ds.provenance() + "|mp_debias(noop)");
  }
  direction /= norm;
  const Eigen::RowVectorXd projections = direction.transpose() * ds.contexts();
  Eigen::MatrixXd contexts = ds.contexts() - direction * projections;
  return Dataset(std::move(contexts), ds.classes(), ds.groups(), ds.n_classes(), ds.n_groups(),
                 ds.provenance() + "|mp_debias");
}

Dataset eo_downsample(const Dataset& ds, std::uint64_t seed) {
  // members[a][g] = example indices
  std::vector<std::vector<std::vector<Eigen::Index>>> members(
      static_cast<std::size_t>(ds.n_classes()),
      std::vector<std::vector<Eigen::Index>>(static_cast<std::size_t>(ds.n_groups())));
  for (Eigen::Index i = 0; i < ds.size(); ++i)
    members[static_cast<std::size_t>(ds.class_of(i))][static_cast<std::size_t>(ds.group_of(i))]
        .push_back(i);

  numkit::Rng rng(seed);
  std::vector<Eigen::Index> kept;
  for (int a = 0; a < ds.n_classes(); ++a) {
    auto& row = members[static_cast<std::size_t>(a)];
    std::size_t smallest = SIZE_MAX;
    int present = 0;
    for (const auto& cell : row) {
      if (cell.empty()) continue;
      ++present;
      smallest = std::min(smallest, cell.size());
    }
    if (present == 0) continue;
    if (present < ds.n_groups()) {
      warn("eo_downsample: class " + std::to_string(a) +
           " is missing a group; kept without downsampling");
      for (const auto& cell : row) kept.insert(kept.end(), cell.begin(), cell.end());
      continue;
    }
    for (auto& cell : row) {
      if (cell.size() > smallest) {
        rng.shuffle(cell.begin(), cell.end());
        cell.resize(smallest);
        std::sort(cell.begin(), cell.end());
      }
      kept.insert(kept.end(), cell.begin(), cell.end());
    }
  }
  std::sort(kept.begin(), kept.end());
  return ds.subset(kept, ds.provenance() + "|eo_downsample");
}

Dataset filter_min_count(const Dataset& ds, std::int64_t min_per_cell) {
  if (min_per_cell < 0) throw ConfigError("filter_min_count threshold must be >= 0");
  const auto table = counts(ds);
  std::vector<int> remap(static_cast<std::size_t>(ds.n_classes()), -1);
  int kept_classes = 0;
  std::ostringstream mapping;
  for (int a = 0; a < ds.n_classes(); ++a) {
    bool ok = table.class_total(a) > 0 || min_per_cell == 0;
    for (int g = 0; g < ds.n_groups(); ++g) ok = ok && table.at(a, g) >= min_per_cell;
    if (!ok) continue;
    if (kept_classes > 0) mapping << ',';
    mapping << a << "->" << kept_classes;
    remap[static_cast<std::size_t>(a)] = kept_classes++;
  }
  if (kept_classes == 0)
    throw ConfigError("filter_min_count(" + std::to_string(min_per_cell) + ") keeps no classes");

  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < ds.size(); ++i)
    if (remap[static_cast<std::size_t>(ds.class_of(i))] >= 0) kept.push_back(i);
  Eigen::MatrixXd contexts(ds.dim(), static_cast<Eigen::Index>(kept.size()));
  std::vector<int> classes, groups;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    contexts.col(static_cast<Eigen::Index>(k)) = ds.context(kept[k]);
    classes.push_back(remap[static_cast<std::size_t>(ds.class_of(kept[k]))]);
    groups.push_back(ds.group_of(kept[k]));
  }
  return Dataset(std::move(contexts), std::move(classes), std::move(groups), kept_classes,
                 ds.n_groups(),
                 ds.provenance() + "|filter_min_count(" + std::to_string(min_per_cell) +
                     "):" + mapping.str());
}

Transform Transform::parse(const std::string& text) {
  if (text == "append_group_feature") return {TransformKind::append_group_feature};
  if (text == "mp_debias") return {TransformKind::mp_debias};
  if (text == "eo_downsample") return {TransformKind::eo_downsample};
  const std::string prefix = "filter_min_count:";
  if (text.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const auto value = std::stoll(text.substr(prefix.size()), &used);
      if (used == text.size() - prefix.size() && value >= 0)
        return {TransformKind::filter_min_count, value};
    } catch (const std::exception&) {
    }
    throw ConfigError("bad filter_min_count threshold in '" + text + "'");
  }
  throw ConfigError("unknown transform '" + text + "'");
}

std::string Transform::name() const {
  switch (kind) {
    case TransformKind::append_group_feature: return "append_group_feature";
    case TransformKind::mp_debias: return "mp_debias";
    case TransformKind::eo_downsample: return "eo_downsample";
    case TransformKind::filter_min_count: return "filter_min_count:" + std::to_string(min_per_cell);
  }
  return "?";
}

Dataset apply_transforms(const Dataset& ds, const std::vector<Transform>& transforms,
                         std::uint64_t seed) {
  Dataset current = ds;
  const numkit::Rng root(seed);
  for (std::size_t k = 0; k < transforms.size(); ++k) {
    const auto& t = transforms[k];
    switch (t.kind) {
      case TransformKind::append_group_feature: current = append_group_feature(current); break;
      case TransformKind::mp_debias: current = mp_debias(current); break;
      case TransformKind::eo_downsample:
        current = eo_downsample(current, root.fork("eo_downsample").fork(k).seed());
        break;
      case TransformKind::filter_min_count: current = filter_min_count(current, t.min_per_cell); break;
    }
  }
  return current;
}

}  // namespace fairbandit::data
