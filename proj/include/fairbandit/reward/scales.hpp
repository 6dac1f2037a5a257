#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "fairbandit/data/dataset.hpp"

namespace fairbandit::reward {

enum class Scheme { uniform, rho_plus, rho_minus, eo, ipw };

Scheme parse_scheme(const std::string& text);
std::string scheme_name(Scheme scheme);
inline constexpr Scheme kAllSchemes[] = {Scheme::uniform, Scheme::rho_plus, Scheme::rho_minus,
                                         Scheme::eo, Scheme::ipw};

// W(a, g): one nonnegative reward scale per (class, group) cell.
struct RewardScaleMatrix {
  Eigen::MatrixXd w;  // n_classes x n_groups
  Scheme scheme = Scheme::uniform;
  std::uint64_t source_hash = 0;
  // Cells whose zero count was replaced by 1 ("class:group").
  std::vector<std::string> clamped_cells;

  int n_classes() const { return static_cast<int>(w.rows()); }
  int n_groups() const { return static_cast<int>(w.cols()); }
  double at(int cls, int group) const { return w(cls, group); }
};

RewardScaleMatrix scale_uniform(const data::CountTable& ct);
// Majority group of each class scaled down to |D_min| / |D_maj|; minority keeps 1.
RewardScaleMatrix scale_rho_plus(const data::CountTable& ct);
// Minority group scaled up to |D_maj| / |D_min|; majority keeps 1.
RewardScaleMatrix scale_rho_minus(const data::CountTable& ct);
// 1 / (n_groups * P(g | a)); for two groups this is 0.5 / P(g | a).
RewardScaleMatrix scale_eo(const data::CountTable& ct);
// grand_total / counts[a][g] = 1 / P(a, g).
RewardScaleMatrix scale_ipw(const data::CountTable& ct);

RewardScaleMatrix build_scales(Scheme scheme, const data::CountTable& ct);

// +W(a_true, g) for a correct prediction, -W(a_true, g) otherwise.
double reward(const RewardScaleMatrix& w, int a_true, int a_pred, int group);

// Rows = classes, columns = groups, preceded by a "# scheme=<name>" line.
std::string to_csv(const RewardScaleMatrix& w);

}  // namespace fairbandit::reward
