#include "fairbandit/reward/scales.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "fairbandit/errors.hpp"

namespace fairbandit::reward {

Scheme parse_scheme(const std::string& text) {
  if (text == "uniform" || text == "none") return Scheme::uniform;
  if (text == "rho_plus" || text == "rho+") return Scheme::rho_plus;
  if (text == "rho_minus" || text == "rho-") return Scheme::rho_minus;
  if (text == "eo") return Scheme::eo;
  if (text == "ipw") return Scheme::ipw;
  throw ConfigError("unknown reward scale scheme '" + text + "'");
}

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::uniform: return "uniform";
    case Scheme::rho_plus: return "rho_plus";
    case Scheme::rho_minus: return "rho_minus";
    case Scheme::eo: return "eo";
    case Scheme::ipw: return "ipw";
  }
  return "?";
}

namespace {

RewardScaleMatrix blank(Scheme scheme, const data::CountTable& ct) {
  RewardScaleMatrix m;
  m.w = Eigen::MatrixXd::Ones(ct.n_classes(), ct.n_groups());
  m.scheme = scheme;
  m.source_hash = ct.hash();
  return m;
}

// Zero-cell rule: a zero cell inside a class that is present gets count 1.
// Rows of absent classes stay all-zero (their scales are never used).
Eigen::MatrixXd clamped_counts(const data::CountTable& ct, RewardScaleMatrix& out) {
  Eigen::MatrixXd c(ct.n_classes(), ct.n_groups());
  for (int a = 0; a < ct.n_classes(); ++a) {
    const bool present = ct.class_total(a) > 0;
    for (int g = 0; g < ct.n_groups(); ++g) {
      c(a, g) = static_cast<double>(ct.at(a, g));
      if (present && ct.at(a, g) == 0) {
        c(a, g) = 1.0;
        out.clamped_cells.push_back(std::to_string(a) + ":" + std::to_string(g));
      }
    }
  }
  if (!out.clamped_cells.empty()) {
    std::string cells;
    for (const auto& cell : out.clamped_cells) cells += " " + cell;
    warn(scheme_name(out.scheme) + " scales: zero count clamped to 1 for class:group" + cells);
  }
  return c;
}

void require_two_groups(const data::CountTable& ct, Scheme scheme) {
  if (ct.n_groups() != 2)
    throw ConfigError(scheme_name(scheme) + " scales need exactly 2 groups, got " +
                      std::to_string(ct.n_groups()));
}

// Shared by both rho schemes. rho = min / maj; at a tie every group is
// treated as majority and keeps 1.
RewardScaleMatrix rho_scales(Scheme scheme, const data::CountTable& ct) {
  require_two_groups(ct, scheme);
  auto m = blank(scheme, ct);
  const auto c = clamped_counts(ct, m);
  for (int a = 0; a < ct.n_classes(); ++a) {
    if (ct.class_total(a) == 0 || c(a, 0) == c(a, 1)) continue;
    const int minority = c(a, 0) < c(a, 1) ? 0 : 1;
    const int majority = 1 - minority;
    const double rho = c(a, minority) / c(a, majority);
    if (scheme == Scheme::rho_plus)
      m.w(a, majority) = rho;
    else
      m.w(a, minority) = 1.0 / rho;
  }
  return m;
}

}  // namespace

RewardScaleMatrix scale_uniform(const data::CountTable& ct) { return blank(Scheme::uniform, ct); }

RewardScaleMatrix scale_rho_plus(const data::CountTable& ct) {
  return rho_scales(Scheme::rho_plus, ct);
}

RewardScaleMatrix scale_rho_minus(const data::CountTable& ct) {
  return rho_scales(Scheme::rho_minus, ct);
}

RewardScaleMatrix scale_eo(const data::CountTable& ct) {
  auto m = blank(Scheme::eo, ct);
  const auto c = clamped_counts(ct, m);
  const double groups = static_cast<double>(ct.n_groups());
  for (int a = 0; a < ct.n_classes(); ++a) {
    const double row_total = c.row(a).sum();
    if (row_total == 0.0) continue;
    for (int g = 0; g < ct.n_groups(); ++g) m.w(a, g) = 1.0 / (groups * (c(a, g) / row_total));
  }
  return m;
}

RewardScaleMatrix scale_ipw(const data::CountTable& ct) {
  auto m = blank(Scheme::ipw, ct);
  const auto c = clamped_counts(ct, m);
  const double total = static_cast<double>(ct.grand_total());
  for (int a = 0; a < ct.n_classes(); ++a) {
    if (ct.class_total(a) == 0) continue;
    for (int g = 0; g < ct.n_groups(); ++g) m.w(a, g) = total / c(a, g);
  }
  return m;
}

RewardScaleMatrix build_scales(Scheme scheme, const data::CountTable& ct) {
  switch (scheme) {
    case Scheme::uniform: return scale_uniform(ct);
    case Scheme::rho_plus: return scale_rho_plus(ct);
    case Scheme::rho_minus: return scale_rho_minus(ct);
    case Scheme::eo: return scale_eo(ct);
    case Scheme::ipw: return scale_ipw(ct);
  }
  throw ConfigError("unknown scheme");
}

double reward(const RewardScaleMatrix& w, int a_true, int a_pred, int group) {
  if (a_true < 0 || a_true >= w.n_classes() || a_pred < 0 || a_pred >= w.n_classes())
    throw std::out_of_range("reward: class label outside [0, " + std::to_string(w.n_classes()) +
                            ")");
  if (group < 0 || group >= w.n_groups())
    throw std::out_of_range("reward: group label outside [0, " + std::to_string(w.n_groups()) +
                            ")");
  const double scale = w.w(a_true, group);
  return a_pred == a_true ? scale : -scale;
}

std::string to_csv(const RewardScaleMatrix& w) {
  std::ostringstream os;
  os << "# scheme=" << scheme_name(w.scheme) << "\nclass";
  for (int g = 0; g < w.n_groups(); ++g) os << ",g" << g;
  os << '\n';
  char buf[64];
  for (int a = 0; a < w.n_classes(); ++a) {
    os << a;
    for (int g = 0; g < w.n_groups(); ++g) {
      std::snprintf(buf, sizeof buf, "%.6g", w.w(a, g));
      os << ',' << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace fairbandit::reward
