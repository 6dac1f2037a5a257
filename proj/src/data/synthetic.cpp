#include "fairbandit/data/synthetic.hpp"

#include <cmath>
#include <sstream>

#include "fairbandit/errors.hpp"
#include "fairbandit/numkit/rng.hpp"

namespace fairbandit::data {

SyntheticSpec SyntheticSpec::stereotyped(double ratio, std::int64_t per_class, int dim) {
  SyntheticSpec spec;
  spec.n_classes = 2;
  spec.dim = dim;
  spec.class_counts = {per_class, per_class};
  spec.group0_ratio = {ratio, 1.0 - ratio};
  return spec;
}

std::vector<std::array<std::int64_t, 2>> SyntheticSpec::cell_counts() const {
  std::vector<std::array<std::int64_t, 2>> cells;
  for (std::size_t a = 0; a < class_counts.size(); ++a) {
    const auto g0 = static_cast<std::int64_t>(
        std::llround(group0_ratio[a] * static_cast<double>(class_counts[a])));
    cells.push_back({g0, class_counts[a] - g0});
  }
  return cells;
}

void SyntheticSpec::validate() const {
  if (n_classes < 1) throw ConfigError("synthetic: n_classes must be >= 1");
  if (n_groups != 2) throw ConfigError("synthetic: only n_groups = 2 is supported");
  if (dim < 1) throw ConfigError("synthetic: dim must be >= 1");
  if (static_cast<int>(class_counts.size()) != n_classes)
    throw ConfigError("synthetic: class_counts needs one entry per class");
  if (static_cast<int>(group0_ratio.size()) != n_classes)
    throw ConfigError("synthetic: group0_ratio needs one entry per class");
  for (int a = 0; a < n_classes; ++a) {
    const auto ratio = group0_ratio[static_cast<std::size_t>(a)];
    if (!(ratio >= 0.0 && ratio <= 1.0))
      throw ConfigError("synthetic: group ratio of class " + std::to_string(a) +
                        " outside [0, 1]");
  }
  for (const auto& cell : cell_counts())
    if (cell[0] < 0 || cell[1] < 0) throw ConfigError("synthetic: negative per-(class, group) count");
  if (!(separation > 0.0)) throw ConfigError("synthetic: separation must be positive");
  if (!(group_signal >= 0.0)) throw ConfigError("synthetic: group_signal must be nonnegative");
  if (!(noise_sigma > 0.0)) throw ConfigError("synthetic: noise_sigma must be positive");
}

std::string SyntheticSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "classes=" << n_classes << ";groups=" << n_groups << ";dim=" << dim << ";counts=";
  for (auto c : class_counts) os << c << ',';
  os << ";ratios=";
  for (auto r : group0_ratio) os << r << ',';
  os << ";separation=" << separation << ";group_signal=" << group_signal
     << ";noise=" << noise_sigma << ";seed=" << seed;
  return os.str();
}

namespace {
Eigen::VectorXd gaussian_vector(Eigen::Index dim, numkit::Rng& rng) {
  Eigen::VectorXd v(dim);
  for (Eigen::Index k = 0; k < dim; ++k) v(k) = rng.normal();
  return v;
}
}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const numkit::Rng root(spec.seed);
  auto direction_rng = root.fork("group_direction");
  auto center_rng = root.fork("class_centers");
  auto sample_rng = root.fork("samples");

  Eigen::VectorXd direction = gaussian_vector(spec.dim, direction_rng);
  direction.normalize();
  std::vector<Eigen::VectorXd> centers;
  for (int a = 0; a < spec.n_classes; ++a) {
    Eigen::VectorXd mu = gaussian_vector(spec.dim, center_rng);
    centers.push_back(mu.normalized() * spec.separation);
  }

  const auto cells = spec.cell_counts();
  std::int64_t total = 0;
  for (const auto& cell : cells) total += cell[0] + cell[1];
  if (total == 0) throw ConfigError("synthetic: class counts sum to zero");

  Eigen::MatrixXd contexts(spec.dim, total);
  std::vector<int> classes, groups;
  classes.reserve(static_cast<std::size_t>(total));
  groups.reserve(static_cast<std::size_t>(total));
  Eigen::Index column = 0;
  for (int a = 0; a < spec.n_classes; ++a) {
    for (int g = 0; g < 2; ++g) {
      const double sign = g == 0 ? 1.0 : -1.0;
      const Eigen::VectorXd mean = centers[static_cast<std::size_t>(a)] +
                                   sign * (spec.group_signal / 2.0) * direction;
      for (std::int64_t k = 0; k < cells[static_cast<std::size_t>(a)][static_cast<std::size_t>(g)]; ++k) {
        Eigen::VectorXd x = mean + spec.noise_sigma * gaussian_vector(spec.dim, sample_rng);
        contexts.col(column++) = x.cast<float>().cast<double>();
        classes.push_back(a);
        groups.push_back(g);
      }
    }
  }
  const auto tag = numkit::Rng::fnv1a64(spec.describe());
  std::ostringstream provenance;
  provenance << "synthetic:" << std::hex << tag;
  return Dataset(std::move(contexts), std::move(classes), std::move(groups), spec.n_classes, 2,
                 provenance.str());
}

}  // namespace fairbandit::data
