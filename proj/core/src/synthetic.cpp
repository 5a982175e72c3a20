#include "profilematch/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "profilematch/rng.hpp"

namespace profilematch {
namespace {

enum Stream : std::uint64_t { kSourceNoise = 1, kTargetNoise = 2 };

Vector gaussian_vector(Rng& rng, std::normal_distribution<double>& normal, std::size_t d) {
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = normal(rng);
  return v;
}

}  // namespace

void MixtureSpec::validate() const {
  const std::size_t t = components();
  if (t == 0 || dim() == 0) throw InputError("mixture needs at least one component and d >= 1");
  if (weights.size() != t || stds.size() != t) {
    throw DimensionError("mixture weights/stds must have one entry per center");
  }
  if (!centers.allFinite()) throw InputError("mixture centers must be finite");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw InputError("mixture weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("mixture weights must sum to 1");
  for (double s : stds) {
    if (!std::isfinite(s) || s < 0.0) throw InputError("mixture stds must be nonnegative");
  }
  const auto zeros = std::count(stds.begin(), stds.end(), 0.0);
  if (zeros != 0 && static_cast<std::size_t>(zeros) != stds.size()) {
    throw InputError("mixture stds must be all positive or all zero");
  }
}

LabeledSample sample_mixture(const MixtureSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw InputError("sample size must be >= 1");
  const std::size_t t = spec.components();
  const std::size_t d = spec.dim();

  std::vector<double> cumulative(t);
  std::partial_sum(spec.weights.begin(), spec.weights.end(), cumulative.begin());
  // Index of the last component with positive weight absorbs rounding at u ~ 1.
  std::size_t last = 0;
  for (std::size_t k = 0; k < t; ++k)
    if (spec.weights[k] > 0.0) last = k;

  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = unit(rng);
    std::size_t k = 0;
    while (k < last && !(u < cumulative[k] && spec.weights[k] > 0.0)) ++k;
    labels[i] = k;
    const auto ki = static_cast<Eigen::Index>(k);
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(d); ++c) {
      pts(static_cast<Eigen::Index>(i), c) = spec.centers(ki, c) + spec.stds[k] * normal(rng);
    }
  }
  return {PointCloud(std::move(pts)), std::move(labels)};
}

PairedMixtures make_paired_mixtures(std::size_t shared, std::size_t t, std::size_t s,
                                    std::size_t d, double center_scale, double sigma,
                                    std::uint64_t seed) {
  if (shared > std::min(t, s)) {
    throw InputError("shared component count K=" + std::to_string(shared) +
                     " exceeds min(t, s)=" + std::to_string(std::min(t, s)));
  }
  if (t == 0 || s == 0 || d == 0) throw InputError("mixtures need t, s, d >= 1");
  if (!(center_scale > 0.0) || !std::isfinite(center_scale)) {
    throw InputError("center scale must be positive");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InputError("sigma must be >= 0");

  Rng rng(seed);
  std::uniform_real_distribution<double> coord(0.0, center_scale);
  const double min_gap = 0.1 * center_scale;
  std::vector<Vector> placed;
  auto draw_center = [&] {
    for (int attempt = 0; attempt < 100000; ++attempt) {
      Vector c(static_cast<Eigen::Index>(d));
      for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = coord(rng);
      const bool clear = std::all_of(placed.begin(), placed.end(),
                                     [&](const Vector& p) { return (p - c).norm() >= min_gap; });
      if (clear) {
        placed.push_back(c);
        return c;
      }
    }
    throw InputError("could not place separated centers; reduce the component count");
  };

  std::vector<Vector> common, mu_own, nu_own;
  for (std::size_t k = 0; k < shared; ++k) common.push_back(draw_center());
  for (std::size_t k = shared; k < t; ++k) mu_own.push_back(draw_center());
  for (std::size_t k = shared; k < s; ++k) nu_own.push_back(draw_center());

  auto build = [&](std::size_t count, const std::vector<Vector>& own) {
    MixtureSpec spec;
    spec.centers.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < count; ++k) {
      const Vector& c = k < shared ? common[k] : own[k - shared];
      spec.centers.row(static_cast<Eigen::Index>(k)) = c.transpose();
    }
    spec.weights.assign(count, 1.0 / static_cast<double>(count));
    spec.stds.assign(count, sigma);
    return spec;
  };
  return {build(t, mu_own), build(s, nu_own), shared};
}

Matrix random_rotation(std::size_t d, std::uint64_t seed) {
  if (d == 0) throw InputError("rotation dimension must be >= 1");
  const auto n = static_cast<Eigen::Index>(d);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (r(k, k) < 0.0) q.col(k) *= -1.0;
  }
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

Matrix make_two_coordinate_rotation(std::size_t d, double angle) {
  if (d < 2) throw InputError("a two-coordinate rotation needs d >= 2");
  Matrix r = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const double c = std::cos(angle), s = std::sin(angle);
  r(0, 0) = c;
  r(0, 1) = -s;
  r(1, 0) = s;
  r(1, 1) = c;
  return r;
}

PointCloud apply_rigid(const PointCloud& cloud, const Matrix& rotation, const Vector& shift) {
  const auto d = static_cast<Eigen::Index>(cloud.dim());
  if (rotation.rows() != d || rotation.cols() != d || shift.size() != d) {
    throw DimensionError("rigid transform dimension does not match the cloud");
  }
  Matrix out = cloud.points() * rotation.transpose();
  out.rowwise() += shift.transpose();
  return PointCloud(std::move(out));
}

CorrespondenceInstance noisy_correspondence_instance(const PointCloud& locations,
                                                     const Matrix& rotation, const Vector& shift,
                                                     const Permutation& truth, double sigma,
                                                     double tau, std::uint64_t seed) {
  const std::size_t n = locations.size();
  const std::size_t d = locations.dim();
  if (truth.size() != n) throw DimensionError("permutation size does not match the locations");
  if (!(sigma >= 0.0) || !(tau >= 0.0)) throw InputError("noise levels must be >= 0");

  const PointCloud moved = apply_rigid(locations, rotation, shift);
  Matrix eta(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    eta.row(static_cast<Eigen::Index>(truth[i])) = moved.point(i);
  }

  Rng source_rng(derive_seed(seed, {kSourceNoise}));
  Rng target_rng(derive_seed(seed, {kTargetNoise}));
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x = locations.points();
  for (std::size_t i = 0; i < n; ++i) {
    x.row(static_cast<Eigen::Index>(i)) += sigma * gaussian_vector(source_rng, normal, d).transpose();
  }
  std::normal_distribution<double> normal_t(0.0, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    eta.row(static_cast<Eigen::Index>(j)) += tau * gaussian_vector(target_rng, normal_t, d).transpose();
  }
  return {PointCloud(std::move(x)), PointCloud(std::move(eta))};
}

Permutation random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  Rng rng(seed);
  // Fisher-Yates with an explicit draw so the result does not depend on the
  // standard library's shuffle.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(m[i - 1], m[j]);
  }
  return Permutation(std::move(m));
}

KMeansResult kmeans(const PointCloud& cloud, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters) {
  const std::size_t n = cloud.size();
  if (k == 0) throw InputError("k must be >= 1");
  if (k > n) {
    throw InputError("k=" + std::to_string(k) + " exceeds the number of points " +
                     std::to_string(n));
  }
  const Matrix& pts = cloud.points();
  const auto d = static_cast<Eigen::Index>(cloud.dim());
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // k-means++ seeding.
  Matrix centers(static_cast<Eigen::Index>(k), d);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<char> chosen(n, 0);
  std::size_t first = static_cast<std::size_t>(rng() % n);
  auto add_center = [&](std::size_t c, std::size_t idx) {
    chosen[idx] = 1;
    centers.row(static_cast<Eigen::Index>(c)) = pts.row(static_cast<Eigen::Index>(idx));
    for (std::size_t i = 0; i < n; ++i) {
      const double dd = (pts.row(static_cast<Eigen::Index>(i)) -
                         pts.row(static_cast<Eigen::Index>(idx))).squaredNorm();
      nearest[i] = std::min(nearest[i], dd);
    }
  };
  add_center(0, first);
  for (std::size_t c = 1; c < k; ++c) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double run = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        run += nearest[i];
        if (nearest[i] > 0.0 && target < run) {
          pick = i;
          break;
        }
      }
      if (pick == n) {
        for (std::size_t i = n; i-- > 0;)
          if (nearest[i] > 0.0) {
            pick = i;
            break;
          }
      }
    }
    if (pick == n) {
      // Remaining points coincide with chosen centers.
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) {
          pick = i;
          break;
        }
    }
    add_center(c, pick);
  }

  KMeansResult result;
  result.labels.assign(n, k);
  std::vector<double> dist_to_center(n, 0.0);
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dd = (pts.row(static_cast<Eigen::Index>(i)) -
                           centers.row(static_cast<Eigen::Index>(c))).squaredNorm();
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      dist_to_center[i] = best_d;
      if (result.labels[i] != best) {
        result.labels[i] = best;
        changed = true;
      }
    }
    result.iterations = iter + 1;
    if (!changed) break;

    Matrix sums = Matrix::Zero(static_cast<Eigen::Index>(k), d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Eigen::Index>(result.labels[i])) += pts.row(static_cast<Eigen::Index>(i));
      ++counts[result.labels[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers.row(static_cast<Eigen::Index>(c)) =
            sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(counts[c]);
        continue;
      }
      const auto far = static_cast<std::size_t>(
          std::max_element(dist_to_center.begin(), dist_to_center.end()) -
          dist_to_center.begin());
      centers.row(static_cast<Eigen::Index>(c)) = pts.row(static_cast<Eigen::Index>(far));
      dist_to_center[far] = 0.0;
    }
  }
  result.centers = std::move(centers);
  return result;
}

}  // namespace profilematch
