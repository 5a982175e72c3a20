#include "profilematch/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "profilematch/rng.hpp"
#include "profilematch/wasserstein1d.hpp"

namespace profilematch {
namespace {

DistanceProfile center_profile(const MixtureSpec& spec, std::size_t a) {
  std::vector<double> values(spec.components());
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] = (spec.centers.row(static_cast<Eigen::Index>(a)) -
                 spec.centers.row(static_cast<Eigen::Index>(k))).norm();
  }
  return DistanceProfile::weighted(std::move(values), spec.weights);
}

double max_cross_distance(const Matrix& a, const Matrix& b) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) best = std::max(best, (a.row(i) - b.row(j)).norm());
  return best;
}

double shared_weight(const PairedMixtures& pm) {
  double lambda = 0.0;
  for (std::size_t k = 0; k < pm.shared; ++k) lambda += pm.mu.weights[k];
  return lambda;
}

// The first K components must coincide in weight, center and std.
void require_identical_shared(const PairedMixtures& pm) {
  if (pm.shared > std::min(pm.mu.components(), pm.nu.components())) {
    throw InputError("shared component count exceeds min(t, s)");
  }
  for (std::size_t k = 0; k < pm.shared; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const bool same = std::abs(pm.mu.weights[k] - pm.nu.weights[k]) <= 1e-12 &&
                      std::abs(pm.mu.stds[k] - pm.nu.stds[k]) <= 1e-12 &&
                      (pm.mu.centers.row(i) - pm.nu.centers.row(i)).norm() <= 1e-12;
    if (!same) {
      throw InputError("shared component " + std::to_string(k) + " differs between mu and nu");
    }
  }
}

void check_labels(const MatchResult& result, std::span<const std::size_t> source_labels) {
  if (source_labels.size() != result.pi.size()) {
    throw DimensionError("source labels do not match the number of matched points");
  }
}

}  // namespace

double center_profile_distance(const PairedMixtures& pm, std::size_t alpha, std::size_t beta) {
  if (alpha >= pm.mu.components() || beta >= pm.nu.components()) {
    throw std::out_of_range("center index out of range");
  }
  return wasserstein_p(center_profile(pm.mu, alpha), center_profile(pm.nu, beta), 1.0);
}

Matrix center_profile_distances(const PairedMixtures& pm) {
  pm.mu.validate();
  pm.nu.validate();
  const std::size_t t = pm.mu.components(), s = pm.nu.components();
  std::vector<DistanceProfile> mu_profiles, nu_profiles;
  for (std::size_t a = 0; a < t; ++a) mu_profiles.push_back(center_profile(pm.mu, a));
  for (std::size_t b = 0; b < s; ++b) nu_profiles.push_back(center_profile(pm.nu, b));
  Matrix w(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s));
  for (std::size_t a = 0; a < t; ++a)
    for (std::size_t b = 0; b < s; ++b)
      w(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          wasserstein_p(mu_profiles[a], nu_profiles[b], 1.0);
  return w;
}

SeparationReport separation_report(const PairedMixtures& pm, std::size_t n, std::size_t m,
                                   double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  if (pm.shared == 0) throw InputError("separation needs at least one shared component");
  if (n == 0 || m == 0) throw InputError("sample sizes must be >= 1");
  const std::size_t t = pm.mu.components(), s = pm.nu.components(), K = pm.shared;
  require_identical_shared(pm);
  const auto d = static_cast<double>(pm.mu.dim());

  const Matrix w = center_profile_distances(pm);
  auto W = [&](std::size_t a, std::size_t b) {
    return w(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();

  SeparationReport r;
  Matrix all_centers(static_cast<Eigen::Index>(t + s), pm.mu.centers.cols());
  all_centers << pm.mu.centers, pm.nu.centers;
  r.R = max_cross_distance(all_centers, all_centers);
  r.Gamma = 0.0;
  for (double v : pm.mu.stds) r.Gamma = std::max(r.Gamma, v);
  for (double v : pm.nu.stds) r.Gamma = std::max(r.Gamma, v);

  r.wbar_min_offdiag = kInf;
  r.wbar_max_diag = 0.0;
  r.omega_o = kInf;
  for (std::size_t a = 0; a < K; ++a) {
    double row_min = kInf;
    for (std::size_t b = 0; b < s; ++b)
      if (b != a) row_min = std::min(row_min, W(a, b));
    r.wbar_min_offdiag = std::min(r.wbar_min_offdiag, row_min);
    r.wbar_max_diag = std::max(r.wbar_max_diag, W(a, a));
    r.omega_o = std::min(r.omega_o, row_min - W(a, a));
  }
  double outlier_min = kInf;
  for (std::size_t a = K; a < t; ++a)
    for (std::size_t b = 0; b < s; ++b) outlier_min = std::min(outlier_min, W(a, b));

  const double outlier_mass = 1.0 - shared_weight(pm);
  r.omega = r.wbar_min_offdiag - r.R * outlier_mass;
  r.omega_prime = std::min(r.wbar_min_offdiag, outlier_min) - r.R * outlier_mass;

  const double nm_min = static_cast<double>(std::min(n, m));
  const double nm_max = static_cast<double>(std::max(n, m));
  // t + s - 2 = 0 only when t = s = 1; log 0 then drives that term to zero.
  const double pairs = static_cast<double>(t + s - 2);
  const double log_terms = std::log(static_cast<double>(K)) +
                           (pairs > 0.0 ? std::log(pairs) : -kInf) + std::log(4.0 / delta);
  r.rhs_noise = 16.0 * r.Gamma * std::sqrt(d);
  r.rhs_sampling = log_terms > 0.0 ? 8.0 * r.R * std::sqrt(log_terms / (2.0 * nm_min)) : 0.0;
  r.rhs_deviation = 32.0 * r.Gamma * std::sqrt(2.0 * std::log(4.0 * nm_max * nm_max / delta));
  r.rhs = std::max({r.rhs_noise, r.rhs_sampling, r.rhs_deviation});
  return r;
}

double lemma1_bound(const PairedMixtures& pm) {
  pm.mu.validate();
  pm.nu.validate();
  require_identical_shared(pm);
  return (1.0 - shared_weight(pm)) * max_cross_distance(pm.mu.centers, pm.nu.centers);
}

double lemma1_margin(const PairedMixtures& pm) {
  const double bound = lemma1_bound(pm);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < pm.shared; ++a) {
    margin = std::min(margin, bound - center_profile_distance(pm, a, a));
  }
  return margin;
}

bool lemma1_bound_check(const PairedMixtures& pm) { return lemma1_margin(pm) >= -1e-9; }

double lemma2_bound(std::span<const double> support, std::span<const double> p,
                    std::span<const double> q) {
  if (support.empty() || p.size() != support.size() || q.size() != support.size()) {
    throw DimensionError("lemma 2 bound needs weights on the same support");
  }
  double partial = 0.0, worst = 0.0;
  for (std::size_t j = 0; j + 1 < support.size(); ++j) {
    partial += p[j] - q[j];
    worst = std::max(worst, std::abs(partial));
  }
  return (support.back() - support.front()) * worst;
}

double phi(const DistanceMatrix& dmat) {
  const std::size_t n = dmat.size();
  if (n < 2) throw InputError("Phi needs at least two locations");
  const auto profiles = all_profiles(dmat);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      best = std::min(best, wasserstein_p(profiles[i], profiles[j], 1.0));
  return best;
}

double phi(const PointCloud& locations) {
  if (locations.size() < 2) throw InputError("Phi needs at least two locations");
  return phi(pairwise_distances(locations));
}

double theorem2_noise_bound(const PointCloud& locations, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  const double separation = phi(locations);
  if (!(separation > 0.0)) {
    throw InputError("Phi = 0: the true assignment is not identifiable from distance profiles");
  }
  const double n = static_cast<double>(locations.size());
  const double d = static_cast<double>(locations.dim());
  const double denom = 64.0 * std::max(d, 8.0 * std::log(2.0 * n * n / delta));
  return separation * separation / denom;
}

double matching_accuracy(const MatchResult& result, std::span<const std::size_t> source_labels,
                         std::span<const std::size_t> target_labels, std::size_t shared) {
  check_labels(result, source_labels);
  std::size_t inliers = 0, correct = 0;
  for (std::size_t i = 0; i < source_labels.size(); ++i) {
    if (source_labels[i] >= shared) continue;
    ++inliers;
    if (result.pi[i] >= target_labels.size()) {
      throw DimensionError("target labels do not cover the matched indices");
    }
    if (target_labels[result.pi[i]] == source_labels[i]) ++correct;
  }
  if (inliers == 0) return 1.0;
  return static_cast<double>(correct) / static_cast<double>(inliers);
}

bool perfect_matching(const MatchResult& result, std::span<const std::size_t> source_labels,
                      std::span<const std::size_t> target_labels, std::size_t shared) {
  return matching_accuracy(result, source_labels, target_labels, shared) == 1.0;
}

ThresholdInterval inlier_threshold_interval(const MatchResult& result,
                                            std::span<const std::size_t> source_labels,
                                            std::size_t shared) {
  check_labels(result, source_labels);
  ThresholdInterval out{-std::numeric_limits<double>::infinity(),
                        std::numeric_limits<double>::infinity()};
  bool any_in = false, any_out = false;
  for (std::size_t i = 0; i < source_labels.size(); ++i) {
    if (source_labels[i] < shared) {
      any_in = true;
      out.lo = std::max(out.lo, result.discrepancy[i]);
    } else {
      any_out = true;
      out.hi = std::min(out.hi, result.discrepancy[i]);
    }
  }
  if (!any_in) throw InputError("threshold interval needs at least one inlier source point");
  if (!any_out) throw InputError("threshold interval needs at least one outlier source point");
  return out;
}

Proposition1Result proposition1_check(const MixtureSpec& spec, std::size_t trials,
                                      std::uint64_t seed, std::size_t reference_size,
                                      double standard_error) {
  spec.validate();
  if (reference_size == 0) throw InputError("reference sample must be non-empty");
  double gamma = 0.0;
  for (double v : spec.stds) gamma = std::max(gamma, v);

  Proposition1Result out;
  out.epsilon = 3.0 * (standard_error < 0.0 ? 0.02 * gamma : standard_error);
  out.max_excess = -std::numeric_limits<double>::infinity();

  const LabeledSample reference = sample_mixture(spec, reference_size, derive_seed(seed, {1}));
  const LabeledSample probes = sample_mixture(spec, 2 * trials, derive_seed(seed, {2}));
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const Vector x = probes.cloud.point(2 * trial).transpose();
    const Vector y = probes.cloud.point(2 * trial + 1).transpose();
    const double lhs = wasserstein_p(profile_of_location(reference.cloud, x),
                                     profile_of_location(reference.cloud, y), 1.0);
    double rhs = 0.0;
    for (std::size_t k = 0; k < spec.components(); ++k) {
      const Vector c = spec.centers.row(static_cast<Eigen::Index>(k)).transpose();
      rhs += spec.weights[k] * std::abs((x - c).norm() - (y - c).norm());
    }
    out.max_excess = std::max(out.max_excess, lhs - rhs);
    if (lhs > rhs + out.epsilon) out.holds = false;
  }
  return out;
}

}  // namespace profilematch
