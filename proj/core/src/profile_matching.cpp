#include "profilematch/profile_matching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "profilematch/parallel.hpp"
#include "profilematch/wasserstein1d.hpp"

namespace profilematch {
namespace {

void check_order(double order) {
  if (!(order >= 1.0) || !std::isfinite(order)) {
    throw InputError("Wasserstein order must be a finite real >= 1");
  }
}

void check_threshold(double rho) {
  if (!(rho > 0.0)) throw InputError("threshold must be > 0 (or infinity)");
}

// Values within this relative distance of the row minimum count as ties, so a
// rounding-level wobble (e.g. from a rigid motion of the input) cannot move pi.
constexpr double kTieTolerance = 1e-12;

double tie_limit(double best) { return best * (1.0 + kTieTolerance); }

void collect_inliers(MatchResult& r) {
  r.inliers.clear();
  for (std::size_t i = 0; i < r.pi.size(); ++i) {
    if (r.discrepancy[i] < r.threshold) r.inliers.push_back(i);
  }
}

}  // namespace

DiscrepancyMatrix discrepancy_matrix(const std::vector<DistanceProfile>& source,
                                     const std::vector<DistanceProfile>& target, double order,
                                     const ExecutionOptions& exec) {
  check_order(order);
  if (source.empty() || target.empty()) throw InputError("discrepancy matrix of an empty set");
  DiscrepancyMatrix d{Matrix(static_cast<Eigen::Index>(source.size()),
                             static_cast<Eigen::Index>(target.size())),
                      order};
  parallel_for(source.size(), exec.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < target.size(); ++j) {
      d.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          wasserstein_p(source[i], target[j], order);
    }
  });
  return d;
}

DiscrepancyMatrix discrepancy_matrix(const DistanceMatrix& source, const DistanceMatrix& target,
                                     double order, const ExecutionOptions& exec) {
  return discrepancy_matrix(all_profiles(source, exec), all_profiles(target, exec), order, exec);
}

MatchResult match(const DiscrepancyMatrix& d, double rho) {
  check_threshold(rho);
  if (d.rows() == 0 || d.cols() == 0) throw InputError("cannot match an empty discrepancy matrix");
  MatchResult r;
  r.threshold = rho;
  r.pi.resize(d.rows());
  r.discrepancy.resize(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const auto row = d.entries.row(static_cast<Eigen::Index>(i));
    const double limit = tie_limit(row.minCoeff());
    std::size_t best = 0;
    while (row(static_cast<Eigen::Index>(best)) > limit) ++best;
    r.pi[i] = best;
    r.discrepancy[i] = row(static_cast<Eigen::Index>(best));
  }
  collect_inliers(r);
  return r;
}

MatchResult match_profiles(const std::vector<DistanceProfile>& source,
                           const std::vector<DistanceProfile>& target, double order, double rho,
                           const ExecutionOptions& exec) {
  check_order(order);
  check_threshold(rho);
  if (source.empty() || target.empty()) throw InputError("cannot match an empty profile set");

  // Targets sorted by mean so each row can walk outward from its own mean.
  std::vector<std::size_t> by_mean(target.size());
  std::iota(by_mean.begin(), by_mean.end(), std::size_t{0});
  std::stable_sort(by_mean.begin(), by_mean.end(), [&](std::size_t a, std::size_t b) {
    return target[a].mean() < target[b].mean();
  });
  std::vector<double> sorted_means(target.size());
  double scale = 0.0;
  for (std::size_t k = 0; k < by_mean.size(); ++k) {
    sorted_means[k] = target[by_mean[k]].mean();
    scale = std::max(scale, std::abs(sorted_means[k]));
  }
  for (const auto& p : source) scale = std::max(scale, std::abs(p.mean()));
  // Rounding slack on the bound so pruning never drops a candidate the full
  // scan would have picked.
  const double slack = 1e-9 * std::max(1.0, scale);
  // (1 + tol)^order on the pow scale, with room to spare.
  const double cutoff_factor = 1.0 + std::max(1e-9, 4.0 * order * kTieTolerance);

  MatchResult r;
  r.threshold = rho;
  r.pi.resize(source.size());
  r.discrepancy.resize(source.size());
  parallel_for(source.size(), exec.threads, [&](std::size_t i) {
    const double mu = source[i].mean();
    auto hi = static_cast<std::ptrdiff_t>(
        std::lower_bound(sorted_means.begin(), sorted_means.end(), mu) - sorted_means.begin());
    auto lo = hi - 1;
    const auto count = static_cast<std::ptrdiff_t>(sorted_means.size());
    double best = std::numeric_limits<double>::infinity();
    double best_pow = best;
    // Everything that might end up inside the tie band of the final minimum.
    std::vector<std::pair<std::size_t, double>> seen;
    auto consider = [&](std::size_t j) {
      // Anything above the cutoff cannot beat or tie the current best.
      const double cutoff = std::isinf(best) ? best : best_pow * cutoff_factor + 1e-300;
      const double v = wasserstein_p_pow_bounded(source[i], target[j], order, cutoff);
      if (v > cutoff) return;
      const double w = wasserstein_root(v, order);
      seen.emplace_back(j, w);
      if (w < best) {
        best = w;
        best_pow = v;
      }
    };
    while (lo >= 0 || hi < count) {
      const double gap_lo = lo >= 0 ? mu - sorted_means[static_cast<std::size_t>(lo)]
                                    : std::numeric_limits<double>::infinity();
      const double gap_hi = hi < count ? sorted_means[static_cast<std::size_t>(hi)] - mu
                                       : std::numeric_limits<double>::infinity();
      const bool take_lo = gap_lo <= gap_hi;
      const double gap = take_lo ? gap_lo : gap_hi;
      if (gap - slack > tie_limit(best)) break;
      if (take_lo) {
        consider(by_mean[static_cast<std::size_t>(lo--)]);
      } else {
        consider(by_mean[static_cast<std::size_t>(hi++)]);
      }
    }
    const double limit = tie_limit(best);
    std::size_t best_j = target.size();
    double best_w = best;
    for (const auto& [j, w] : seen) {
      if (w <= limit && j < best_j) {
        best_j = j;
        best_w = w;
      }
    }
    r.pi[i] = best_j;
    r.discrepancy[i] = best_w;
  });
  collect_inliers(r);
  return r;
}

MatchResult match_distances(const DistanceMatrix& source, const DistanceMatrix& target,
                            double order, double rho, const ExecutionOptions& exec) {
  return match_profiles(all_profiles(source, exec), all_profiles(target, exec), order, rho, exec);
}

MatchResult match_clouds(const PointCloud& source, const PointCloud& target, double order,
                         double rho, const ExecutionOptions& exec) {
  return match_distances(pairwise_distances(source, exec), pairwise_distances(target, exec), order,
                         rho, exec);
}

}  // namespace profilematch
