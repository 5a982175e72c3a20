#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "profilematch/geometry.hpp"
#include "profilematch/profile_matching.hpp"
#include "profilematch/synthetic.hpp"

namespace profilematch {

// Wbar(alpha, beta): W_1 between the weighted center profiles
// sum_k p_k delta_{|theta_alpha - theta_k|} and sum_k q_k delta_{|eta_beta - eta_k|}.
double center_profile_distance(const PairedMixtures& pm, std::size_t alpha, std::size_t beta);

// All t x s values of center_profile_distance.
Matrix center_profile_distances(const PairedMixtures& pm);

// Separation margins and the sample-size/noise right-hand side of the outlier
// robustness guarantee for a paired mixture.
struct SeparationReport {
  double wbar_min_offdiag = 0.0;  // min over alpha < K, beta != alpha of Wbar
  double wbar_max_diag = 0.0;     // max over alpha < K of Wbar(alpha, alpha)
  double omega = 0.0;             // wbar_min_offdiag - R (1 - sum_{k<K} p_k)
  double omega_o = 0.0;           // min_alpha (min_{beta != alpha} Wbar - Wbar(alpha, alpha))
  double omega_prime = 0.0;       // also separates outlier rows; <= omega
  double rhs = 0.0;               // max of the three terms below
  double rhs_noise = 0.0;         // 16 Gamma sqrt(d)
  double rhs_sampling = 0.0;      // 8 R sqrt((log K + log(t+s-2) + log(4/delta)) / (2 (n ^ m)))
  double rhs_deviation = 0.0;     // 32 Gamma sqrt(2 log(4 (n v m)^2 / delta))
  double R = 0.0;                 // diameter of all centers of mu and nu
  double Gamma = 0.0;             // largest component std

  bool guarantees_matching() const { return omega >= rhs; }
};

// Throws InputError unless delta is in (0, 1), 1 <= K and the first K
// components of mu and nu agree in weight, center and std (within 1e-12).
SeparationReport separation_report(const PairedMixtures& pm, std::size_t n, std::size_t m,
                                   double delta);

// (1 - sum_{k<K} p_k) * max_{a, b} |theta_a - eta_b|, the bound on every
// diagonal Wbar(alpha, alpha), alpha < K. Same shared-component check as
// separation_report.
double lemma1_bound(const PairedMixtures& pm);
// min over alpha < K of lemma1_bound - Wbar(alpha, alpha); >= 0 when the bound holds.
double lemma1_margin(const PairedMixtures& pm);
// True iff every diagonal Wbar(alpha, alpha) <= lemma1_bound + 1e-9.
bool lemma1_bound_check(const PairedMixtures& pm);

// (z_t - z_1) * max_j |sum_{k<=j} (p_k - q_k)| for weights on a shared sorted support.
double lemma2_bound(std::span<const double> support, std::span<const double> p,
                    std::span<const double> q);

// Phi: minimum W_1 between the empirical profiles of two distinct locations.
double phi(const PointCloud& locations);
double phi(const DistanceMatrix& dmat);

// Largest admissible sigma^2 v tau^2 for exact assignment recovery:
// Phi^2 / (64 (d v 8 log(2 n^2 / delta))). Throws InputError if Phi = 0.
double theorem2_noise_bound(const PointCloud& locations, double delta);

// Fraction of sources with label < K whose match carries the same label.
// Returns 1 when no source has label < K.
double matching_accuracy(const MatchResult& result, std::span<const std::size_t> source_labels,
                         std::span<const std::size_t> target_labels, std::size_t shared);
bool perfect_matching(const MatchResult& result, std::span<const std::size_t> source_labels,
                      std::span<const std::size_t> target_labels, std::size_t shared);

// lo = largest matched discrepancy among inlier sources, hi = smallest among
// outlier sources. With lo < hi, any threshold in (lo, hi] recovers exactly the
// inlier set. lo >= hi is returned as is.
struct ThresholdInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool separates() const { return lo < hi; }
};
ThresholdInterval inlier_threshold_interval(const MatchResult& result,
                                            std::span<const std::size_t> source_labels,
                                            std::size_t shared);

// Checks W_1(mu_x, mu_x') <= sum_k p_k | |x - theta_k| - |x' - theta_k| | + eps on
// random pairs (x, x') drawn from the mixture. Population profiles are replaced
// by profiles against one shared Monte-Carlo sample of `reference_size` points;
// eps = 3 * standard_error, with standard_error < 0 meaning 0.02 * Gamma.
struct Proposition1Result {
  bool holds = true;
  double max_excess = 0.0;  // largest LHS - RHS seen (may be negative)
  double epsilon = 0.0;
};
Proposition1Result proposition1_check(const MixtureSpec& spec, std::size_t trials,
                                      std::uint64_t seed, std::size_t reference_size = 100000,
                                      double standard_error = -1.0);

}  // namespace profilematch
