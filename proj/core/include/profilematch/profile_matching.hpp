#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "profilematch/geometry.hpp"

namespace profilematch {

inline constexpr double kNoThreshold = std::numeric_limits<double>::infinity();

// entries(i, j) = W_order between profile i of the source and profile j of the target.
struct DiscrepancyMatrix {
  Matrix entries;
  double order = 1.0;

  std::size_t rows() const { return static_cast<std::size_t>(entries.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(entries.cols()); }
};

// pi maps every source index to a target index (not necessarily injective).
// discrepancy[i] = D(i, pi[i]); inliers = { i : discrepancy[i] < threshold },
// ascending.
struct MatchResult {
  std::vector<std::size_t> pi;
  std::vector<double> discrepancy;
  std::vector<std::size_t> inliers;
  double threshold = kNoThreshold;

  bool is_inlier(std::size_t i) const { return discrepancy[i] < threshold; }
};

DiscrepancyMatrix discrepancy_matrix(const std::vector<DistanceProfile>& source,
                                     const std::vector<DistanceProfile>& target,
                                     double order = 1.0, const ExecutionOptions& exec = {});
DiscrepancyMatrix discrepancy_matrix(const DistanceMatrix& source, const DistanceMatrix& target,
                                     double order = 1.0, const ExecutionOptions& exec = {});

// Per-row argmin, then the strict "< rho" inlier rule. Entries within a
// relative 1e-12 of the row minimum are ties and the smallest index wins;
// discrepancy[i] is the chosen entry. rho must be > 0 (infinity means no
// threshold).
MatchResult match(const DiscrepancyMatrix& d, double rho = kNoThreshold);

// Same result as match(discrepancy_matrix(source, target, order), rho) without
// materializing the matrix: candidates are visited in order of the profile-mean
// lower bound |mean_i - mean_j| <= W_1 <= W_order and skipped once the bound
// exceeds the best value found.
MatchResult match_profiles(const std::vector<DistanceProfile>& source,
                           const std::vector<DistanceProfile>& target, double order = 1.0,
                           double rho = kNoThreshold, const ExecutionOptions& exec = {});

MatchResult match_distances(const DistanceMatrix& source, const DistanceMatrix& target,
                            double order = 1.0, double rho = kNoThreshold,
                            const ExecutionOptions& exec = {});

MatchResult match_clouds(const PointCloud& source, const PointCloud& target, double order = 1.0,
                         double rho = kNoThreshold, const ExecutionOptions& exec = {});

}  // namespace profilematch
