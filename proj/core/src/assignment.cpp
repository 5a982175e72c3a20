#include "profilematch/assignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "profilematch/profile_matching.hpp"

namespace profilematch {

Permutation::Permutation(std::vector<std::size_t> mapping) : map_(std::move(mapping)) {
  std::vector<bool> seen(map_.size(), false);
  for (std::size_t v : map_) {
    if (v >= map_.size() || seen[v]) throw InputError("mapping is not a permutation");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(map_.size());
  for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = i;
  return Permutation(std::move(inv));
}

double agreement(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) throw DimensionError("permutations differ in size");
  if (a.size() == 0) return 1.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i] ? 1 : 0;
  return static_cast<double>(same) / static_cast<double>(a.size());
}

LapSolution solve_lap(const Matrix& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  if (n == 0) throw InputError("assignment problem is empty");
  if (static_cast<std::size_t>(cost.cols()) != n) {
    throw DimensionError("assignment cost matrix must be square, got " + std::to_string(n) + "x" +
                         std::to_string(cost.cols()));
  }
  if (!cost.allFinite()) throw InputError("assignment cost matrix has non-finite entries");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based Hungarian layout: column 0 is the virtual root of each augmentation.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> row_of(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  auto c = [&](std::size_t i, std::size_t j) {
    return cost(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
  };

  for (std::size_t i = 1; i <= n; ++i) {
    row_of[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = c(i0, j) - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> mapping(n);
  for (std::size_t j = 1; j <= n; ++j) mapping[row_of[j] - 1] = j - 1;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(mapping[i]));
  }
  return {Permutation(std::move(mapping)), total};
}

LapSolution assign_profiles(const DistanceMatrix& source, const DistanceMatrix& target,
                            const ExecutionOptions& exec) {
  if (source.size() != target.size()) {
    throw DimensionError("assignment needs equal sizes, got " + std::to_string(source.size()) +
                         " and " + std::to_string(target.size()));
  }
  return solve_lap(discrepancy_matrix(source, target, 1.0, exec).entries);
}

LapSolution assign_profiles(const PointCloud& source, const PointCloud& target,
                            const ExecutionOptions& exec) {
  if (source.size() != target.size()) {
    throw DimensionError("assignment needs equal sizes, got " + std::to_string(source.size()) +
                         " and " + std::to_string(target.size()));
  }
  return assign_profiles(pairwise_distances(source, exec), pairwise_distances(target, exec), exec);
}

LapSolution assign_ot_baseline(const PointCloud& source, const PointCloud& target) {
  if (source.size() != target.size()) {
    throw DimensionError("assignment needs equal sizes, got " + std::to_string(source.size()) +
                         " and " + std::to_string(target.size()));
  }
  if (source.dim() != target.dim()) {
    throw DimensionError("point dimensions differ: " + std::to_string(source.dim()) + " vs " +
                         std::to_string(target.dim()));
  }
  const auto n = static_cast<Eigen::Index>(source.size());
  Matrix cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      cost(i, j) = (source.points().row(i) - target.points().row(j)).squaredNorm();
  return solve_lap(cost);
}

}  // namespace profilematch
