#pragma once

#include <cstddef>
#include <vector>

#include "profilematch/geometry.hpp"
#include "profilematch/types.hpp"

namespace profilematch {

// A bijection on {0, ..., n-1}; source i is assigned target (*this)[i].
class Permutation {
 public:
  Permutation() = default;
  // Throws InputError unless `mapping` hits every index exactly once.
  explicit Permutation(std::vector<std::size_t> mapping);
  static Permutation identity(std::size_t n);

  std::size_t size() const { return map_.size(); }
  std::size_t operator[](std::size_t i) const { return map_[i]; }
  const std::vector<std::size_t>& mapping() const { return map_; }
  Permutation inverse() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> map_;
};

struct LapSolution {
  Permutation assignment;
  double total_cost = 0.0;
};

// Exact minimum-cost perfect matching on a square cost matrix (shortest
// augmenting paths with row/column potentials, O(n^3)). Throws DimensionError
// if not square, InputError if empty or non-finite.
LapSolution solve_lap(const Matrix& cost);

// argmin over permutations of sum_i W_1(profile_i^X, profile_pi(i)^Y).
LapSolution assign_profiles(const DistanceMatrix& source, const DistanceMatrix& target,
                            const ExecutionOptions& exec = {});
LapSolution assign_profiles(const PointCloud& source, const PointCloud& target,
                            const ExecutionOptions& exec = {});

// argmin over permutations of sum_i ||X_i - Y_pi(i)||^2 (not rigid-invariant).
LapSolution assign_ot_baseline(const PointCloud& source, const PointCloud& target);

// Fraction of indices where the two permutations agree.
double agreement(const Permutation& a, const Permutation& b);

}  // namespace profilematch
