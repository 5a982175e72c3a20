#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "profilematch/types.hpp"

namespace profilematch {

// n points in R^d, stored one point per row.
class PointCloud {
 public:
  PointCloud() = default;
  // Throws InputError on an empty matrix or non-finite coordinates.
  explicit PointCloud(Matrix points);
  static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
  const Matrix& points() const { return points_; }
  auto point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)); }

 private:
  Matrix points_;
};

enum class Validation {
  basic,  // square, finite, nonnegative, zero diagonal, symmetric
  full,   // basic + triangle inequality over all triples (O(n^3))
};

// Symmetric n x n matrix of pairwise distances with zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(Matrix entries, Validation validation = Validation::basic);

  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  std::span<const double> row(std::size_t i) const {
    return {entries_.data() + i * size(), size()};
  }

 private:
  Matrix entries_;
};

// A discrete probability measure on the real line: sorted atoms with weights.
// Empirical distance profiles are uniform (weight 1/n each); uniform profiles
// do not store a weight vector.
class DistanceProfile {
 public:
  DistanceProfile() = default;

  // Uniform weights 1/n. Values are sorted; throws on empty or non-finite input.
  static DistanceProfile uniform(std::vector<double> values);
  // Arbitrary nonnegative weights summing to 1 within 1e-12. Atoms are sorted
  // by value; duplicates are kept.
  static DistanceProfile weighted(std::vector<double> values, std::vector<double> weights);

  std::size_t size() const { return values_.size(); }
  bool is_uniform() const { return weights_.empty(); }
  std::span<const double> values() const { return values_; }
  double weight(std::size_t k) const { return weights_.empty() ? uniform_weight_ : weights_[k]; }
  std::vector<double> weights() const;
  double mean() const { return mean_; }

 private:
  std::vector<double> values_;
  std::vector<double> weights_;
  double uniform_weight_ = 0.0;
  double mean_ = 0.0;
};

// Euclidean distances between all pairs of points. Rows are computed
// independently; the result is bit-identical for any thread count.
DistanceMatrix pairwise_distances(const PointCloud& cloud, const ExecutionOptions& exec = {});

// Empirical profile of point i: the n distances from row i, self-distance 0 included.
DistanceProfile distance_profile(const DistanceMatrix& dmat, std::size_t i);

std::vector<DistanceProfile> all_profiles(const DistanceMatrix& dmat,
                                          const ExecutionOptions& exec = {});

// Profile of an arbitrary location x against every point of `cloud`.
DistanceProfile profile_of_location(const PointCloud& cloud, const Eigen::Ref<const Vector>& x);

}  // namespace profilematch
