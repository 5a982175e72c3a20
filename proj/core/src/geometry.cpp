#include "profilematch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "profilematch/parallel.hpp"

namespace profilematch {

PointCloud::PointCloud(Matrix points) : points_(std::move(points)) {
  if (points_.rows() == 0 || points_.cols() == 0) {
    throw InputError("point cloud must have at least one point and one coordinate");
  }
  if (!points_.allFinite()) throw InputError("point cloud has non-finite coordinates");
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InputError("point cloud must have at least one point");
  const std::size_t d = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) {
      throw DimensionError("point " + std::to_string(i) + " has dimension " +
                           std::to_string(rows[i].size()) + ", expected " + std::to_string(d));
    }
    for (std::size_t k = 0; k < d; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return PointCloud(std::move(m));
}

namespace {

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

DistanceMatrix::DistanceMatrix(Matrix entries, Validation validation)
    : entries_(std::move(entries)) {
  const Eigen::Index n = entries_.rows();
  if (n == 0) throw InputError("distance matrix is empty");
  if (entries_.cols() != n) {
    throw DimensionError("distance matrix is " + std::to_string(n) + "x" +
                         std::to_string(entries_.cols()) + ", expected square");
  }
  if (!entries_.allFinite()) throw InputError("distance matrix has non-finite entries");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (entries_(i, i) != 0.0) throw InputError("distance matrix diagonal must be zero");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (entries_(i, j) < 0.0) throw InputError("distance matrix has negative entries");
      if (j > i && !close_rel(entries_(i, j), entries_(j, i), 1e-12)) {
        throw InputError("distance matrix is not symmetric");
      }
    }
  }
  if (validation == Validation::full) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
          const double via = entries_(i, k) + entries_(k, j);
          if (entries_(i, j) > via + 1e-9 * std::max(1.0, via)) {
            throw InputError("distance matrix violates the triangle inequality");
          }
        }
  }
}

DistanceProfile DistanceProfile::uniform(std::vector<double> values) {
  if (values.empty()) throw InputError("distance profile must have at least one atom");
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("distance profile has non-finite atoms");
  }
  std::sort(values.begin(), values.end());
  DistanceProfile p;
  p.uniform_weight_ = 1.0 / static_cast<double>(values.size());
  p.mean_ = std::accumulate(values.begin(), values.end(), 0.0) * p.uniform_weight_;
  p.values_ = std::move(values);
  return p;
}

DistanceProfile DistanceProfile::weighted(std::vector<double> values,
                                          std::vector<double> weights) {
  if (values.empty()) throw InputError("distance profile must have at least one atom");
  if (values.size() != weights.size()) {
    throw DimensionError("distance profile values and weights differ in length");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) throw InputError("distance profile has non-finite atoms");
    if (!std::isfinite(weights[k]) || weights[k] < 0.0) {
      throw InputError("distance profile weights must be finite and nonnegative");
    }
    total += weights[k];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InputError("distance profile weights must sum to 1");
  }

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  DistanceProfile p;
  p.values_.reserve(values.size());
  p.weights_.reserve(values.size());
  for (std::size_t k : order) {
    p.values_.push_back(values[k]);
    p.weights_.push_back(weights[k]);
    p.mean_ += values[k] * weights[k];
  }
  return p;
}

std::vector<double> DistanceProfile::weights() const {
  if (!weights_.empty()) return weights_;
  return std::vector<double>(values_.size(), uniform_weight_);
}

DistanceMatrix pairwise_distances(const PointCloud& cloud, const ExecutionOptions& exec) {
  const auto n = static_cast<Eigen::Index>(cloud.size());
  const Matrix& pts = cloud.points();
  Matrix out = Matrix::Zero(n, n);
  // Row i fills its upper part, then mirrors; each entry is computed once, from
  // the lower index, so symmetry is exact.
  parallel_for(static_cast<std::size_t>(n), exec.threads, [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out(i, j) = (pts.row(i) - pts.row(j)).norm();
    }
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) out(j, i) = out(i, j);
  return DistanceMatrix(std::move(out));
}

DistanceProfile distance_profile(const DistanceMatrix& dmat, std::size_t i) {
  if (i >= dmat.size()) {
    throw std::out_of_range("profile index " + std::to_string(i) + " out of range for " +
                            std::to_string(dmat.size()) + " points");
  }
  auto row = dmat.row(i);
  return DistanceProfile::uniform(std::vector<double>(row.begin(), row.end()));
}

std::vector<DistanceProfile> all_profiles(const DistanceMatrix& dmat,
                                          const ExecutionOptions& exec) {
  std::vector<DistanceProfile> out(dmat.size());
  parallel_for(dmat.size(), exec.threads,
               [&](std::size_t i) { out[i] = distance_profile(dmat, i); });
  return out;
}

DistanceProfile profile_of_location(const PointCloud& cloud, const Eigen::Ref<const Vector>& x) {
  if (static_cast<std::size_t>(x.size()) != cloud.dim()) {
    throw DimensionError("location dimension does not match the cloud");
  }
  std::vector<double> values(cloud.size());
  for (std::size_t l = 0; l < cloud.size(); ++l) {
    values[l] = (cloud.point(l).transpose() - x).norm();
  }
  return DistanceProfile::uniform(std::move(values));
}

}  // namespace profilematch
