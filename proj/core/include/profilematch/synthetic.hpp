#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "profilematch/assignment.hpp"
#include "profilematch/geometry.hpp"
#include "profilematch/types.hpp"

namespace profilematch {

// sum_k weights[k] N(centers.row(k), stds[k]^2 I_d)
struct MixtureSpec {
  Matrix centers;  // t x d
  std::vector<double> weights;
  std::vector<double> stds;

  std::size_t components() const { return static_cast<std::size_t>(centers.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(centers.cols()); }
  // Throws InputError unless weights sum to 1 within 1e-12, stds are all
  // positive or all zero, and sizes agree with the number of centers.
  void validate() const;
};

// mu and nu share their first K components exactly (weight, center, std).
struct PairedMixtures {
  MixtureSpec mu;
  MixtureSpec nu;
  std::size_t shared = 0;
};

struct LabeledSample {
  PointCloud cloud;
  std::vector<std::size_t> labels;  // component index of each point
};

// Categorical component draw, then center + std * N(0, I_d). Every point
// consumes the same random stream regardless of std, so samples at different
// noise levels from one seed are coupled.
LabeledSample sample_mixture(const MixtureSpec& spec, std::size_t n, std::uint64_t seed);

// Uniform weights, common std `sigma`, centers uniform in [0, center_scale]^d.
// Shared centers are drawn first, then mu's and nu's own components; any draw
// closer than 0.1 * center_scale to an earlier center is redrawn.
PairedMixtures make_paired_mixtures(std::size_t shared, std::size_t t, std::size_t s,
                                    std::size_t d, double center_scale, double sigma,
                                    std::uint64_t seed);

// Haar-distributed rotation (QR of a Gaussian matrix, sign-corrected, det +1).
Matrix random_rotation(std::size_t d, std::uint64_t seed);

// Givens rotation by `angle` in coordinates (0, 1), identity elsewhere.
Matrix make_two_coordinate_rotation(std::size_t d, double angle);

// x -> R x + b for every point.
PointCloud apply_rigid(const PointCloud& cloud, const Matrix& rotation, const Vector& shift);

struct CorrespondenceInstance {
  PointCloud source;  // X_i = theta_i + xi_i
  PointCloud target;  // Y_j = eta_j + zeta_j with eta_{pi*(i)} = R theta_i + b
};

CorrespondenceInstance noisy_correspondence_instance(const PointCloud& locations,
                                                     const Matrix& rotation, const Vector& shift,
                                                     const Permutation& truth, double sigma,
                                                     double tau, std::uint64_t seed);

// Uniformly random permutation of size n.
Permutation random_permutation(std::size_t n, std::uint64_t seed);

struct KMeansResult {
  std::vector<std::size_t> labels;
  Matrix centers;
  std::size_t iterations = 0;
};

// Lloyd's algorithm from k-means++ seeding. Stops at an assignment fixpoint or
// after max_iters sweeps. An emptied cluster is re-seeded at the point farthest
// from its current center.
KMeansResult kmeans(const PointCloud& cloud, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters = 100);

}  // namespace profilematch
