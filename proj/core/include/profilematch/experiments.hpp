#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "profilematch/synthetic.hpp"
#include "profilematch/types.hpp"

namespace profilematch {

enum class Method { profile, assignment, ot_baseline };

std::string_view method_name(Method m);
// Throws InputError on an unknown name.
Method parse_method(std::string_view name);

struct ExperimentRecord {
  Method method = Method::profile;
  double sigma = 0.0;
  std::size_t replicate = 0;
  bool perfect = false;
  double accuracy = 0.0;
};

// Called once per record, in (sigma, replicate, method) order, as soon as a
// sigma level is finished.
using RecordSink = std::function<void(const ExperimentRecord&)>;

struct MixtureExperimentConfig {
  std::size_t d = 3;
  std::size_t K = 10;
  std::size_t t = 10;
  std::size_t s = 10;
  std::size_t n = 1000;
  std::size_t m = 1000;
  std::vector<double> sigmas;
  std::size_t replicates = 100;
  std::uint64_t seed = 0;
  double center_scale = 1.0;
  double order = 1.0;
  double threshold = std::numeric_limits<double>::infinity();

  void validate() const;
};

// Centers are drawn once from the seed and shared by every sigma and replicate;
// only the stds change with sigma.
PairedMixtures mixture_experiment_model(const MixtureExperimentConfig& config, double sigma);

// Per sigma and replicate: sample X ~ mu (n points), Y ~ nu (m points), run
// profile matching, record perfect matching and accuracy over the K shared
// components. Replicate r uses the same sample seeds at every sigma.
std::vector<ExperimentRecord> run_mixture_experiment(const MixtureExperimentConfig& config,
                                                     const ExecutionOptions& exec = {},
                                                     const RecordSink& sink = {});

enum class RotationKind { two_coord, full };

struct NoiseExperimentConfig {
  std::size_t d = 10;
  std::size_t n = 100;
  std::vector<double> sigmas;
  RotationKind rotation = RotationKind::two_coord;
  double angle = std::numbers::pi / 6.0;  // two_coord only
  std::size_t replicates = 100;
  std::uint64_t seed = 0;
  double location_scale = 1.0;

  void validate() const;
};

// theta_i ~ N(0, location_scale^2 I_d), drawn once from the seed.
PointCloud noise_experiment_locations(const NoiseExperimentConfig& config);

// Per sigma and replicate: draw the rotation (full) or use the fixed angle
// (two_coord), a Gaussian shift and a uniform permutation, build the noisy
// instance with sigma = tau, then record exact recovery for the profile
// assignment and the squared-Euclidean baseline.
std::vector<ExperimentRecord> run_noise_stability_experiment(const NoiseExperimentConfig& config,
                                                             const ExecutionOptions& exec = {},
                                                             const RecordSink& sink = {});

struct SummaryRow {
  Method method = Method::profile;
  double sigma = 0.0;
  std::size_t replicates = 0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  double recovery_frequency = 0.0;
  double recovery_std = 0.0;
};

// Grouped by (method, sigma) in order of first appearance. Std is the sample
// standard deviation (0 for one replicate).
std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records);

// Convergence of sampled distance profiles towards a large reference sample.
// TLB probe: OT between `reference_rows` reference points, each carrying its
// profile against the whole reference compressed to `profile_atoms` quantile
// block means, and an independent n-sample. Sup-deviation probe: a random
// n-subset of the reference, profiles against the subset vs the reference.
struct ScalingProbeConfig {
  MixtureSpec spec;
  std::size_t reference_size = 4000;
  std::size_t reference_rows = 800;   // 0 = all
  std::size_t profile_atoms = 800;    // 0 = no compression; must divide reference_size
  std::vector<std::size_t> sizes;     // sup deviation for every size
  std::size_t tlb_max_size = 400;     // TLB only for sizes up to this
  std::size_t replicates = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ScalingPoint {
  std::size_t n = 0;
  bool has_tlb = false;
  double tlb_mean = 0.0;
  double tlb_se = 0.0;
  double sup_mean = 0.0;
  double sup_se = 0.0;
};

// Uniform profile whose k-th atom is the mean of the k-th block of
// size/atoms consecutive sorted values.
DistanceProfile compress_profile(const DistanceProfile& profile, std::size_t atoms);

// max over i in subset of W_1(profile i of the reference, distances from
// point i to the subset points).
double sup_profile_deviation(const DistanceMatrix& reference,
                             const std::vector<DistanceProfile>& reference_profiles,
                             const std::vector<std::size_t>& subset);

std::vector<ScalingPoint> run_scaling_probe(const ScalingProbeConfig& config,
                                            const ExecutionOptions& exec = {});

// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace profilematch
