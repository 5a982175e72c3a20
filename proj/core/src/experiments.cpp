#include "profilematch/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "profilematch/assignment.hpp"
#include "profilematch/gw_tlb.hpp"
#include "profilematch/parallel.hpp"
#include "profilematch/profile_matching.hpp"
#include "profilematch/rng.hpp"
#include "profilematch/theory.hpp"
#include "profilematch/wasserstein1d.hpp"

namespace profilematch {
namespace {

// stream tags for derive_seed
enum : std::uint64_t {
  kCenters = 1,
  kSampleX,
  kSampleY,
  kLocations,
  kRotation,
  kShift,
  kTruth,
  kNoise,
  kReference,
  kProbe,
  kSubset,
};

void check_sigmas(const std::vector<double>& sigmas) {
  if (sigmas.empty()) throw InputError("sigma grid is empty");
  for (double s : sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw InputError("sigma values must be finite and >= 0");
  }
}

// Runs `replicates` jobs per sigma level, keeps output in replicate order and
// flushes each level to the sink before starting the next.
template <class Job>
std::vector<ExperimentRecord> sweep(const std::vector<double>& sigmas, std::size_t replicates,
                                    const ExecutionOptions& exec, const RecordSink& sink,
                                    Job job) {
  std::vector<ExperimentRecord> all;
  for (double sigma : sigmas) {
    std::vector<std::vector<ExperimentRecord>> slots(replicates);
    parallel_for(replicates, exec.threads, [&](std::size_t r) { slots[r] = job(sigma, r); });
    for (auto& slot : slots)
      for (auto& rec : slot) {
        if (sink) sink(rec);
        all.push_back(rec);
      }
  }
  return all;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::profile: return "profile";
    case Method::assignment: return "assignment";
    case Method::ot_baseline: return "ot_baseline";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "profile") return Method::profile;
  if (name == "assignment") return Method::assignment;
  if (name == "ot_baseline") return Method::ot_baseline;
  throw InputError("unknown method '" + std::string(name) + "'");
}

void MixtureExperimentConfig::validate() const {
  if (d == 0) throw InputError("d must be >= 1");
  if (K == 0 || K > std::min(t, s)) throw InputError("need 1 <= K <= min(t, s)");
  if (n == 0 || m == 0) throw InputError("sample sizes must be >= 1");
  if (replicates == 0) throw InputError("replicates must be >= 1");
  if (!(center_scale > 0.0) || !std::isfinite(center_scale)) {
    throw InputError("center_scale must be positive");
  }
  if (!(order >= 1.0) || !std::isfinite(order)) throw InputError("order must be finite and >= 1");
  if (!(threshold > 0.0)) throw InputError("threshold must be > 0");
  check_sigmas(sigmas);
}

PairedMixtures mixture_experiment_model(const MixtureExperimentConfig& config, double sigma) {
  return make_paired_mixtures(config.K, config.t, config.s, config.d, config.center_scale, sigma,
                              derive_seed(config.seed, {kCenters}));
}

std::vector<ExperimentRecord> run_mixture_experiment(const MixtureExperimentConfig& config,
                                                     const ExecutionOptions& exec,
                                                     const RecordSink& sink) {
  config.validate();
  return sweep(config.sigmas, config.replicates, exec, sink, [&](double sigma, std::size_t r) {
    const PairedMixtures pm = mixture_experiment_model(config, sigma);
    const LabeledSample x = sample_mixture(pm.mu, config.n, derive_seed(config.seed, {kSampleX, r}));
    const LabeledSample y = sample_mixture(pm.nu, config.m, derive_seed(config.seed, {kSampleY, r}));
    const MatchResult res = match_clouds(x.cloud, y.cloud, config.order, config.threshold);
    const double acc = matching_accuracy(res, x.labels, y.labels, config.K);
    return std::vector<ExperimentRecord>{{Method::profile, sigma, r, acc == 1.0, acc}};
  });
}

void NoiseExperimentConfig::validate() const {
  if (d < 2 && rotation == RotationKind::two_coord) {
    throw InputError("two-coordinate rotation needs d >= 2");
  }
  if (d == 0) throw InputError("d must be >= 1");
  if (n < 2) throw InputError("n must be >= 2");
  if (replicates == 0) throw InputError("replicates must be >= 1");
  if (!std::isfinite(angle)) throw InputError("angle must be finite");
  if (!(location_scale > 0.0) || !std::isfinite(location_scale)) {
    throw InputError("location_scale must be positive");
  }
  check_sigmas(sigmas);
}

PointCloud noise_experiment_locations(const NoiseExperimentConfig& config) {
  Rng rng(derive_seed(config.seed, {kLocations}));
  std::normal_distribution<double> normal;
  Matrix theta(static_cast<Eigen::Index>(config.n), static_cast<Eigen::Index>(config.d));
  for (Eigen::Index i = 0; i < theta.rows(); ++i)
    for (Eigen::Index k = 0; k < theta.cols(); ++k) theta(i, k) = config.location_scale * normal(rng);
  return PointCloud(std::move(theta));
}

std::vector<ExperimentRecord> run_noise_stability_experiment(const NoiseExperimentConfig& config,
                                                             const ExecutionOptions& exec,
                                                             const RecordSink& sink) {
  config.validate();
  const PointCloud theta = noise_experiment_locations(config);
  const Matrix fixed_rotation = config.rotation == RotationKind::two_coord
                                    ? make_two_coordinate_rotation(config.d, config.angle)
                                    : Matrix();
  return sweep(config.sigmas, config.replicates, exec, sink, [&](double sigma, std::size_t r) {
    const Matrix rotation = config.rotation == RotationKind::two_coord
                                ? fixed_rotation
                                : random_rotation(config.d, derive_seed(config.seed, {kRotation, r}));
    Rng rng(derive_seed(config.seed, {kShift, r}));
    std::normal_distribution<double> normal;
    Vector shift(static_cast<Eigen::Index>(config.d));
    for (Eigen::Index k = 0; k < shift.size(); ++k) shift(k) = config.location_scale * normal(rng);
    const Permutation truth = random_permutation(config.n, derive_seed(config.seed, {kTruth, r}));
    const CorrespondenceInstance inst = noisy_correspondence_instance(
        theta, rotation, shift, truth, sigma, sigma, derive_seed(config.seed, {kNoise, r}));

    const LapSolution prof = assign_profiles(inst.source, inst.target);
    const LapSolution base = assign_ot_baseline(inst.source, inst.target);
    return std::vector<ExperimentRecord>{
        {Method::assignment, sigma, r, prof.assignment == truth, agreement(prof.assignment, truth)},
        {Method::ot_baseline, sigma, r, base.assignment == truth, agreement(base.assignment, truth)},
    };
  });
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records) {
  std::vector<std::pair<Method, double>> keys;
  std::map<std::pair<Method, double>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& rec : records) {
    const auto key = std::make_pair(rec.method, rec.sigma);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) keys.push_back(key);
    it->second.first.push_back(rec.accuracy);
    it->second.second.push_back(rec.perfect ? 1.0 : 0.0);
  }
  std::vector<SummaryRow> out;
  for (const auto& key : keys) {
    const auto& [acc, rec] = groups.at(key);
    out.push_back({key.first, key.second, acc.size(), mean_of(acc), sample_std(acc), mean_of(rec),
                   sample_std(rec)});
  }
  return out;
}

void ScalingProbeConfig::validate() const {
  spec.validate();
  if (reference_size < 2) throw InputError("reference sample needs at least two points");
  if (profile_atoms != 0 && reference_size % profile_atoms != 0) {
    throw InputError("profile_atoms must divide reference_size");
  }
  if (reference_rows > reference_size) throw InputError("reference_rows exceeds reference_size");
  if (sizes.empty()) throw InputError("no sample sizes given");
  for (std::size_t n : sizes) {
    if (n < 2 || n > reference_size) throw InputError("sample sizes must lie in [2, reference_size]");
  }
  if (replicates == 0) throw InputError("replicates must be >= 1");
}

DistanceProfile compress_profile(const DistanceProfile& profile, std::size_t atoms) {
  if (!profile.is_uniform()) throw InputError("only uniform profiles can be compressed");
  const std::size_t n = profile.size();
  if (atoms == 0 || n % atoms != 0) throw InputError("atom count must divide the profile size");
  const std::size_t block = n / atoms;
  const auto v = profile.values();
  std::vector<double> means(atoms);
  for (std::size_t k = 0; k < atoms; ++k) {
    double sum = 0.0;
    for (std::size_t b = 0; b < block; ++b) sum += v[k * block + b];
    means[k] = sum / static_cast<double>(block);
  }
  return DistanceProfile::uniform(std::move(means));
}

double sup_profile_deviation(const DistanceMatrix& reference,
                             const std::vector<DistanceProfile>& reference_profiles,
                             const std::vector<std::size_t>& subset) {
  if (subset.empty()) throw InputError("subset is empty");
  double worst = 0.0;
  std::vector<double> row(subset.size());
  for (std::size_t i : subset) {
    for (std::size_t k = 0; k < subset.size(); ++k) row[k] = reference(i, subset[k]);
    worst = std::max(worst, wasserstein_p(reference_profiles.at(i), DistanceProfile::uniform(row), 1.0));
  }
  return worst;
}

std::vector<ScalingPoint> run_scaling_probe(const ScalingProbeConfig& config,
                                            const ExecutionOptions& exec) {
  config.validate();
  const LabeledSample ref =
      sample_mixture(config.spec, config.reference_size, derive_seed(config.seed, {kReference}));
  const DistanceMatrix ref_d = pairwise_distances(ref.cloud, exec);
  const std::vector<DistanceProfile> ref_profiles = all_profiles(ref_d, exec);

  const std::size_t rows = config.reference_rows == 0 ? config.reference_size : config.reference_rows;
  std::vector<DistanceProfile> tlb_rows;
  tlb_rows.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    tlb_rows.push_back(config.profile_atoms == 0 ? ref_profiles[i]
                                                 : compress_profile(ref_profiles[i], config.profile_atoms));
  }

  const std::size_t R = config.replicates;
  const double se_scale = 1.0 / std::sqrt(static_cast<double>(R));
  std::vector<ScalingPoint> out;
  for (std::size_t n : config.sizes) {
    const bool with_tlb = n <= config.tlb_max_size;
    std::vector<double> tlb_vals(R, 0.0), sup_vals(R, 0.0);
    parallel_for(R, exec.threads, [&](std::size_t r) {
      const Permutation shuffle =
          random_permutation(config.reference_size, derive_seed(config.seed, {kSubset, n, r}));
      std::vector<std::size_t> subset(shuffle.mapping().begin(), shuffle.mapping().begin() +
                                                                      static_cast<std::ptrdiff_t>(n));
      sup_vals[r] = sup_profile_deviation(ref_d, ref_profiles, subset);
      if (with_tlb) {
        const LabeledSample smp =
            sample_mixture(config.spec, n, derive_seed(config.seed, {kProbe, n, r}));
        tlb_vals[r] = tlb(tlb_rows, all_profiles(pairwise_distances(smp.cloud)), 1.0).value;
      }
    });
    ScalingPoint pt;
    pt.n = n;
    pt.has_tlb = with_tlb;
    pt.sup_mean = mean_of(sup_vals);
    pt.sup_se = sample_std(sup_vals) * se_scale;
    if (with_tlb) {
      pt.tlb_mean = mean_of(tlb_vals);
      pt.tlb_se = sample_std(tlb_vals) * se_scale;
    }
    out.push_back(pt);
  }
  return out;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("slope needs >= 2 paired points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InputError("log-log slope needs positive values");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double mx = mean_of(lx), my = mean_of(ly);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw InputError("log-log slope needs distinct x values");
  return sxy / sxx;
}

}  // namespace profilematch
