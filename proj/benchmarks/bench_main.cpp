#include <benchmark/benchmark.h>

#include <random>

#include "profilematch/assignment.hpp"
#include "profilematch/geometry.hpp"
#include "profilematch/gw_tlb.hpp"
#include "profilematch/profile_matching.hpp"
#include "profilematch/synthetic.hpp"
#include "profilematch/wasserstein1d.hpp"

using namespace profilematch;

namespace {

PointCloud gaussian_cloud(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) m(i, k) = g(rng);
  return PointCloud(std::move(m));
}

DistanceProfile random_profile(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return DistanceProfile::uniform(std::move(v));
}

void BM_WassersteinEqualSize(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = random_profile(n, 1), q = random_profile(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein_p(p, q));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WassersteinEqualSize)->RangeMultiplier(4)->Range(64, 4096);

void BM_WassersteinGeneralSweep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = random_profile(n, 1), q = random_profile(n + 1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein_p(p, q, 2.0));
}
BENCHMARK(BM_WassersteinGeneralSweep)->RangeMultiplier(4)->Range(64, 4096);

void BM_MatchClouds(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pm = make_paired_mixtures(5, 5, 5, 3, 1.0, 0.02, 3);
  const auto x = sample_mixture(pm.mu, n, 4).cloud, y = sample_mixture(pm.nu, n, 5).cloud;
  for (auto _ : state) benchmark::DoNotOptimize(match_clouds(x, y));
}
BENCHMARK(BM_MatchClouds)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_AssignProfiles(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = gaussian_cloud(n, 10, 6);
  const auto y = apply_rigid(x, random_rotation(10, 7), Vector::Zero(10));
  for (auto _ : state) benchmark::DoNotOptimize(assign_profiles(x, y));
}
BENCHMARK(BM_AssignProfiles)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Tlb(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dx = pairwise_distances(gaussian_cloud(n, 3, 8));
  const auto dy = pairwise_distances(gaussian_cloud(n, 3, 9));
  for (auto _ : state) benchmark::DoNotOptimize(tlb(dx, dy));
}
BENCHMARK(BM_Tlb)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
