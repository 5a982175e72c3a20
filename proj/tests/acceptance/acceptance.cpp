// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../../tools/commands.hpp"
#include "oracles.hpp"
#include "profilematch/assignment.hpp"
#include "profilematch/csv_io.hpp"
#include "profilematch/experiments.hpp"
#include "profilematch/geometry.hpp"
#include "profilematch/gw_tlb.hpp"
#include "profilematch/profile_matching.hpp"
#include "profilematch/synthetic.hpp"
#include "profilematch/theory.hpp"
#include "profilematch/wasserstein1d.hpp"
#include "random_inputs.hpp"

using namespace profilematch;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// -- 1 ----------------------------------------------------------------------

Outcome wasserstein_oracle() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  double worst = 0.0;
  for (int rep = 0; rep < 500; ++rep) {
    const double p = rep % 2 == 0 ? 1.0 : 2.0;
    auto draw = [&](std::vector<double>& x, std::vector<double>& w, bool& uniform) {
      const std::size_t n = 1 + rng() % 6;
      x.resize(n);
      // every fourth instance sits on a coarse grid so ties appear
      for (auto& v : x) v = rep % 4 == 3 ? std::floor(u(rng) * 2.0) / 2.0 : u(rng);
      uniform = rng() % 2 == 0;
      w = uniform ? std::vector<double>(n, 1.0 / static_cast<double>(n))
                  : testing_support::random_weights(rng, n, rng() % 3 == 0);
    };
    std::vector<double> x, wx, y, wy;
    bool ux = false, uy = false;
    draw(x, wx, ux);
    draw(y, wy, uy);
    const auto px = ux ? DistanceProfile::uniform(x) : DistanceProfile::weighted(x, wx);
    const auto py = uy ? DistanceProfile::uniform(y) : DistanceProfile::weighted(y, wy);
    const double lp = std::pow(oracle::wasserstein_pow_lp(x, wx, y, wy, p), 1.0 / p);
    worst = std::max(worst, std::abs(wasserstein_p(px, py, p) - lp));
  }
  return {worst <= 1e-9, "500 pairs, max |W - LP| = " + fmt("%.3g", worst)};
}

// -- 2 ----------------------------------------------------------------------

Outcome lap_exact() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 1 + rng() % 7;
    Matrix c = testing_support::random_matrix(rng, n, n, 0.0, 10.0);
    if (rep % 5 == 0) c = c.array().round();  // integer costs, many ties
    worst = std::max(worst, std::abs(solve_lap(c).total_cost -
                                     oracle::brute_force_lap(testing_support::to_dense(c))));
  }
  return {worst <= 1e-9, "500 matrices, max |LAP - enumeration| = " + fmt("%.3g", worst)};
}

// -- 3 ----------------------------------------------------------------------

Outcome ot_lap_consistency() {
  std::mt19937_64 rng(303);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng() % 30;
    const Matrix c = testing_support::random_matrix(rng, n, n, 0.0, 5.0);
    worst = std::max(worst, std::abs(solve_discrete_ot(c).value -
                                     solve_lap(c).total_cost / static_cast<double>(n)));
  }
  return {worst <= 1e-9, "100 instances, max |OT - LAP/n| = " + fmt("%.3g", worst)};
}

// -- 4 ----------------------------------------------------------------------

Outcome tlb_lower_bound() {
  std::mt19937_64 rng(404);
  double worst = -std::numeric_limits<double>::infinity();  // max of tlb - gw
  std::size_t checks = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng() % 12, m = 1 + rng() % 12;
    const double p = rep % 2 == 0 ? 1.0 : 2.0;
    const auto dx = pairwise_distances(testing_support::random_cloud(rng, n, 1 + rng() % 3));
    const auto dy = pairwise_distances(testing_support::random_cloud(rng, m, 1 + rng() % 3, 1.5));
    const TlbResult t = tlb(dx, dy, p);
    std::vector<Coupling> couplings{t.coupling, product_coupling(n, m)};
    // optimal plans of random costs are unique, hence vertices of the polytope
    for (int v = 0; v < 10; ++v)
      couplings.push_back(solve_discrete_ot(testing_support::random_matrix(rng, n, m)).coupling);
    for (const auto& g : couplings) {
      worst = std::max(worst, t.value - gw_objective(dx, dy, g, p));
      ++checks;
    }
  }
  return {worst <= 1e-9, std::to_string(checks) + " couplings, max (TLB - GW) = " + fmt("%.3g", worst)};
}

// -- 5 ----------------------------------------------------------------------

Outcome rigid_invariance() {
  std::mt19937_64 rng(505);
  double worst = 0.0;
  std::size_t pi_mismatch = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rng() % 199, m = 2 + rng() % 199, d = 1 + rng() % 10;
    const auto x = testing_support::random_cloud(rng, n, d);
    const auto y = testing_support::random_cloud(rng, m, d);
    std::normal_distribution<double> g(0.0, 3.0);
    Vector b(static_cast<Eigen::Index>(d));
    for (auto& v : b) v = g(rng);
    const auto y2 = apply_rigid(y, random_rotation(d, rng()), b);
    const auto before = discrepancy_matrix(pairwise_distances(x), pairwise_distances(y));
    const auto after = discrepancy_matrix(pairwise_distances(x), pairwise_distances(y2));
    worst = std::max(worst, (before.entries - after.entries).cwiseAbs().maxCoeff());
    if (match(before).pi != match(after).pi) ++pi_mismatch;
  }
  return {worst <= 1e-9 && pi_mismatch == 0,
          "50 clouds, max entry change " + fmt("%.3g", worst) + ", pi mismatches " +
              std::to_string(pi_mismatch)};
}

// -- 6 ----------------------------------------------------------------------

Outcome profile_bound_checks() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  double worst2 = -std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t t = 1 + rng() % 8;
    std::vector<double> z(t);
    for (auto& v : z) v = u(rng);
    std::sort(z.begin(), z.end());
    const auto p = testing_support::random_weights(rng, t, true);
    const auto q = testing_support::random_weights(rng, t, true);
    worst2 = std::max(worst2, wasserstein_p(DistanceProfile::weighted(z, p), DistanceProfile::weighted(z, q)) -
                                  lemma2_bound(z, p, q));
  }
  // W_1((.5, .5), (1, 0)) on {0, 2} is 1 = 2 * 0.5
  const std::vector<double> z{0.0, 2.0}, p{0.5, 0.5}, q{1.0, 0.0};
  const double eq2 = wasserstein_p(DistanceProfile::weighted(z, p), DistanceProfile::weighted(z, q)) -
                     lemma2_bound(z, p, q);

  double worst1 = std::numeric_limits<double>::infinity();  // min margin
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t K = 1 + rng() % 4, t = K + rng() % 3, s = K + rng() % 3;
    worst1 = std::min(worst1, lemma1_margin(testing_support::random_paired_mixtures(rng, K, t, s, 1 + rng() % 3)));
  }
  // single shared atom at 0, outliers at distance D on the nu side
  const double D = 2.5, lambda = 0.7;
  MixtureSpec mu, nu;
  mu.centers = Matrix{{0.0}, {0.0}};
  nu.centers = Matrix{{0.0}, {D}};
  mu.weights = nu.weights = {lambda, 1.0 - lambda};
  mu.stds = nu.stds = {0.0, 0.0};
  const double eq1 = lemma1_margin(PairedMixtures{mu, nu, 1});

  const bool pass = worst2 <= 1e-9 && worst1 >= -1e-9 && std::abs(eq2) <= 1e-9 && std::abs(eq1) <= 1e-9;
  return {pass, "cumulative-weight bound max excess " + fmt("%.3g", worst2) + ", equality gap " + fmt("%.3g", eq2) +
                    "; outlier-mass bound min margin " + fmt("%.3g", worst1) + ", equality gap " + fmt("%.3g", eq1)};
}

// -- 7 ----------------------------------------------------------------------

Outcome profile_lipschitz() {
  std::mt19937_64 rng(707);
  double worst = -std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng() % 59, d = 1 + rng() % 5;
    const auto x = testing_support::random_cloud(rng, n, d, 0.5 + static_cast<double>(rng() % 4));
    const auto dm = pairwise_distances(x);
    const auto prof = all_profiles(dm);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) worst = std::max(worst, wasserstein_p(prof[i], prof[j]) - dm(i, j));
  }
  return {worst <= 1e-9, "100 clouds, max W1 - |x_i - x_j| = " + fmt("%.3g", worst)};
}

// -- 8 ----------------------------------------------------------------------

double mean_of(const std::vector<ExperimentRecord>& recs, double sigma, bool perfect) {
  double s = 0.0, c = 0.0;
  for (const auto& r : recs)
    if (r.sigma == sigma) {
      s += perfect ? (r.perfect ? 1.0 : 0.0) : r.accuracy;
      c += 1.0;
    }
  return s / c;
}

Outcome mixture_matching() {
  const double delta = 0.05;
  MixtureExperimentConfig base;
  base.d = 3;
  base.K = base.t = base.s = 10;
  base.n = base.m = 1000;
  base.replicates = 100;

  // center draw with the widest separation among the first 50 seeds
  std::uint64_t best_seed = 0;
  SeparationReport best;
  best.omega = -std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    base.seed = seed;
    const auto r = separation_report(mixture_experiment_model(base, 0.0), base.n, base.m, delta);
    if (r.omega > best.omega) {
      best = r;
      best_seed = seed;
    }
  }
  base.seed = best_seed;
  // largest sigma keeping both noise terms below omega, then a x3 grid
  const double per_sigma = std::max(16.0 * std::sqrt(3.0),
                                    32.0 * std::sqrt(2.0 * std::log(4.0 * 1e6 / delta)));
  const double sigma0 = 0.9 * best.omega / per_sigma;
  for (double f : {1.0, 3.0, 9.0, 27.0, 81.0}) base.sigmas.push_back(sigma0 * f);

  const auto at_sigma0 = separation_report(mixture_experiment_model(base, sigma0), base.n, base.m, delta);
  const bool precondition = at_sigma0.omega > at_sigma0.rhs;

  const auto clean = run_mixture_experiment(base);
  auto with_outlier = base;
  with_outlier.t = with_outlier.s = 11;
  const auto dirty = run_mixture_experiment(with_outlier);

  std::vector<double> prob, acc_clean, acc_dirty;
  for (double s : base.sigmas) {
    prob.push_back(mean_of(clean, s, true));
    acc_clean.push_back(mean_of(clean, s, false));
    acc_dirty.push_back(mean_of(dirty, s, false));
  }
  bool monotone = true, outlier_ok = true;
  for (std::size_t k = 0; k + 1 < prob.size(); ++k) monotone &= prob[k + 1] <= prob[k] + 0.1;
  for (std::size_t k = 0; k < prob.size(); ++k) outlier_ok &= acc_dirty[k] <= acc_clean[k] + 0.05;
  const bool high = prob[0] >= 0.95;

  std::ostringstream d;
  d << "seed " << best_seed << ", omega " << fmt("%.4g", best.omega) << " vs rhs " << fmt("%.4g", at_sigma0.rhs)
    << " (sampling term " << fmt("%.4g", at_sigma0.rhs_sampling) << ") -> separation condition "
    << (precondition ? "met" : "NOT met") << "; P(perfect) =";
  for (double v : prob) d << ' ' << fmt("%.2f", v);
  d << " at sigma = " << fmt("%.3g", sigma0) << " x {1,3,9,27,81}"
    << (high ? "" : " [< 0.95 at smallest sigma]") << (monotone ? "" : " [not non-increasing]")
    << "; accuracy clean/outlier =";
  for (std::size_t k = 0; k < prob.size(); ++k) d << ' ' << fmt("%.3f", acc_clean[k]) << '/' << fmt("%.3f", acc_dirty[k]);
  if (!outlier_ok) d << " [outlier accuracy exceeds clean + 0.05]";
  return {precondition && high && monotone && outlier_ok, d.str()};
}

// -- 9 ----------------------------------------------------------------------

double recovery(const std::vector<ExperimentRecord>& recs, Method m) {
  double s = 0.0, c = 0.0;
  for (const auto& r : recs)
    if (r.method == m) {
      s += r.perfect ? 1.0 : 0.0;
      c += 1.0;
    }
  return s / c;
}

Outcome noise_stability() {
  NoiseExperimentConfig c;
  c.d = 10;
  c.n = 100;
  c.replicates = 100;
  c.seed = 9;
  const double bound = theorem2_noise_bound(noise_experiment_locations(c), 0.05);
  c.sigmas = {std::sqrt(bound)};
  c.rotation = RotationKind::two_coord;
  const auto two = run_noise_stability_experiment(c);
  c.rotation = RotationKind::full;
  const auto full = run_noise_stability_experiment(c);
  const double two_p = recovery(two, Method::assignment), two_b = recovery(two, Method::ot_baseline);
  const double full_p = recovery(full, Method::assignment), full_b = recovery(full, Method::ot_baseline);
  return {two_p >= 0.9 && two_b >= 0.9 && full_p >= 0.9 && full_b <= 0.2,
          "sigma " + fmt("%.3g", c.sigmas[0]) + "; two-coordinate profile/OT " + fmt("%.2f", two_p) + "/" +
              fmt("%.2f", two_b) + ", full rotation profile/OT " + fmt("%.2f", full_p) + "/" + fmt("%.2f", full_b)};
}

// -- 10 ---------------------------------------------------------------------

Outcome recovery_at_noise_bound() {
  std::string detail;
  bool pass = true;
  const std::pair<std::size_t, std::size_t> families[] = {{10, 100}, {3, 50}};
  for (const auto& [d, n] : families) {
    NoiseExperimentConfig c;
    c.d = d;
    c.n = n;
    c.replicates = 200;
    c.seed = 10 + d;
    c.rotation = RotationKind::full;
    const double bound = theorem2_noise_bound(noise_experiment_locations(c), 0.05);
    c.sigmas = {std::sqrt(bound)};
    const double freq = recovery(run_noise_stability_experiment(c), Method::assignment);
    pass &= freq >= 0.9;
    if (!detail.empty()) detail += "; ";
    detail += "d=" + std::to_string(d) + " n=" + std::to_string(n) + " sigma^2=" + fmt("%.3g", bound) +
              " recovery " + fmt("%.3f", freq);
  }
  return {pass, detail + " (200 replicates each)"};
}

// -- 11 ---------------------------------------------------------------------

// Non-increasing, except for at most one adjacent rise no larger than the
// standard error of the difference.
bool nearly_non_increasing(const std::vector<double>& v, const std::vector<double>& se) {
  int rises = 0;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    const double rise = v[k + 1] - v[k];
    if (rise <= 0.0) continue;
    if (++rises > 1 || rise > std::hypot(se[k], se[k + 1])) return false;
  }
  return true;
}

Outcome scaling_probe() {
  ScalingProbeConfig c;
  c.spec = make_paired_mixtures(3, 3, 3, 3, 1.0, 0.1, 7).mu;
  c.sizes = {50, 100, 200, 400};
  c.tlb_max_size = 400;
  c.replicates = 20;
  c.seed = 11;
  const auto pts = run_scaling_probe(c);
  std::vector<double> n, tlb, tlb_se, sup, sup_se;
  for (const auto& p : pts) {
    n.push_back(static_cast<double>(p.n));
    tlb.push_back(p.tlb_mean);
    tlb_se.push_back(p.tlb_se);
    sup.push_back(p.sup_mean);
    sup_se.push_back(p.sup_se);
  }
  const double slope = log_log_slope(n, sup);
  const bool pass = nearly_non_increasing(tlb, tlb_se) && nearly_non_increasing(sup, sup_se) && slope >= -0.8 &&
                    slope <= -0.25;
  std::ostringstream d;
  d << "TLB";
  for (double v : tlb) d << ' ' << fmt("%.4f", v);
  d << "; sup deviation";
  for (double v : sup) d << ' ' << fmt("%.4f", v);
  d << "; slope " << fmt("%.3f", slope);
  return {pass, d.str()};
}

// -- 12 ---------------------------------------------------------------------

Outcome threshold_interval() {
  // two shared atoms with unequal mass, one light outlier per side
  MixtureSpec mu, nu;
  mu.centers = Matrix{{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.3}};
  nu.centers = Matrix{{0.0, 0.0}, {1.0, 0.0}, {1.0, -1.0}};
  mu.weights = nu.weights = {0.98 * 0.8, 0.98 * 0.2, 0.02};
  mu.stds = nu.stds = {0.0, 0.0, 0.0};
  const PairedMixtures pm{mu, nu, 2};
  const std::size_t n = 3000;
  const auto r = separation_report(pm, n, n, 0.05);
  const bool separated = r.omega_prime > r.rhs;

  const auto x = sample_mixture(mu, n, 12), y = sample_mixture(nu, n, 13);
  const auto free_run = match_clouds(x.cloud, y.cloud);
  const auto iv = inlier_threshold_interval(free_run, x.labels, 2);
  std::vector<std::size_t> expected;
  for (std::size_t i = 0; i < n; ++i)
    if (x.labels[i] < 2) expected.push_back(i);
  bool exact = iv.separates();
  if (exact) {
    for (double rho : {std::nextafter(iv.lo, iv.hi), 0.5 * (iv.lo + iv.hi), iv.hi})
      exact &= match_clouds(x.cloud, y.cloud, 1.0, rho).inliers == expected;
  }
  return {separated && exact, "omega' " + fmt("%.4g", r.omega_prime) + " vs rhs " + fmt("%.4g", r.rhs) +
                                  "; interval (" + fmt("%.4g", iv.lo) + ", " + fmt("%.4g", iv.hi) + "]" +
                                  (exact ? ", I equals the inlier set" : ", I differs from the inlier set")};
}

// -- 13 ---------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "profilematch_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root / "in");
  const auto x = sample_mixture(make_paired_mixtures(2, 3, 3, 2, 1.0, 0.05, 21).mu, 60, 22);
  const auto y = sample_mixture(make_paired_mixtures(2, 3, 3, 2, 1.0, 0.05, 21).nu, 60, 23);
  write_point_cloud_csv(root / "in/x.csv", x.cloud);
  write_point_cloud_csv(root / "in/y.csv", y.cloud);
  write_distance_matrix_csv(root / "in/dx.csv", pairwise_distances(x.cloud));
  write_distance_matrix_csv(root / "in/dy.csv", pairwise_distances(y.cloud));
  const std::string in = (root / "in").string() + "/";

  auto commands = [&](const std::string& o) -> std::vector<std::vector<std::string>> {
    return {
        {"match", "--source", in + "x.csv", "--target", in + "y.csv", "--threshold", "0.05", "--out", o + "match.csv"},
        {"match", "--source", in + "dx.csv", "--target", in + "dy.csv", "--input-kind", "distances", "--order", "2",
         "--out", o + "match_d.csv"},
        {"assign", "--source", in + "x.csv", "--target", in + "y.csv", "--out", o + "assign.csv"},
        {"assign", "--source", in + "x.csv", "--target", in + "y.csv", "--baseline", "--out", o + "baseline.csv"},
        {"tlb", "--source", in + "x.csv", "--target", in + "y.csv", "--emit-coupling", o + "coupling.csv"},
        {"distances", "--input", in + "x.csv", "--out", o + "dist.csv"},
        {"cluster", "--input", in + "x.csv", "--k", "3", "--seed", "5", "--out", o + "labels.csv"},
        {"simulate", "mixture", "--d", "2", "--K", "2", "--t", "3", "--s", "3", "--n", "80", "--m", "80",
         "--sigmas", "0.01,0.05", "--replicates", "3", "--seed", "4", "--out", o + "mix.csv", "--model-out",
         o + "model.json"},
        {"simulate", "noise", "--d", "4", "--n", "20", "--sigmas", "0,0.001", "--replicates", "3", "--rotation",
         "full", "--seed", "6", "--out", o + "noise.csv"},
    };
  };
  auto run_all = [&](const std::string& tag, const std::string& threads) {
    const fs::path dir = root / tag;
    fs::create_directories(dir);
    std::string stdout_all;
    for (auto args : commands(dir.string() + "/")) {
      args.insert(args.begin(), {"profilematch", "--threads", threads});
      std::ostringstream out, err;
      if (cli::run_cli(args, out, err) != cli::kExitOk) return std::string("exit failure: ") + err.str();
      stdout_all += out.str();
    }
    std::ofstream(dir / "stdout.txt", std::ios::binary) << stdout_all;
    return std::string();
  };
  for (const auto& [tag, threads] : {std::pair{"a", "1"}, {"b", "1"}, {"c", "2"}}) {
    const auto e = run_all(tag, threads);
    if (!e.empty()) return {false, e};
  }
  std::size_t files = 0, diffs = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const auto name = entry.path().filename();
    const auto ref = slurp(entry.path());
    ++files;
    if (slurp(root / "b" / name) != ref || slurp(root / "c" / name) != ref) ++diffs;
  }
  return {files >= 14 && diffs == 0, std::to_string(files) + " output files x 3 runs (threads 1, 1, 2), " +
                                         std::to_string(diffs) + " differ"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "1-D Wasserstein vs transport LP", wasserstein_oracle},
      {2, "LAP vs exhaustive enumeration", lap_exact},
      {3, "OT value equals LAP / n", ot_lap_consistency},
      {4, "TLB below GW objective", tlb_lower_bound},
      {5, "rigid invariance of discrepancies", rigid_invariance},
      {6, "profile distance bounds", profile_bound_checks},
      {7, "profiles 1-Lipschitz in the point", profile_lipschitz},
      {8, "mixture matching vs noise", mixture_matching},
      {9, "noisy correspondence, rotations", noise_stability},
      {10, "exact recovery under the noise bound", recovery_at_noise_bound},
      {11, "profile convergence in n", scaling_probe},
      {12, "inlier threshold interval", threshold_interval},
      {13, "CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
