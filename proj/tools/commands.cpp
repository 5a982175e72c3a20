#include "commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>
#include <ostream>

#include "profilematch/assignment.hpp"
#include "profilematch/csv_io.hpp"
#include "profilematch/experiments.hpp"
#include "profilematch/gw_tlb.hpp"
#include "profilematch/parallel.hpp"
#include "profilematch/profile_matching.hpp"
#include "profilematch/synthetic.hpp"

namespace profilematch::cli {
namespace {

enum class InputKind { points, distances };

struct PairArgs {
  std::string source, target;
  InputKind kind = InputKind::points;
};

struct Loaded {
  PointCloud source_cloud, target_cloud;
  DistanceMatrix source, target;
};

void add_pair_options(CLI::App* cmd, PairArgs& a) {
  cmd->add_option("--source", a.source, "source CSV")->required();
  cmd->add_option("--target", a.target, "target CSV")->required();
  cmd->add_option("--input-kind", a.kind, "points or distances")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, InputKind>{{"points", InputKind::points},
                                           {"distances", InputKind::distances}}));
}

Loaded load_pair(const PairArgs& a, const ExecutionOptions& exec) {
  Loaded l;
  if (a.kind == InputKind::distances) {
    l.source = read_distance_matrix_csv(a.source);
    l.target = read_distance_matrix_csv(a.target);
  } else {
    l.source_cloud = read_point_cloud_csv(a.source);
    l.target_cloud = read_point_cloud_csv(a.target);
    l.source = pairwise_distances(l.source_cloud, exec);
    l.target = pairwise_distances(l.target_cloud, exec);
  }
  return l;
}

// Accepts "inf" as well as numbers.
double parse_threshold(const std::string& s) {
  if (s == "inf" || s == "infinity") return kNoThreshold;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw InputError("threshold '" + s + "' is not a number");
  return v;
}

template <class T>
void override_from(const nlohmann::json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  try {
    auto j = nlohmann::json::parse(in);
    if (!j.is_object()) throw InputError("config '" + path + "' must be a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("config '" + path + "': " + e.what());
  }
}

std::string default_summary_path(const std::string& out) {
  std::filesystem::path p(out);
  p.replace_extension();
  return p.string() + "_summary.json";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distance-profile matching of point clouds and metric-measure data",
               "profilematch"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "profilematch 0.1.0");

  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (default: PROFILEMATCH_THREADS or 1)")
      ->check(CLI::PositiveNumber);

  // match
  auto* match_cmd = app.add_subcommand("match", "nearest-profile matching with an optional threshold");
  PairArgs match_args;
  double match_order = 1.0;
  std::string match_threshold = "inf", match_out;
  add_pair_options(match_cmd, match_args);
  match_cmd->add_option("--order", match_order, "Wasserstein order p >= 1");
  match_cmd->add_option("--threshold", match_threshold, "inlier threshold rho > 0 (default inf)");
  match_cmd->add_option("--out", match_out, "match CSV")->required();

  // assign
  auto* assign_cmd = app.add_subcommand("assign", "one-to-one assignment (n = m)");
  PairArgs assign_args;
  bool baseline = false;
  std::string assign_out;
  add_pair_options(assign_cmd, assign_args);
  assign_cmd->add_flag("--baseline", baseline, "squared-Euclidean assignment instead of profiles");
  assign_cmd->add_option("--out", assign_out, "permutation CSV")->required();

  // tlb
  auto* tlb_cmd = app.add_subcommand("tlb", "third lower bound to the Gromov-Wasserstein distance");
  PairArgs tlb_args;
  double tlb_order = 1.0;
  std::string coupling_out;
  add_pair_options(tlb_cmd, tlb_args);
  tlb_cmd->add_option("--order", tlb_order, "order p >= 1");
  tlb_cmd->add_option("--emit-coupling", coupling_out, "coupling CSV (JSON sidecar alongside)");

  // distances
  auto* dist_cmd = app.add_subcommand("distances", "export the pairwise distance matrix of a point CSV");
  std::string dist_in, dist_out;
  dist_cmd->add_option("--input", dist_in, "point CSV")->required();
  dist_cmd->add_option("--out", dist_out, "distance-matrix CSV")->required();

  // cluster
  auto* cluster_cmd = app.add_subcommand("cluster", "k-means labels for a point CSV");
  std::string cluster_in, cluster_out;
  std::size_t cluster_k = 0, cluster_iters = 100;
  std::uint64_t cluster_seed = 0;
  cluster_cmd->add_option("--input", cluster_in, "point CSV")->required();
  cluster_cmd->add_option("--k", cluster_k, "number of clusters")->required();
  cluster_cmd->add_option("--seed", cluster_seed, "random seed");
  cluster_cmd->add_option("--max-iters", cluster_iters, "Lloyd iterations");
  cluster_cmd->add_option("--out", cluster_out, "label CSV")->required();

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "synthetic experiment sweeps");
  sim_cmd->require_subcommand(1);
  std::string sim_config, sim_out, sim_summary;
  std::uint64_t sim_seed = 0;
  std::size_t sim_replicates = 100;
  std::vector<double> sim_sigmas;
  auto add_common = [&](CLI::App* c) {
    c->add_option("--config", sim_config, "JSON config; explicit flags take precedence");
    c->add_option("--seed", sim_seed, "master seed");
    c->add_option("--replicates", sim_replicates, "replicates per sigma");
    c->add_option("--sigmas", sim_sigmas, "noise levels")->delimiter(',');
    c->add_option("--out", sim_out, "record CSV")->required();
    c->add_option("--summary", sim_summary, "summary JSON (default <out>_summary.json)");
  };

  auto* mix_cmd = sim_cmd->add_subcommand("mixture", "paired Gaussian mixtures with shared components");
  add_common(mix_cmd);
  MixtureExperimentConfig mix;
  mix.replicates = 0;
  std::string mix_threshold = "inf", mix_model_out;
  mix_cmd->add_option("--d", mix.d, "dimension");
  mix_cmd->add_option("--K", mix.K, "shared components");
  mix_cmd->add_option("--t", mix.t, "components of mu");
  mix_cmd->add_option("--s", mix.s, "components of nu");
  mix_cmd->add_option("--n", mix.n, "source sample size");
  mix_cmd->add_option("--m", mix.m, "target sample size");
  mix_cmd->add_option("--center-scale", mix.center_scale, "side of the center cube");
  mix_cmd->add_option("--order", mix.order, "Wasserstein order");
  mix_cmd->add_option("--threshold", mix_threshold, "inlier threshold");
  mix_cmd->add_option("--model-out", mix_model_out, "write mu and nu specs (JSON) at the first sigma");

  auto* noise_cmd = sim_cmd->add_subcommand("noise", "noisy rigid correspondence");
  add_common(noise_cmd);
  NoiseExperimentConfig noise;
  noise_cmd->add_option("--d", noise.d, "dimension");
  noise_cmd->add_option("--n", noise.n, "number of locations");
  noise_cmd->add_option("--rotation", noise.rotation, "two_coord or full")
      ->transform(CLI::CheckedTransformer(std::map<std::string, RotationKind>{
          {"two_coord", RotationKind::two_coord}, {"full", RotationKind::full}}));
  noise_cmd->add_option("--angle", noise.angle, "two_coord rotation angle (radians)");
  noise_cmd->add_option("--location-scale", noise.location_scale, "std of the locations");

  std::vector<std::string> argv_tail(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv_tail.begin(), argv_tail.end());
  try {
    app.parse(argv_tail);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "profilematch 0.1.0\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }

  const ExecutionOptions exec{threads > 0 ? threads : default_thread_count()};
  try {
    if (match_cmd->parsed()) {
      const Loaded l = load_pair(match_args, exec);
      const MatchResult res =
          match_distances(l.source, l.target, match_order, parse_threshold(match_threshold), exec);
      write_match_csv(match_out, res);
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
      for (double v : res.discrepancy) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
      }
      out << "n " << l.source.size() << '\n'
          << "m " << l.target.size() << '\n'
          << "inliers " << res.inliers.size() << '\n'
          << "max_discrepancy " << format_real(hi) << '\n'
          << "min_discrepancy " << format_real(lo) << '\n'
          << "mean_discrepancy " << format_real(sum / static_cast<double>(res.discrepancy.size()))
          << '\n';
    } else if (assign_cmd->parsed()) {
      if (baseline && assign_args.kind == InputKind::distances) {
        throw InputError("--baseline needs point coordinates, not distance matrices");
      }
      const Loaded l = load_pair(assign_args, exec);
      const LapSolution sol = baseline ? assign_ot_baseline(l.source_cloud, l.target_cloud)
                                       : assign_profiles(l.source, l.target, exec);
      write_permutation_csv(assign_out, sol.assignment);
      out << "n " << sol.assignment.size() << '\n'
          << "total_cost " << format_real(sol.total_cost) << '\n';
    } else if (tlb_cmd->parsed()) {
      const Loaded l = load_pair(tlb_args, exec);
      const TlbResult res = tlb(l.source, l.target, tlb_order, exec);
      if (!coupling_out.empty()) write_coupling(coupling_out, res.coupling, tlb_order, res.value);
      out << "tlb " << format_real(res.value) << '\n';
    } else if (dist_cmd->parsed()) {
      const DistanceMatrix d = pairwise_distances(read_point_cloud_csv(dist_in), exec);
      write_distance_matrix_csv(dist_out, d);
      out << "n " << d.size() << '\n';
    } else if (cluster_cmd->parsed()) {
      const PointCloud cloud = read_point_cloud_csv(cluster_in);
      const KMeansResult km = kmeans(cloud, cluster_k, cluster_seed, cluster_iters);
      write_labels_csv(cluster_out, km.labels);
      out << "n " << cloud.size() << '\n'
          << "k " << cluster_k << '\n'
          << "iterations " << km.iterations << '\n';
    } else if (sim_cmd->parsed()) {
      const nlohmann::json cfg = load_config(sim_config);
      auto pick = [&](CLI::App* c, const char* flag, const char* key, auto& field) {
        if (c->count(flag) == 0 && cfg.contains(key)) {
          try {
            override_from(cfg, key, field);
          } catch (const nlohmann::json::exception& e) {
            throw InputError(std::string("config key '") + key + "': " + e.what());
          }
        }
      };
      std::vector<ExperimentRecord> records;
      const std::string summary_path = sim_summary.empty() ? default_summary_path(sim_out) : sim_summary;
      if (mix_cmd->parsed()) {
        pick(mix_cmd, "--seed", "seed", sim_seed);
        pick(mix_cmd, "--replicates", "replicates", sim_replicates);
        pick(mix_cmd, "--sigmas", "sigmas", sim_sigmas);
        pick(mix_cmd, "--d", "d", mix.d);
        pick(mix_cmd, "--K", "K", mix.K);
        pick(mix_cmd, "--t", "t", mix.t);
        pick(mix_cmd, "--s", "s", mix.s);
        pick(mix_cmd, "--n", "n", mix.n);
        pick(mix_cmd, "--m", "m", mix.m);
        pick(mix_cmd, "--center-scale", "center_scale", mix.center_scale);
        pick(mix_cmd, "--order", "order", mix.order);
        if (mix_cmd->count("--threshold") == 0 && cfg.contains("threshold")) {
          mix.threshold = cfg.at("threshold").is_string()
                              ? parse_threshold(cfg.at("threshold").get<std::string>())
                              : cfg.at("threshold").get<double>();
        } else {
          mix.threshold = parse_threshold(mix_threshold);
        }
        mix.seed = sim_seed;
        mix.replicates = sim_replicates;
        mix.sigmas = sim_sigmas;
        mix.validate();
        if (!mix_model_out.empty()) {
          const PairedMixtures pm = mixture_experiment_model(mix, mix.sigmas.front());
          std::filesystem::path base(mix_model_out);
          base.replace_extension();
          write_mixture_spec_json(base.string() + "_mu.json", pm.mu);
          write_mixture_spec_json(base.string() + "_nu.json", pm.nu);
        }
        ExperimentCsvWriter writer(sim_out);
        records = run_mixture_experiment(mix, exec, [&](const ExperimentRecord& r) { writer.write(r); });
      } else {
        pick(noise_cmd, "--seed", "seed", sim_seed);
        pick(noise_cmd, "--replicates", "replicates", sim_replicates);
        pick(noise_cmd, "--sigmas", "sigmas", sim_sigmas);
        pick(noise_cmd, "--d", "d", noise.d);
        pick(noise_cmd, "--n", "n", noise.n);
        pick(noise_cmd, "--angle", "angle", noise.angle);
        pick(noise_cmd, "--location-scale", "location_scale", noise.location_scale);
        if (noise_cmd->count("--rotation") == 0 && cfg.contains("rotation")) {
          const auto name = cfg.at("rotation").get<std::string>();
          if (name == "two_coord") noise.rotation = RotationKind::two_coord;
          else if (name == "full") noise.rotation = RotationKind::full;
          else throw InputError("config key 'rotation' must be two_coord or full");
        }
        noise.seed = sim_seed;
        noise.replicates = sim_replicates;
        noise.sigmas = sim_sigmas;
        noise.validate();
        ExperimentCsvWriter writer(sim_out);
        records = run_noise_stability_experiment(noise, exec,
                                                 [&](const ExperimentRecord& r) { writer.write(r); });
      }
      const auto rows = summarize(records);
      write_summary_json(summary_path, rows);
      for (const auto& r : rows) {
        out << method_name(r.method) << " sigma=" << format_real(r.sigma)
            << " recovery=" << format_real(r.recovery_frequency)
            << " accuracy=" << format_real(r.accuracy_mean) << '\n';
      }
    }
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDimension;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace profilematch::cli
