#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "profilematch/assignment.hpp"
#include "profilematch/experiments.hpp"
#include "profilematch/geometry.hpp"
#include "profilematch/gw_tlb.hpp"
#include "profilematch/profile_matching.hpp"
#include "profilematch/synthetic.hpp"

namespace profilematch {

// All readers throw InputError on unreadable or malformed files.

// One point per row, d numeric columns. A first row with any non-numeric field
// is taken as a header and skipped. Blank lines are ignored.
PointCloud read_point_cloud_csv(const std::filesystem::path& path);
// n rows x n numeric columns (header row auto-detected as above).
DistanceMatrix read_distance_matrix_csv(const std::filesystem::path& path,
                                        Validation validation = Validation::basic);

// %.17g
std::string format_real(double x);

void write_point_cloud_csv(const std::filesystem::path& path, const PointCloud& cloud);
void write_distance_matrix_csv(const std::filesystem::path& path, const DistanceMatrix& dmat);
// source_index,target_index,discrepancy,inlier
void write_match_csv(const std::filesystem::path& path, const MatchResult& result);
// source_index,target_index
void write_permutation_csv(const std::filesystem::path& path, const Permutation& perm);
// Dense n x m CSV, plus {n, m, order, value} in the same path with extension .json.
void write_coupling(const std::filesystem::path& path, const Coupling& coupling, double order,
                    double value);
// label
void write_labels_csv(const std::filesystem::path& path, const std::vector<std::size_t>& labels);
// x0,...,x{d-1},label
void write_labeled_sample_csv(const std::filesystem::path& path, const LabeledSample& sample);

// {"centers": [[...]], "weights": [...], "stds": [...]}
MixtureSpec read_mixture_spec_json(const std::filesystem::path& path);
void write_mixture_spec_json(const std::filesystem::path& path, const MixtureSpec& spec);

// method,sigma,replicate,perfect,accuracy. The header is written on
// construction and every record is flushed as it arrives.
class ExperimentCsvWriter {
 public:
  explicit ExperimentCsvWriter(const std::filesystem::path& path);
  void write(const ExperimentRecord& record);

 private:
  std::ofstream out_;
};

void write_experiment_csv(const std::filesystem::path& path,
                          const std::vector<ExperimentRecord>& records);
// [{"method", "sigma", "replicates", "accuracy_mean", "accuracy_std",
//   "recovery_frequency", "recovery_std"}, ...]
void write_summary_json(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);

}  // namespace profilematch
