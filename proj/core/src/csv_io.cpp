#include "profilematch/csv_io.hpp"

#include <charconv>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string_view>

namespace profilematch {
namespace {

using Rows = std::vector<std::vector<double>>;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) return fields;
    start = comma + 1;
  }
}

Rows read_numeric_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  Rows rows;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (auto f : fields) {
      auto v = parse_number(f);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": non-numeric field");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(rows.front().size()) + " columns, got " +
                       std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("'" + path.string() + "' has no data rows");
  return rows;
}

Matrix to_matrix(const Rows& rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_real(m(i, j));
    }
    out << '\n';
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

PointCloud read_point_cloud_csv(const std::filesystem::path& path) {
  return PointCloud(to_matrix(read_numeric_csv(path)));
}

DistanceMatrix read_distance_matrix_csv(const std::filesystem::path& path,
                                        Validation validation) {
  const Rows rows = read_numeric_csv(path);
  if (rows.size() != rows.front().size()) {
    throw InputError("'" + path.string() + "' is not square (" + std::to_string(rows.size()) +
                     " rows, " + std::to_string(rows.front().size()) + " columns)");
  }
  return DistanceMatrix(to_matrix(rows), validation);
}

void write_point_cloud_csv(const std::filesystem::path& path, const PointCloud& cloud) {
  auto out = open_out(path);
  write_matrix(out, cloud.points());
}

void write_distance_matrix_csv(const std::filesystem::path& path, const DistanceMatrix& dmat) {
  auto out = open_out(path);
  write_matrix(out, dmat.entries());
}

void write_match_csv(const std::filesystem::path& path, const MatchResult& result) {
  auto out = open_out(path);
  out << "source_index,target_index,discrepancy,inlier\n";
  for (std::size_t i = 0; i < result.pi.size(); ++i) {
    out << i << ',' << result.pi[i] << ',' << format_real(result.discrepancy[i]) << ','
        << (result.is_inlier(i) ? 1 : 0) << '\n';
  }
}

void write_permutation_csv(const std::filesystem::path& path, const Permutation& perm) {
  auto out = open_out(path);
  out << "source_index,target_index\n";
  for (std::size_t i = 0; i < perm.size(); ++i) out << i << ',' << perm[i] << '\n';
}

void write_coupling(const std::filesystem::path& path, const Coupling& coupling, double order,
                    double value) {
  {
    auto out = open_out(path);
    write_matrix(out, coupling.gamma());
  }
  std::filesystem::path sidecar = path;
  sidecar.replace_extension(".json");
  if (sidecar == path) sidecar += ".json";
  write_json(sidecar, {{"n", coupling.rows()}, {"m", coupling.cols()}, {"order", order},
                       {"value", value}});
}

void write_labels_csv(const std::filesystem::path& path, const std::vector<std::size_t>& labels) {
  auto out = open_out(path);
  out << "label\n";
  for (std::size_t l : labels) out << l << '\n';
}

void write_labeled_sample_csv(const std::filesystem::path& path, const LabeledSample& sample) {
  auto out = open_out(path);
  const Matrix& x = sample.cloud.points();
  for (Eigen::Index k = 0; k < x.cols(); ++k) out << 'x' << k << ',';
  out << "label\n";
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index k = 0; k < x.cols(); ++k) out << format_real(x(i, k)) << ',';
    out << sample.labels[static_cast<std::size_t>(i)] << '\n';
  }
}

MixtureSpec read_mixture_spec_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  MixtureSpec spec;
  try {
    const auto j = nlohmann::json::parse(in);
    const auto centers = j.at("centers").get<std::vector<std::vector<double>>>();
    if (centers.empty()) throw InputError("mixture spec has no centers");
    for (const auto& c : centers) {
      if (c.size() != centers.front().size()) throw InputError("mixture centers are ragged");
    }
    spec.centers = to_matrix(centers);
    spec.weights = j.at("weights").get<std::vector<double>>();
    spec.stds = j.at("stds").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError("'" + path.string() + "': " + e.what());
  }
  spec.validate();
  return spec;
}

void write_mixture_spec_json(const std::filesystem::path& path, const MixtureSpec& spec) {
  nlohmann::json centers = nlohmann::json::array();
  for (Eigen::Index i = 0; i < spec.centers.rows(); ++i) {
    std::vector<double> row(spec.centers.row(i).begin(), spec.centers.row(i).end());
    centers.push_back(row);
  }
  write_json(path, {{"centers", centers}, {"weights", spec.weights}, {"stds", spec.stds}});
}

ExperimentCsvWriter::ExperimentCsvWriter(const std::filesystem::path& path) : out_(open_out(path)) {
  out_ << "method,sigma,replicate,perfect,accuracy\n";
  out_.flush();
}

void ExperimentCsvWriter::write(const ExperimentRecord& r) {
  out_ << method_name(r.method) << ',' << format_real(r.sigma) << ',' << r.replicate << ','
       << (r.perfect ? 1 : 0) << ',' << format_real(r.accuracy) << '\n';
  out_.flush();
}

void write_experiment_csv(const std::filesystem::path& path,
                          const std::vector<ExperimentRecord>& records) {
  ExperimentCsvWriter writer(path);
  for (const auto& r : records) writer.write(r);
}

void write_summary_json(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"method", method_name(r.method)},
                 {"sigma", r.sigma},
                 {"replicates", r.replicates},
                 {"accuracy_mean", r.accuracy_mean},
                 {"accuracy_std", r.accuracy_std},
                 {"recovery_frequency", r.recovery_frequency},
                 {"recovery_std", r.recovery_std}});
  }
  write_json(path, j);
}

}  // namespace profilematch
