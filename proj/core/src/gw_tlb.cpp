#include "profilematch/gw_tlb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "profilematch/parallel.hpp"
#include "profilematch/wasserstein1d.hpp"

namespace profilematch {

Coupling::Coupling(Matrix gamma, double tolerance) : gamma_(std::move(gamma)) {
  if (gamma_.rows() == 0 || gamma_.cols() == 0) throw InputError("coupling is empty");
  if (!gamma_.allFinite()) throw InputError("coupling has non-finite entries");
  for (Eigen::Index i = 0; i < gamma_.rows(); ++i)
    for (Eigen::Index j = 0; j < gamma_.cols(); ++j) {
      double& g = gamma_(i, j);
      if (g < -1e-15) throw InputError("coupling has negative entries");
      if (g < 0.0) g = 0.0;
    }
  if (max_marginal_violation() > tolerance) {
    throw InputError("coupling marginals are not uniform (violation " +
                     std::to_string(max_marginal_violation()) + ")");
  }
}

double Coupling::max_marginal_violation() const {
  const double row_target = 1.0 / static_cast<double>(gamma_.rows());
  const double col_target = 1.0 / static_cast<double>(gamma_.cols());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < gamma_.rows(); ++i)
    worst = std::max(worst, std::abs(gamma_.row(i).sum() - row_target));
  for (Eigen::Index j = 0; j < gamma_.cols(); ++j)
    worst = std::max(worst, std::abs(gamma_.col(j).sum() - col_target));
  return worst;
}

Coupling product_coupling(std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) throw InputError("product coupling needs n, m >= 1");
  return Coupling(Matrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m),
                                   1.0 / (static_cast<double>(n) * static_cast<double>(m))));
}

namespace {

// Min-cost flow on the complete bipartite transportation network. Forward arcs
// source -> sink are uncapacitated; a sink -> source residual arc exists while
// that pair carries flow.
class TransportFlow {
 public:
  TransportFlow(const Matrix& cost, std::int64_t supply, std::int64_t demand)
      : cost_(cost),
        n_(static_cast<std::size_t>(cost.rows())),
        m_(static_cast<std::size_t>(cost.cols())),
        supply_(n_, supply),
        demand_(m_, demand),
        carried_(m_),
        potential_(n_ + m_, 0.0),
        dist_(n_ + m_),
        pred_(n_ + m_),
        done_(n_ + m_) {}

  void solve() {
    for (std::size_t s = 0; s < n_; ++s) {
      while (supply_[s] > 0) augment_from(s);
    }
  }

  std::int64_t flow(std::size_t i, std::size_t j) const {
    for (const auto& [src, f] : carried_[j])
      if (src == i) return f;
    return 0;
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  double c(std::size_t i, std::size_t j) const {
    return cost_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  std::int64_t& flow_ref(std::size_t i, std::size_t j) {
    for (auto& entry : carried_[j])
      if (entry.first == i) return entry.second;
    carried_[j].emplace_back(i, 0);
    return carried_[j].back().second;
  }

  void augment_from(std::size_t s) {
    // Nodes: sources [0, n), sinks [n, n + m).
    std::fill(dist_.begin(), dist_.end(), kInf);
    std::fill(done_.begin(), done_.end(), 0);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    finalized_.clear();
    dist_[s] = 0.0;
    heap.emplace(0.0, s);
    std::size_t sink = n_ + m_;

    auto relax = [&](std::size_t from, std::size_t to, double reduced) {
      const double nd = dist_[from] + std::max(0.0, reduced);
      if (nd < dist_[to]) {
        dist_[to] = nd;
        pred_[to] = from;
        heap.emplace(nd, to);
      }
    };

    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (done_[u] || d > dist_[u]) continue;
      done_[u] = 1;
      finalized_.push_back(u);
      if (u >= n_) {
        const std::size_t j = u - n_;
        if (demand_[j] > 0) {
          sink = u;
          break;
        }
        for (const auto& [i, f] : carried_[j]) {
          if (f <= 0 || done_[i]) continue;
          relax(u, i, -c(i, j) + potential_[u] - potential_[i]);
        }
      } else {
        for (std::size_t j = 0; j < m_; ++j) {
          if (done_[n_ + j]) continue;
          relax(u, n_ + j, c(u, j) + potential_[u] - potential_[n_ + j]);
        }
      }
    }
    if (sink == n_ + m_) throw std::logic_error("transport flow: no augmenting path");

    const double reach = dist_[sink];
    for (std::size_t v : finalized_) potential_[v] += dist_[v] - reach;

    std::int64_t amount = std::min(supply_[s], demand_[sink - n_]);
    for (std::size_t v = sink; v != s; v = pred_[v]) {
      const std::size_t u = pred_[v];
      if (u >= n_) amount = std::min(amount, flow(v, u - n_));  // backward sink -> source
    }
    for (std::size_t v = sink; v != s; v = pred_[v]) {
      const std::size_t u = pred_[v];
      if (u < n_) {
        flow_ref(u, v - n_) += amount;
      } else {
        auto& list = carried_[u - n_];
        for (auto it = list.begin(); it != list.end(); ++it) {
          if (it->first != v) continue;
          it->second -= amount;
          if (it->second == 0) list.erase(it);
          break;
        }
      }
    }
    supply_[s] -= amount;
    demand_[sink - n_] -= amount;
  }

  const Matrix& cost_;
  std::size_t n_, m_;
  std::vector<std::int64_t> supply_, demand_;
  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> carried_;
  std::vector<double> potential_, dist_;
  std::vector<std::size_t> pred_, finalized_;
  std::vector<char> done_;
};

}  // namespace

OtSolution solve_discrete_ot(const Matrix& cost) {
  const auto n = static_cast<std::uint64_t>(cost.rows());
  const auto m = static_cast<std::uint64_t>(cost.cols());
  if (n == 0 || m == 0) throw InputError("transport problem is empty");
  if (!cost.allFinite()) throw InputError("transport cost has non-finite entries");
  if ((cost.array() < 0.0).any()) throw InputError("transport cost has negative entries");

  const std::uint64_t g = std::gcd(n, m);
  const std::uint64_t limit = std::uint64_t{1} << 62;
  const std::uint64_t big = std::max(n, m);
  const std::uint64_t n_over_g = n / g;
  if (n_over_g > limit / m) throw InputError("transport problem too large for integer scaling");
  const std::uint64_t lcm = n_over_g * m;
  if (lcm > limit / big) throw InputError("transport problem too large for integer scaling");

  TransportFlow flow(cost, static_cast<std::int64_t>(lcm / n), static_cast<std::int64_t>(lcm / m));
  flow.solve();

  const double scale = static_cast<double>(lcm);
  Matrix gamma = Matrix::Zero(cost.rows(), cost.cols());
  double value = 0.0;
  for (Eigen::Index i = 0; i < cost.rows(); ++i)
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      const auto f = flow.flow(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (f == 0) continue;
      gamma(i, j) = static_cast<double>(f) / scale;
      value += cost(i, j) * static_cast<double>(f);
    }
  return {Coupling(std::move(gamma), 1e-9), value / scale};
}

TlbResult tlb(const std::vector<DistanceProfile>& px, const std::vector<DistanceProfile>& py,
              double order, const ExecutionOptions& exec) {
  if (!(order >= 1.0) || !std::isfinite(order)) {
    throw InputError("Wasserstein order must be a finite real >= 1");
  }
  if (px.empty() || py.empty()) throw InputError("TLB needs non-empty profile sets");
  Matrix cost(static_cast<Eigen::Index>(px.size()), static_cast<Eigen::Index>(py.size()));
  parallel_for(px.size(), exec.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < py.size(); ++j) {
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          wasserstein_p_pow(px[i], py[j], order);
    }
  });
  OtSolution ot = solve_discrete_ot(cost);
  const double value = order == 1.0 ? ot.value : std::pow(ot.value, 1.0 / order);
  return {value, std::move(ot.coupling)};
}

TlbResult tlb(const DistanceMatrix& source, const DistanceMatrix& target, double order,
              const ExecutionOptions& exec) {
  if (!(order >= 1.0) || !std::isfinite(order)) {
    throw InputError("Wasserstein order must be a finite real >= 1");
  }
  return tlb(all_profiles(source, exec), all_profiles(target, exec), order, exec);
}

double gw_objective(const DistanceMatrix& source, const DistanceMatrix& target,
                    const Coupling& coupling, double order) {
  if (!(order >= 1.0) || !std::isfinite(order)) {
    throw InputError("Wasserstein order must be a finite real >= 1");
  }
  const std::size_t n = source.size(), m = target.size();
  if (coupling.rows() != n || coupling.cols() != m) {
    throw DimensionError("coupling shape does not match the distance matrices");
  }
  if (coupling.max_marginal_violation() > 1e-6) throw InputError("coupling is infeasible");

  std::vector<std::pair<std::size_t, std::size_t>> support;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (coupling(i, j) > 0.0) support.emplace_back(i, j);

  double total = 0.0;
  for (const auto& [i, j] : support) {
    double inner = 0.0;
    for (const auto& [k, l] : support) {
      const double gap = std::abs(source(i, k) - target(j, l));
      const double term = order == 1.0 ? gap : std::pow(gap, order);
      inner += term * coupling(k, l);
    }
    total += inner * coupling(i, j);
  }
  return order == 1.0 ? total : std::pow(total, 1.0 / order);
}

}  // namespace profilematch
