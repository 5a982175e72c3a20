#pragma once

#include <cstddef>
#include <vector>

#include "profilematch/geometry.hpp"
#include "profilematch/types.hpp"

namespace profilematch {

// A joint probability matrix with uniform marginals: rows sum to 1/n,
// columns to 1/m.
class Coupling {
 public:
  Coupling() = default;
  // Entries >= -1e-15 are clamped to 0; anything more negative, or a marginal
  // off by more than `tolerance`, throws InputError.
  explicit Coupling(Matrix gamma, double tolerance = 1e-6);

  std::size_t rows() const { return static_cast<std::size_t>(gamma_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(gamma_.cols()); }
  const Matrix& gamma() const { return gamma_; }
  double operator()(std::size_t i, std::size_t j) const {
    return gamma_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double max_marginal_violation() const;

 private:
  Matrix gamma_;
};

struct OtSolution {
  Coupling coupling;
  double value = 0.0;  // sum_ij cost(i, j) * gamma(i, j)
};

// Exact optimal transport between uniform measures on n and m atoms.
// Supplies are scaled to integers by L = lcm(n, m) (L/n per source, L/m per
// sink) and solved as a min-cost flow by successive shortest augmenting paths
// with potentials; flows are divided by L on output. Costs must be finite and
// nonnegative; throws InputError if L * max(n, m) exceeds 2^62.
OtSolution solve_discrete_ot(const Matrix& cost);

struct TlbResult {
  double value = 0.0;
  Coupling coupling;
};

// Third lower bound to GW_order: OT over the matrix of W_order^order between
// distance profiles, returned as (optimal value)^(1/order).
TlbResult tlb(const DistanceMatrix& source, const DistanceMatrix& target, double order = 1.0,
              const ExecutionOptions& exec = {});
// Same, from precomputed profiles.
TlbResult tlb(const std::vector<DistanceProfile>& source,
              const std::vector<DistanceProfile>& target, double order = 1.0,
              const ExecutionOptions& exec = {});

// GW objective at a fixed coupling, by direct O(n^2 m^2) summation:
// (sum_{i,k,j,l} |dX(i,k) - dY(j,l)|^order g_ij g_kl)^(1/order).
double gw_objective(const DistanceMatrix& source, const DistanceMatrix& target,
                    const Coupling& coupling, double order = 1.0);

// g_ij = 1/(n m).
Coupling product_coupling(std::size_t n, std::size_t m);

}  // namespace profilematch
