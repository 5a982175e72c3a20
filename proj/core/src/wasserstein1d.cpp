#include "profilematch/wasserstein1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace profilematch {
namespace {

struct AbsCost {
  double operator()(double a, double b) const { return std::abs(a - b); }
};
struct SquareCost {
  double operator()(double a, double b) const { return (a - b) * (a - b); }
};
struct PowCost {
  double order;
  double operator()(double a, double b) const { return std::pow(std::abs(a - b), order); }
};

// Both uniform with the same atom count: the quantile coupling pairs sorted atoms.
// With a finite cutoff the loop may stop early once the partial sum already
// exceeds cutoff; the accumulation order is the same either way.
template <class Cost>
double equal_size_pow(const double* x, const double* y, std::size_t n, Cost cost,
                      double cutoff = std::numeric_limits<double>::infinity()) {
  const double limit = cutoff * static_cast<double>(n);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += cost(x[k], y[k]);
    s1 += cost(x[k + 1], y[k + 1]);
    s2 += cost(x[k + 2], y[k + 2]);
    s3 += cost(x[k + 3], y[k + 3]);
    if ((k & 63) == 60 && (s0 + s1) + (s2 + s3) > limit) {
      return ((s0 + s1) + (s2 + s3)) / static_cast<double>(n);
    }
  }
  for (; k < n; ++k) s0 += cost(x[k], y[k]);
  return ((s0 + s1) + (s2 + s3)) / static_cast<double>(n);
}

// Both uniform, `fine` has ratio * n_coarse atoms: every fine quantile cell lies
// inside a single coarse cell.
template <class Cost>
double nested_size_pow(const double* fine, std::size_t n_fine, const double* coarse,
                       std::size_t ratio, Cost cost) {
  const std::size_t n_coarse = n_fine / ratio;
  double total = 0.0;
  for (std::size_t k = 0; k < n_coarse; ++k) {
    const double y = coarse[k];
    const double* block = fine + k * ratio;
    double s0 = 0.0, s1 = 0.0;
    std::size_t l = 0;
    for (; l + 2 <= ratio; l += 2) {
      s0 += cost(block[l], y);
      s1 += cost(block[l + 1], y);
    }
    if (l < ratio) s0 += cost(block[l], y);
    total += s0 + s1;
  }
  return total / static_cast<double>(n_fine);
}

class Cumulative {
 public:
  explicit Cumulative(const DistanceProfile& p) : p_(p) {}
  // Cumulative weight through atom k; the last atom closes at exactly 1.
  double at(std::size_t k) {
    if (k + 1 == p_.size()) return 1.0;
    if (p_.is_uniform()) return static_cast<double>(k + 1) / static_cast<double>(p_.size());
    running_ += p_.weight(k);
    return running_;
  }

 private:
  const DistanceProfile& p_;
  double running_ = 0.0;
};

template <class Cost>
double sweep_pow(const DistanceProfile& p, const DistanceProfile& q, Cost cost) {
  const auto xs = p.values();
  const auto ys = q.values();
  Cumulative cp(p), cq(q);
  std::size_t i = 0, j = 0;
  double ci = cp.at(0), cj = cq.at(0);
  double u = 0.0, total = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double next = std::min(ci, cj);
    if (next > u) total += (next - u) * cost(xs[i], ys[j]);
    u = std::max(u, next);
    // Ties advance both cursors together.
    const bool step_p = ci <= next;
    const bool step_q = cj <= next;
    if (step_p && ++i < xs.size()) ci = cp.at(i);
    if (step_q && ++j < ys.size()) cj = cq.at(j);
  }
  return total;
}

template <class Cost>
double dispatch(const DistanceProfile& p, const DistanceProfile& q, Cost cost,
                double cutoff = std::numeric_limits<double>::infinity()) {
  if (p.is_uniform() && q.is_uniform()) {
    const std::size_t np = p.size(), nq = q.size();
    if (np == nq) return equal_size_pow(p.values().data(), q.values().data(), np, cost, cutoff);
    if (np > nq && np % nq == 0) {
      return nested_size_pow(p.values().data(), np, q.values().data(), np / nq, cost);
    }
    if (nq > np && nq % np == 0) {
      return nested_size_pow(q.values().data(), nq, p.values().data(), nq / np, cost);
    }
  }
  return sweep_pow(p, q, cost);
}

}  // namespace

double wasserstein_p_pow_bounded(const DistanceProfile& p, const DistanceProfile& q, double order,
                                 double cutoff) {
  if (!(order >= 1.0) || !std::isfinite(order)) {
    throw InputError("Wasserstein order must be a finite real >= 1");
  }
  if (p.size() == 0 || q.size() == 0) throw InputError("Wasserstein distance of an empty profile");
  double value;
  if (order == 1.0) {
    value = dispatch(p, q, AbsCost{}, cutoff);
  } else if (order == 2.0) {
    value = dispatch(p, q, SquareCost{}, cutoff);
  } else {
    value = dispatch(p, q, PowCost{order}, cutoff);
  }
  return std::max(0.0, value);
}

double wasserstein_p_pow(const DistanceProfile& p, const DistanceProfile& q, double order) {
  return wasserstein_p_pow_bounded(p, q, order, std::numeric_limits<double>::infinity());
}

double wasserstein_root(double value, double order) {
  if (order == 1.0) return value;
  if (order == 2.0) return std::sqrt(value);
  return std::pow(value, 1.0 / order);
}

double wasserstein_p(const DistanceProfile& p, const DistanceProfile& q, double order) {
  return wasserstein_root(wasserstein_p_pow(p, q, order), order);
}

}  // namespace profilematch
