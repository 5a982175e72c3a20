#pragma once

#include "profilematch/geometry.hpp"

namespace profilematch {

// W_order(p, q) between two discrete measures on the line, computed exactly by
// sweeping the two quantile functions. Throws InputError if order < 1.
double wasserstein_p(const DistanceProfile& p, const DistanceProfile& q, double order = 1.0);

// W_order^order(p, q): the same integral without the final root.
double wasserstein_p_pow(const DistanceProfile& p, const DistanceProfile& q, double order = 1.0);

// Equal to wasserstein_p_pow whenever that value is <= cutoff; otherwise the
// result is only guaranteed to exceed cutoff (the sweep may stop early).
double wasserstein_p_pow_bounded(const DistanceProfile& p, const DistanceProfile& q, double order,
                                 double cutoff);

// value^(1/order), with the exact shortcuts used by wasserstein_p.
double wasserstein_root(double value, double order);

}  // namespace profilematch
