#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "couplekit/couple.hpp"
#include "couplekit/kfun.hpp"

namespace couplekit {

// Hot loops shared by several modules. Every kernel has a serial reference
// in `serial` and an OpenMP version in `parallel`; both return bitwise
// identical results (maxima are order independent, sums run in a fixed
// order inside one thread).
//
// The thread count is omp_get_max_threads(), capped by the environment
// variable COUPLEKIT_THREADS when it holds a positive integer.
int kernel_threads();

namespace serial {

// D[d] = max_i |f[i + d] - f[i]| for d = 0..N-1 (N = f.size()).
Vector lag_maxima(std::span<const double> f);

// max over x != y of |b(x, y)| / (2 + |x - y| h / t) for a square array
// indexed by grid points x_i = i h.
double pair_family_max(const Eigen::MatrixXd& b, double h, double t);

// bound[m] = sum_k min(w0[m] / w0[k], w1[m] / w1[k]) |a[k]|.
Vector min_kernel_bounds(std::span<const double> w0, std::span<const double> w1,
                         std::span<const double> a);

// K_p(t, a) at each t of the grid.
std::vector<KResult> k_on_grid(const Couple& c, std::span<const double> a,
                               std::span<const double> ts, Exponent p, const KOptions& opt = {});

}  // namespace serial

namespace parallel {

Vector lag_maxima(std::span<const double> f);
double pair_family_max(const Eigen::MatrixXd& b, double h, double t);
Vector min_kernel_bounds(std::span<const double> w0, std::span<const double> w1,
                         std::span<const double> a);
std::vector<KResult> k_on_grid(const Couple& c, std::span<const double> a,
                               std::span<const double> ts, Exponent p, const KOptions& opt = {});

}  // namespace parallel

}  // namespace couplekit
