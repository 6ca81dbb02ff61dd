#include "couplekit/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>

#include "couplekit/errors.hpp"

namespace couplekit {

int kernel_threads() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("COUPLEKIT_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<long>(n, cap);
  }
  return std::max(n, 1);
}

namespace {

void check_kernel_args(std::span<const double> w0, std::span<const double> w1,
                       std::span<const double> a) {
  if (w0.size() != a.size() || w1.size() != a.size()) {
    throw DimensionMismatch("min_kernel_bounds: weights and element differ in length");
  }
}

void check_pair_args(const Eigen::MatrixXd& b, double h, double t) {
  if (b.rows() != b.cols()) throw DimensionMismatch("pair array must be square");
  if (!(h > 0.0)) throw InvalidArgument("grid step must be positive");
  if (!(t > 0.0)) throw InvalidArgument("t must be positive");
}

double lag_max(std::span<const double> f, std::size_t d) {
  double m = 0.0;
  for (std::size_t i = 0; i + d < f.size(); ++i) m = std::max(m, std::abs(f[i + d] - f[i]));
  return m;
}

double pair_row_max(const Eigen::MatrixXd& b, double h, double t, Eigen::Index x) {
  double m = 0.0;
  for (Eigen::Index y = 0; y < b.cols(); ++y) {
    if (y == x) continue;
    double dist = static_cast<double>(std::abs(x - y)) * h;
    m = std::max(m, std::abs(b(x, y)) / (2.0 + dist / t));
  }
  return m;
}

double kernel_row(std::span<const double> w0, std::span<const double> w1,
                  std::span<const double> a, std::size_t m) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    s += std::min(w0[m] / w0[k], w1[m] / w1[k]) * std::abs(a[k]);
  }
  return s;
}

}  // namespace

namespace serial {

Vector lag_maxima(std::span<const double> f) {
  Vector d(f.size(), 0.0);
  for (std::size_t lag = 0; lag < f.size(); ++lag) d[lag] = lag_max(f, lag);
  return d;
}

double pair_family_max(const Eigen::MatrixXd& b, double h, double t) {
  check_pair_args(b, h, t);
  double m = 0.0;
  for (Eigen::Index x = 0; x < b.rows(); ++x) m = std::max(m, pair_row_max(b, h, t, x));
  return m;
}

Vector min_kernel_bounds(std::span<const double> w0, std::span<const double> w1,
                         std::span<const double> a) {
  check_kernel_args(w0, w1, a);
  Vector out(a.size());
  for (std::size_t m = 0; m < a.size(); ++m) out[m] = kernel_row(w0, w1, a, m);
  return out;
}

std::vector<KResult> k_on_grid(const Couple& c, std::span<const double> a,
                               std::span<const double> ts, Exponent p, const KOptions& opt) {
  std::vector<KResult> out;
  out.reserve(ts.size());
  for (double t : ts) out.push_back(k_functional(c, a, t, p, opt));
  return out;
}

}  // namespace serial

namespace parallel {

Vector lag_maxima(std::span<const double> f) {
  const long n = static_cast<long>(f.size());
  Vector d(f.size(), 0.0);
  // Long lags are cheap; dynamic scheduling evens out the triangle.
#pragma omp parallel for schedule(dynamic, 16) num_threads(kernel_threads())
  for (long lag = 0; lag < n; ++lag) d[lag] = lag_max(f, static_cast<std::size_t>(lag));
  return d;
}

double pair_family_max(const Eigen::MatrixXd& b, double h, double t) {
  check_pair_args(b, h, t);
  double m = 0.0;
  const Eigen::Index n = b.rows();
#pragma omp parallel for reduction(max : m) schedule(static) num_threads(kernel_threads())
  for (Eigen::Index x = 0; x < n; ++x) m = std::max(m, pair_row_max(b, h, t, x));
  return m;
}

Vector min_kernel_bounds(std::span<const double> w0, std::span<const double> w1,
                         std::span<const double> a) {
  check_kernel_args(w0, w1, a);
  const long n = static_cast<long>(a.size());
  Vector out(a.size());
#pragma omp parallel for schedule(static) num_threads(kernel_threads())
  for (long m = 0; m < n; ++m) out[m] = kernel_row(w0, w1, a, static_cast<std::size_t>(m));
  return out;
}

std::vector<KResult> k_on_grid(const Couple& c, std::span<const double> a,
                               std::span<const double> ts, Exponent p, const KOptions& opt) {
  const long n = static_cast<long>(ts.size());
  std::vector<KResult> out(ts.size());
  std::vector<std::exception_ptr> errors(ts.size());
#pragma omp parallel for schedule(dynamic) num_threads(kernel_threads())
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = k_functional(c, a, ts[i], p, opt);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  // Rethrow the error of the smallest t index, as the serial loop would.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace parallel

}  // namespace couplekit
