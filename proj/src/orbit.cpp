#include "couplekit/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "couplekit/errors.hpp"
#include "couplekit/kernels.hpp"

namespace couplekit {

namespace {

const Exponent kOne = Exponent::finite(1.0);
const Exponent kInf = Exponent::infinity();

Vector default_grid() {
  Vector ts;
  for (int k = -20; k <= 20; ++k) ts.push_back(std::exp2(k));
  return ts;
}

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace

Domination dominates(const OrbitProblem& problem, std::span<const double> ts) {
  check_element(problem.couple_a, problem.a);
  check_element(problem.couple_b, problem.b);
  Domination d;
  auto ka = exact_k_curve(problem.couple_a, problem.a);
  auto kb = exact_k_curve(problem.couple_b, problem.b);
  if (ka && kb) {
    CurveComparison cmp = compare_curves(*kb, *ka, 1e-12);
    d.holds = cmp.leq;
    d.witness_t = cmp.witness;
    d.margin = cmp.margin;
    return d;
  }
  Vector grid = ts.empty() ? default_grid() : Vector(ts.begin(), ts.end());
  auto ra = parallel::k_on_grid(problem.couple_a, problem.a, grid, kOne);
  auto rb = parallel::k_on_grid(problem.couple_b, problem.b, grid, kOne);
  d.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    d.margin = std::min(d.margin, ra[i].value - rb[i].value);
    if (d.holds && rb[i].lower > ra[i].value) {
      d.holds = false;
      d.witness_t = grid[i];
    }
  }
  return d;
}

HlpConstruction hlp_construct(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("hlp_construct: empty vector");
  for (double v : a) {
    if (!std::isfinite(v)) throw InvalidArgument("hlp_construct: non-finite entry");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw InvalidArgument("hlp_construct: non-finite entry");
  }
  CurveComparison cmp = compare_curves(k_l1_linf_curve(b), k_l1_linf_curve(a), 1e-12);
  if (!cmp.leq) {
    throw PreconditionFailed("hlp_construct: b is not dominated by a",
                             {cmp.witness.value_or(0.0)});
  }

  // Work in a common dimension; padded coordinates are zero.
  const std::size_t n = std::max(a.size(), b.size());
  Vector pa(a.begin(), a.end()), pb(b.begin(), b.end());
  pa.resize(n, 0.0);
  pb.resize(n, 0.0);
  Rearrangement ra = rearrange(pa), rb = rearrange(pb);
  const Vector& x = ra.values;
  const Vector& y = rb.values;
  const auto ni = static_cast<Eigen::Index>(n);

  // x = A a and b = B y.
  Eigen::MatrixXd am = Eigen::MatrixXd::Zero(ni, ni), bm = Eigen::MatrixXd::Zero(ni, ni);
  for (std::size_t i = 0; i < n; ++i) {
    am(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ra.order[i])) =
        sign_of(pa[ra.order[i]]);
    bm(static_cast<Eigen::Index>(rb.order[i]), static_cast<Eigen::Index>(i)) =
        sign_of(pb[rb.order[i]]);
  }

  // Remove the excess mass from the tail: z <= x, same order, sum z = sum y.
  double total_y = std::accumulate(y.begin(), y.end(), 0.0);
  double excess = std::max(0.0, std::accumulate(x.begin(), x.end(), 0.0) - total_y);
  Vector z(x);
  Eigen::MatrixXd dm = Eigen::MatrixXd::Zero(ni, ni);
  for (std::size_t i = n; i-- > 0;) {
    double r = std::min(z[i], excess);
    z[i] -= r;
    excess -= r;
    if (x[i] > 0.0) dm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = z[i] / x[i];
  }

  // T-transform chain from z down to y.
  const double tol = 1e-15 * std::max(1.0, x.empty() ? 0.0 : x[0]);
  Eigen::MatrixXd cm = Eigen::MatrixXd::Identity(ni, ni);
  HlpConstruction out;
  for (std::size_t step = 0; step < 2 * n; ++step) {
    std::size_t j = n;
    for (std::size_t i = n; i-- > 0;) {
      if (z[i] > y[i] + tol) {
        j = i;
        break;
      }
    }
    if (j == n) break;
    std::size_t k = n;
    for (std::size_t i = j + 1; i < n; ++i) {
      if (z[i] < y[i] - tol) {
        k = i;
        break;
      }
    }
    if (k == n) {
      // Rounding surplus in the tail with no deficit after it.
      z[j] = y[j];
      continue;
    }
    double delta = std::min(z[j] - y[j], y[k] - z[k]);
    double lambda = delta / (z[j] - z[k]);
    Eigen::MatrixXd tt = Eigen::MatrixXd::Identity(ni, ni);
    const auto jj = static_cast<Eigen::Index>(j), kk = static_cast<Eigen::Index>(k);
    tt(jj, jj) = tt(kk, kk) = 1.0 - lambda;
    tt(jj, kk) = tt(kk, jj) = lambda;
    double zj = z[j], zk = z[k];
    z[j] = (1.0 - lambda) * zj + lambda * zk;
    z[k] = lambda * zj + (1.0 - lambda) * zk;
    if (z[j] - y[j] <= y[k] - z[k]) {
      z[j] = y[j];
    } else {
      z[k] = y[k];
    }
    cm = tt * cm;
    ++out.t_transforms;
  }

  Eigen::MatrixXd full = bm * cm * dm * am;
  out.matrix = full.topLeftCorner(static_cast<Eigen::Index>(b.size()),
                                  static_cast<Eigen::Index>(a.size()));
  Eigen::VectorXd ea(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) ea(static_cast<Eigen::Index>(i)) = a[i];
  Eigen::VectorXd ta = out.matrix * ea;
  for (std::size_t i = 0; i < b.size(); ++i) {
    out.reconstruction_error =
        std::max(out.reconstruction_error, std::abs(ta(static_cast<Eigen::Index>(i)) - b[i]));
  }
  Eigen::MatrixXd abs = out.matrix.cwiseAbs();
  out.max_column_sum = abs.colwise().sum().maxCoeff();
  out.max_row_sum = abs.rowwise().sum().maxCoeff();
  return out;
}

namespace {

void check_samples(std::span<const double> x, std::span<const double> a) {
  if (x.empty() || x.size() != a.size()) {
    throw DimensionMismatch("level operator: grid and samples differ in length");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || (i > 0 && !(x[i] > x[i - 1]))) {
      throw InvalidArgument("level operator: grid must be positive and increasing");
    }
    if (!(a[i] >= 0.0) || !std::isfinite(a[i])) {
      throw InvalidArgument("level operator: a must be nonnegative");
    }
  }
}

}  // namespace

Vector level_majorant(std::span<const double> x, std::span<const double> a) {
  check_samples(x, a);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size(); ++i) pts.emplace_back(x[i], a[i]);
  ConcaveCurve m = least_concave_majorant(pts);
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::max(a[i], m(x[i]));
  return out;
}

Vector level_interp_operator(std::span<const double> x, std::span<const double> a,
                             std::span<const double> abar) {
  if (abar.size() != x.size()) {
    throw DimensionMismatch("level operator: grid and samples differ in length");
  }
  Vector m = level_majorant(x, a);
  const std::size_t n = x.size();
  std::vector<bool> contact(n);
  for (std::size_t i = 0; i < n; ++i) contact[i] = a[i] >= m[i] * (1.0 - 1e-12);
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (contact[i]) {
      out[i] = abar[i];
      continue;
    }
    std::size_t lo = i, hi = i;
    while (lo > 0 && !contact[lo - 1]) --lo;
    while (hi + 1 < n && !contact[hi + 1]) ++hi;
    bool has_left = lo > 0, has_right = hi + 1 < n;
    double x1 = has_left ? x[lo - 1] : 0.0;
    double v1 = has_left ? abar[lo - 1] : 0.0;
    if (!has_right) {
      out[i] = v1;
      continue;
    }
    double x2 = x[hi + 1], v2 = abar[hi + 1];
    double lambda = (x[i] - x1) / (x2 - x1);
    out[i] = (1.0 - lambda) * v1 + lambda * v2;
  }
  return out;
}

MinKernelVerdict min_kernel_check(std::span<const double> w0, std::span<const double> w1,
                                  std::span<const double> a, std::span<const double> b) {
  if (b.size() != a.size()) throw DimensionMismatch("min_kernel_check: a and b differ in length");
  Vector bound = parallel::min_kernel_bounds(w0, w1, a);
  MinKernelVerdict v;
  for (std::size_t m = 0; m < b.size(); ++m) {
    if (std::abs(b[m]) > bound[m] * (1.0 + 1e-13)) {
      v.ok = false;
      v.violating_index = m;
      break;
    }
  }
  return v;
}

namespace {

Decomposition decompose(const Couple& c, std::span<const double> a, int lo, int hi, double shift) {
  Decomposition d;
  d.shift = shift;
  Vector ts;
  for (int nu = lo; nu <= hi; ++nu) {
    d.levels.push_back(nu);
    ts.push_back(std::exp2(nu + shift));
  }
  auto ks = parallel::k_on_grid(c, a, ts, kOne);
  const std::size_t n = a.size(), m = ts.size();
  Vector prev(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    Vector part(n);
    const Vector& cur = i + 1 == m ? Vector(a.begin(), a.end()) : ks[i].split.a0;
    for (std::size_t j = 0; j < n; ++j) part[j] = cur[j] - prev[j];
    prev = cur;
    double k = ks[i].lower > 0.0 ? ks[i].lower : ks[i].value;
    d.c_meas = std::max(d.c_meas, j_functional(c, part, ts[i], kInf) / k);
    d.parts.push_back(std::move(part));
  }
  Vector err(a.begin(), a.end());
  for (const Vector& u : d.parts) {
    for (std::size_t j = 0; j < n; ++j) err[j] -= u[j];
  }
  d.recomposition_error = k_functional(c, err, 1.0, kOne).value;
  return d;
}

int automatic_range(const Couple& c, std::span<const double> a, double eps) {
  double k1 = k_functional(c, a, 1.0, kOne).value;
  for (int l = 1; l < 60; ++l) {
    double t = std::exp2(l);
    if (k_functional(c, a, 1.0 / t, kOne).value <= eps * k1 &&
        k_functional(c, a, t, kOne).value / t <= eps * k1) {
      return l;
    }
  }
  return 60;
}

void check_nonzero(const Couple& c, std::span<const double> a) {
  check_element(c, a);
  if (std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; })) {
    throw PreconditionFailed("fundamental_decomposition: a = 0");
  }
}

}  // namespace

Decomposition fundamental_decomposition(const Couple& c, std::span<const double> a, double eps,
                                        std::optional<std::pair<int, int>> levels) {
  check_nonzero(c, a);
  if (!(eps > 0.0)) throw InvalidArgument("fundamental_decomposition: eps must be positive");
  int lo, hi;
  if (levels) {
    lo = levels->first;
    hi = levels->second;
    if (lo > hi) throw InvalidArgument("fundamental_decomposition: empty level range");
  } else {
    hi = automatic_range(c, a, eps);
    lo = -hi;
  }
  return decompose(c, a, lo, hi, 0.0);
}

GammaEstimate gamma_estimate(const Couple& c, const std::vector<Vector>& samples, double eps) {
  if (samples.empty()) throw InvalidArgument("gamma_estimate: no samples");
  GammaEstimate g;
  for (const Vector& a : samples) {
    check_nonzero(c, a);
    int l = automatic_range(c, a, eps);
    std::vector<double> shifts;
    for (int k = 0; k < 8; ++k) shifts.push_back(k / 8.0);
    Vector singles;
    if (auto curve = exact_k_curve(c, a)) {
      for (double bp : curve->breakpoints()) {
        double lg = std::log2(bp);
        shifts.push_back(lg - std::floor(lg));
        singles.push_back(bp);
      }
    }
    for (int nu = -l; nu <= l; ++nu) singles.push_back(std::exp2(nu));
    double best = std::numeric_limits<double>::infinity();
    for (double s : shifts) best = std::min(best, decompose(c, a, -l - 1, l, s).c_meas);
    for (double t : singles) {
      KResult k = k_functional(c, a, t, kOne);
      double kv = k.lower > 0.0 ? k.lower : k.value;
      best = std::min(best, j_functional(c, a, t, kInf) / kv);
    }
    g.per_sample.push_back(best);
    g.estimate = std::max(g.estimate, best);
  }
  return g;
}

}  // namespace couplekit
