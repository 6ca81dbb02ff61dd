#include "couplekit/kfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include <boost/math/tools/roots.hpp>

#include "couplekit/errors.hpp"
#include "couplekit/minimize.hpp"

namespace couplekit {

SideNorm SideNorm::weighted(Vector weights, Exponent p) {
  for (double w : weights) {
    if (!std::isfinite(w) || !(w > 0.0)) throw NonpositiveWeight("nonpositive weight");
  }
  std::size_t n = weights.size();
  return SideNorm(Kind::weighted_lp, n, std::move(weights), p);
}

SideNorm SideNorm::of(const Couple& c, Side s) { return weighted(c.weights(s), c.exponent(s)); }

SideNorm SideNorm::weak_lorentz(std::size_t n, double p) {
  if (!std::isfinite(p) || p < 1.0) throw ExponentOutOfRange("Lorentz index must lie in [1, inf)");
  return SideNorm(Kind::weak_lorentz, n, {}, Exponent::finite(p));
}

double SideNorm::operator()(std::span<const double> a) const {
  if (a.size() != dim_) throw DimensionMismatch("dimension mismatch: element length");
  if (kind_ == Kind::weighted_lp) return weighted_norm(weights_, p_, a);
  Vector b = decreasing_rearrangement(a);
  double inv = 1.0 / p_.value();
  double m = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    m = std::max(m, std::pow(static_cast<double>(k + 1), inv) * b[k]);
  }
  return m;
}

namespace {

// Split with |a1| = y, |a0| = r coordinatewise (signs follow a).
Split make_split(std::span<const double> a, const Vector& y, const Vector& r) {
  Split s;
  s.a0.resize(a.size());
  s.a1.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double sg = a[i] < 0.0 ? -1.0 : 1.0;
    s.a1[i] = sg * y[i];
    s.a0[i] = sg * r[i];
  }
  return s;
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Minimiser y in [0, A] of (w0 (A - y))^p0 + mu (w1 y)^p1, mu = exp(lambda),
// parametrised by z = logit(y / A). Returns (y, A - y).
std::pair<double, double> lagrange_coordinate(double A, double w0, double w1, double p0, double p1,
                                              double lambda) {
  if (A == 0.0) return {0.0, 0.0};
  const double k = std::log(p0) + p0 * std::log(w0) - std::log(p1) - p1 * std::log(w1) - lambda +
                   (p0 - p1) * std::log(A);
  auto L = [&](double z) { return k - (p0 - 1.0) * softplus(z) + (p1 - 1.0) * softplus(-z); };
  auto dL = [&](double z) {
    double sig = 1.0 / (1.0 + std::exp(-z));
    return -(p0 - 1.0) * sig - (p1 - 1.0) * (1.0 - sig);
  };
  if (p1 == 1.0 && k <= 0.0) return {0.0, A};
  if (p0 == 1.0 && k >= 0.0) return {A, 0.0};
  constexpr double kZmax = 740.0;
  double zl = -1.0, zr = 1.0;
  while (L(zl) <= 0.0 && zl > -kZmax) zl *= 2.0;
  while (L(zr) >= 0.0 && zr < kZmax) zr *= 2.0;
  if (L(zl) <= 0.0) return {0.0, A};
  if (L(zr) >= 0.0) return {A, 0.0};
  double z = 0.5 * (zl + zr);
  for (int it = 0; it < 200; ++it) {
    double v = L(z);
    if (v > 0.0) zl = z; else if (v < 0.0) zr = z; else break;
    double d = dL(z);
    double next = d < 0.0 ? z - v / d : 0.5 * (zl + zr);
    if (!(next > zl && next < zr)) next = 0.5 * (zl + zr);
    if (std::abs(next - z) <= 1e-14 * std::max(1.0, std::abs(z)) || zr - zl <= 1e-14 * std::max(1.0, std::abs(z))) {
      z = next;
      break;
    }
    z = next;
  }
  double y = A / (1.0 + std::exp(-z));
  double r = A / (1.0 + std::exp(z));
  return {y, r};
}

struct Frontier {
  // Evaluates one frontier point for parameter `target`; fills y, r and the
  // achieved parameter value.
  virtual ~Frontier() = default;
  virtual double hi() const = 0;
  virtual double point(double target, Vector& y, Vector& r) const = 0;
};

// Side one is l_inf(w1): a1 = clip of a at level s.
struct ClipOne : Frontier {
  const Vector& A;
  const Vector& w1;
  double S = 0.0;
  ClipOne(const Vector& A_, const Vector& w1_) : A(A_), w1(w1_) {
    for (std::size_t i = 0; i < A.size(); ++i) S = std::max(S, w1[i] * A[i]);
  }
  double hi() const override { return S; }
  double point(double s, Vector& y, Vector& r) const override {
    double achieved = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) {
      double cap = s / w1[i];
      // Compare in the weighted scale so the top level clips nothing.
      if (w1[i] * A[i] <= s) {
        y[i] = A[i];
        r[i] = 0.0;
      } else {
        y[i] = cap;
        r[i] = A[i] - cap;
      }
      achieved = std::max(achieved, w1[i] * y[i]);
    }
    return achieved;
  }
};

// Side zero is l_inf(w0): a0 = clip of a at level r.
struct ClipZero : Frontier {
  const Vector& A;
  const Vector& w0;
  double R = 0.0;
  ClipZero(const Vector& A_, const Vector& w0_) : A(A_), w0(w0_) {
    for (std::size_t i = 0; i < A.size(); ++i) R = std::max(R, w0[i] * A[i]);
  }
  double hi() const override { return R; }
  double point(double level, Vector& y, Vector& r) const override {
    double achieved = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) {
      double cap = level / w0[i];
      if (w0[i] * A[i] <= level) {
        r[i] = A[i];
        y[i] = 0.0;
      } else {
        r[i] = cap;
        y[i] = A[i] - cap;
      }
      achieved = std::max(achieved, w0[i] * r[i]);
    }
    return achieved;
  }
};

// Both sides weighted l_1: fill a1 greedily by the ratio w0/w1.
struct Greedy : Frontier {
  const Vector& A;
  const Vector& w1;
  std::vector<std::size_t> order;
  double S = 0.0;
  Greedy(const Vector& A_, const Vector& w0, const Vector& w1_) : A(A_), w1(w1_) {
    order.resize(A.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return w0[i] * w1[j] > w0[j] * w1[i];
    });
    for (std::size_t i = 0; i < A.size(); ++i) S += w1[i] * A[i];
  }
  double hi() const override { return S; }
  double point(double s, Vector& y, Vector& r) const override {
    double left = s;
    double achieved = 0.0;
    for (std::size_t i : order) {
      double cost = w1[i] * A[i];
      if (left >= cost) {
        y[i] = A[i];
        r[i] = 0.0;
        left -= cost;
      } else if (left > 0.0) {
        y[i] = left / w1[i];
        r[i] = A[i] - y[i];
        left = 0.0;
      } else {
        y[i] = 0.0;
        r[i] = A[i];
      }
      achieved += w1[i] * y[i];
    }
    return achieved;
  }
};

// Both sides finite weighted l_p (not both 1): separable Lagrangian,
// bisecting the multiplier to hit N1(a1) = s.
struct Lagrangian : Frontier {
  const Vector& A;
  const SideNorm& n1;
  const Vector& w0;
  const Vector& w1;
  double p0, p1;
  double S;
  Lagrangian(const Vector& A_, const SideNorm& n0_, const SideNorm& n1_)
      : A(A_), n1(n1_), w0(n0_.weights()), w1(n1_.weights()),
        p0(n0_.exponent().value()), p1(n1_.exponent().value()) {
    S = n1(A);
  }
  double hi() const override { return S; }
  void at(double lambda, Vector& y, Vector& r) const {
    for (std::size_t i = 0; i < A.size(); ++i) {
      auto [yi, ri] = lagrange_coordinate(A[i], w0[i], w1[i], p0, p1, lambda);
      y[i] = yi;
      r[i] = ri;
    }
  }
  double point(double s, Vector& y, Vector& r) const override {
    if (s <= 0.0) {
      std::fill(y.begin(), y.end(), 0.0);
      r = A;
      return 0.0;
    }
    if (s >= S) {
      y = A;
      std::fill(r.begin(), r.end(), 0.0);
      return S;
    }
    const double target = std::log(s);
    auto f = [&](double lambda) {
      Vector yy(A.size()), rr(A.size());
      at(lambda, yy, rr);
      double v = n1(yy);
      return (v > 0.0 ? std::log(v) : -1e300) - target;
    };
    double lo = -1.0, hi = 1.0;
    double flo = f(lo), fhi = f(hi);
    while (flo < 0.0 && lo > -1e7) { lo *= 2.0; flo = f(lo); }
    while (fhi > 0.0 && hi < 1e7) { hi *= 2.0; fhi = f(hi); }
    double lambda;
    if (flo < 0.0) {
      lambda = lo;
    } else if (fhi > 0.0) {
      lambda = hi;
    } else {
      std::uintmax_t iters = 200;
      auto br = boost::math::tools::toms748_solve(
          f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), iters);
      lambda = 0.5 * (br.first + br.second);
    }
    at(lambda, y, r);
    return n1(y);
  }
};

}  // namespace

KResult k_functional(const SideNorm& n0, const SideNorm& n1, std::span<const double> a, double t,
                     Exponent p, const KOptions& opt) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("t must be positive");
  if (!(opt.tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (a.size() != n0.dim() || a.size() != n1.dim()) {
    throw DimensionMismatch("dimension mismatch: element length");
  }
  for (double x : a) {
    if (!std::isfinite(x)) throw InvalidArgument("element entries must be finite");
  }
  const std::size_t n = a.size();
  Vector A(n);
  for (std::size_t i = 0; i < n; ++i) A[i] = std::abs(a[i]);

  KResult out;
  if (std::all_of(A.begin(), A.end(), [](double x) { return x == 0.0; })) {
    out.split.a0.assign(n, 0.0);
    out.split.a1.assign(n, 0.0);
    return out;
  }

  const Exponent inf = Exponent::infinity();
  const Exponent one = Exponent::finite(1.0);
  std::unique_ptr<Frontier> fr;
  bool level_is_side_one = true;
  if (n1.is_weighted(inf)) {
    fr = std::make_unique<ClipOne>(A, n1.weights());
  } else if (n0.is_weighted(inf) && n1.kind() == SideNorm::Kind::weighted_lp) {
    fr = std::make_unique<ClipZero>(A, n0.weights());
    level_is_side_one = false;
  } else if (n0.is_weighted(one) && n1.is_weighted(one)) {
    fr = std::make_unique<Greedy>(A, n0.weights(), n1.weights());
  } else if (n0.kind() == SideNorm::Kind::weighted_lp && n1.kind() == SideNorm::Kind::weighted_lp) {
    fr = std::make_unique<Lagrangian>(A, n0, n1);
  } else {
    throw Unsupported("K-functional: this pair of side norms is not supported");
  }

  // g(level) = combine(N0(a0), t N1(a1)) along the frontier; convex in the
  // level because the frontier is the value function of a convex problem.
  std::vector<std::pair<double, Split>> seen;
  auto g = [&](double target) {
    Vector y(n), r(n);
    double x = fr->point(target, y, r);
    double v = level_is_side_one ? lp_combine(n0(r), t * x, p) : lp_combine(x, t * n1(y), p);
    Split s = make_split(a, y, r);
    s.value = v;
    seen.emplace_back(x, std::move(s));
    return ConvexSample{x, v};
  };
  ConvexMinimum m = minimize_convex(g, 0.0, fr->hi(), opt.tol, opt.max_evaluations,
                                    level_is_side_one ? TiePreference::left : TiePreference::right);
  out.value = m.value;
  out.lower = m.lower;
  out.evaluations = m.evaluations;
  for (auto& [x, s] : seen) {
    if (x == m.x && s.value == m.value) {
      out.split = std::move(s);
      break;
    }
  }
  if (out.split.a0.empty()) throw InternalError("K-functional: optimal split not recorded");
  return out;
}

KResult k_functional(const Couple& c, std::span<const double> a, double t, Exponent p,
                     const KOptions& opt) {
  check_element(c, a);
  return k_functional(SideNorm::of(c, Side::zero), SideNorm::of(c, Side::one), a, t, p, opt);
}

double j_functional(const Couple& c, std::span<const double> a, double t, Exponent p) {
  if (!(t > 0.0)) throw InvalidArgument("t must be positive");
  check_element(c, a);
  return lp_combine(side_norm(c, Side::zero, a), t * side_norm(c, Side::one, a), p);
}

Rearrangement rearrange(std::span<const double> a) {
  Rearrangement r;
  r.order.resize(a.size());
  std::iota(r.order.begin(), r.order.end(), 0);
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::size_t i, std::size_t j) { return std::abs(a[i]) > std::abs(a[j]); });
  r.values.resize(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r.values[k] = std::abs(a[r.order[k]]);
  return r;
}

Vector decreasing_rearrangement(std::span<const double> a) { return rearrange(a).values; }

double k_l1_linf(std::span<const double> a, double t) {
  if (!(t > 0.0)) throw InvalidArgument("t must be positive");
  Vector s = decreasing_rearrangement(a);
  const double n = static_cast<double>(s.size());
  double sum = 0.0;
  if (t >= n) {
    for (double x : s) sum += x;
    return sum;
  }
  std::size_t m = static_cast<std::size_t>(std::floor(t));
  for (std::size_t i = 0; i < m; ++i) sum += s[i];
  return sum + (t - static_cast<double>(m)) * s[m];
}

ConcaveCurve k_l1_linf_curve(std::span<const double> a) {
  Vector s = decreasing_rearrangement(a);
  if (s.empty()) throw InvalidArgument("empty element");
  std::vector<double> ts(s.size()), vs(s.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sum += s[i];
    ts[i] = static_cast<double>(i + 1);
    vs[i] = sum;
  }
  return ConcaveCurve(0.0, std::move(ts), std::move(vs), s[0], 0.0);
}

double k_equal_exponent(const Couple& c, std::span<const double> a, double t) {
  if (!(t > 0.0)) throw InvalidArgument("t must be positive");
  if (!(c.p0() == c.p1())) throw InvalidArgument("exponent mismatch: k_equal_exponent needs p0 = p1");
  check_element(c, a);
  const Exponent p = c.p0();
  Vector coef(c.dim());
  for (std::size_t i = 0; i < c.dim(); ++i) {
    double u = c.w0()[i], v = t * c.w1()[i];
    double lo = std::min(u, v), hi = std::max(u, v);
    if (p.is_one()) {
      coef[i] = lo;
    } else if (p.is_infinite()) {
      coef[i] = lo / (1.0 + lo / hi);
    } else {
      double q = p.conjugate().value();
      coef[i] = lo * std::pow(1.0 + std::pow(lo / hi, q), -1.0 / q);
    }
  }
  return weighted_norm(coef, p, a);
}

bool has_exact_k_curve(const Couple& c) {
  auto ok = [](Exponent e) { return e.is_one() || e.is_infinite(); };
  return ok(c.p0()) && ok(c.p1());
}

std::optional<ConcaveCurve> exact_k_curve(const Couple& c, std::span<const double> a) {
  if (!has_exact_k_curve(c)) return std::nullopt;
  check_element(c, a);
  const std::size_t n = c.dim();
  Vector A(n);
  for (std::size_t i = 0; i < n; ++i) A[i] = std::abs(a[i]);
  if (std::all_of(A.begin(), A.end(), [](double x) { return x == 0.0; })) {
    return ConcaveCurve::linear(0.0, 0.0);
  }
  const SideNorm n0 = SideNorm::of(c, Side::zero), n1 = SideNorm::of(c, Side::one);
  const Vector &w0 = c.w0(), &w1 = c.w1();
  std::vector<std::pair<double, double>> lines;
  Vector y(n), r(n);
  // Every frontier vertex gives a line N0(a0) + t N1(a1); K_1 is their lower envelope.
  if (c.p1().is_infinite()) {
    ClipOne fr(A, w1);
    std::vector<double> levels{0.0};
    for (std::size_t i = 0; i < n; ++i) levels.push_back(w1[i] * A[i]);
    if (c.p0().is_infinite()) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          double di = w0[i] / w1[i], dj = w0[j] / w1[j];
          if (di == dj) continue;
          double s = (w0[i] * A[i] - w0[j] * A[j]) / (di - dj);
          if (s > 0.0 && s < fr.hi()) levels.push_back(s);
        }
      }
    }
    for (double s : levels) {
      double x = fr.point(s, y, r);
      lines.emplace_back(n0(r), x);
    }
  } else if (c.p0().is_infinite()) {
    ClipZero fr(A, w0);
    std::vector<double> levels{0.0};
    for (std::size_t i = 0; i < n; ++i) levels.push_back(w0[i] * A[i]);
    for (double level : levels) {
      double x = fr.point(level, y, r);
      lines.emplace_back(x, n1(y));
    }
  } else {
    Greedy fr(A, w0, w1);
    double acc = 0.0;
    lines.emplace_back(n0(A), 0.0);
    for (std::size_t i : fr.order) {
      acc += w1[i] * A[i];
      fr.point(acc, y, r);
      lines.emplace_back(n0(r), acc);
    }
    lines.emplace_back(0.0, fr.hi());
  }
  return lower_envelope(lines).simplified();
}

Vector realize_k(const ConcaveCurve& phi) {
  double scale = 1.0;
  for (double v : phi.values()) scale = std::max(scale, std::abs(v));
  if (std::abs(phi.origin()) > 1e-12 * scale) {
    throw InvalidArgument("inadmissible curve: phi(0+)≠0");
  }
  for (double t : phi.breakpoints()) {
    if (std::abs(t - std::round(t)) > 1e-12 * t) {
      throw InvalidArgument("inadmissible curve: breakpoint " + std::to_string(t) +
                            " is not an integer");
    }
  }
  if (phi.terminal_slope() != 0.0) {
    throw InvalidArgument("inadmissible curve: phi is not eventually constant");
  }
  if (phi.breakpoints().empty()) return Vector{0.0};
  const std::size_t n = static_cast<std::size_t>(std::llround(phi.breakpoints().back()));
  Vector a(n);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double cur = phi(static_cast<double>(i + 1));
    a[i] = cur - prev;
    prev = cur;
  }
  return a;
}

ConeKind parse_cone_kind(const std::string& name) {
  if (name == "halfline") return ConeKind::halfline;
  if (name == "unit_interval") return ConeKind::unit_interval;
  if (name == "discrete") return ConeKind::discrete;
  throw InvalidArgument("unknown cone kind '" + name + "'");
}

bool cone_membership(const ConcaveCurve& phi, ConeKind kind) {
  double scale = 1.0;
  for (double v : phi.values()) scale = std::max(scale, std::abs(v));
  const bool vanishes_at_zero = std::abs(phi.origin()) <= 1e-12 * scale;
  switch (kind) {
    case ConeKind::halfline:
      return vanishes_at_zero;
    case ConeKind::unit_interval: {
      bool flat_after_one = phi.terminal_slope() == 0.0 &&
                            (phi.breakpoints().empty() || phi.breakpoints().back() <= 1.0);
      return vanishes_at_zero && flat_after_one;
    }
    case ConeKind::discrete:
      return vanishes_at_zero &&
             std::all_of(phi.breakpoints().begin(), phi.breakpoints().end(),
                         [](double t) { return std::abs(t - std::round(t)) <= 1e-12 * t; });
  }
  throw InvalidArgument("unknown cone kind");
}

}  // namespace couplekit
