#include "couplekit/interp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "couplekit/errors.hpp"
#include "couplekit/kfun.hpp"

namespace couplekit {

namespace {

const Exponent kOne = Exponent::finite(1.0);

bool vanishes(const ConcaveCurve& phi) {
  if (phi.origin() != 0.0 || phi.terminal_slope() != 0.0) return false;
  if (phi.breakpoints().empty()) return phi.initial_slope() == 0.0;
  return std::all_of(phi.values().begin(), phi.values().end(), [](double v) { return v == 0.0; });
}

// int_l^r t^(-theta q - 1) (alpha + beta t)^q dt.
double piece_integral(double l, double r, double alpha, double beta, double theta, double q) {
  if (q == std::floor(q) && q <= 64.0) {
    const int qi = static_cast<int>(q);
    double sum = 0.0, binom = 1.0;
    for (int k = 0; k <= qi; ++k) {
      double e = k - theta * q;
      double ik = e == 0.0 ? std::log(r / l)
                           : std::pow(l, e) * std::expm1(e * std::log(r / l)) / e;
      double coef = binom * std::pow(alpha, qi - k) * std::pow(beta, k);
      if (coef != 0.0) sum += coef * ik;
      binom = binom * (qi - k) / (k + 1);
    }
    return sum;
  }
  // Integrate in u = log t, where the integrand is smooth and bounded.
  auto f = [&](double u) {
    double t = std::exp(u);
    return std::pow(std::pow(t, -theta) * (alpha + beta * t), q);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, std::log(l),
                                                                       std::log(r), 15, 1e-14);
}

}  // namespace

void check_params(const KMethodParams& params) {
  if (!(params.theta > 0.0 && params.theta < 1.0)) {
    throw InvalidArgument("theta must lie in (0, 1)");
  }
}

double k_space_norm(const ConcaveCurve& phi, const KMethodParams& params) {
  check_params(params);
  if (vanishes(phi)) return 0.0;
  const double theta = params.theta;
  const auto& ts = phi.breakpoints();
  const auto& vs = phi.values();
  if (phi.origin() > 0.0 || phi.terminal_slope() > 0.0 || ts.empty()) {
    throw InvalidArgument("k_space_norm: the integral diverges for this curve");
  }
  if (params.q.is_infinite()) {
    double s = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) s = std::max(s, std::pow(ts[i], -theta) * vs[i]);
    return s;
  }
  const double q = params.q.value();
  const std::vector<double> slopes = phi.slopes();
  // First piece phi = beta t, last piece constant.
  double sum = std::pow(slopes.front(), q) * std::pow(ts.front(), q * (1.0 - theta)) /
               (q * (1.0 - theta));
  sum += std::pow(vs.back(), q) * std::pow(ts.back(), -theta * q) / (theta * q);
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    double beta = slopes[i + 1];
    double alpha = std::max(0.0, vs[i] - beta * ts[i]);
    sum += piece_integral(ts[i], ts[i + 1], alpha, beta, theta, q);
  }
  return std::pow(sum, 1.0 / q);
}

double k_space_norm(const Couple& c, std::span<const double> a, const KMethodParams& params) {
  auto curve = exact_k_curve(c, a);
  if (!curve) throw Unsupported("k_space_norm: no exact K-curve for this couple");
  return k_space_norm(*curve, params);
}

double normalized_k_space_norm(const ConcaveCurve& phi, const KMethodParams& params) {
  double norm = k_space_norm(phi, params);
  if (params.q.is_infinite()) return norm;
  const double q = params.q.value();
  return std::pow(params.theta * (1.0 - params.theta) * q, 1.0 / q) * norm;
}

InterpolationRatio interpolation_property_check(const LinearMap& t,
                                                const std::vector<Vector>& samples,
                                                const KMethodParams& params) {
  check_params(params);
  if (operator_norm_l(t).upper > 1.0 + 1e-12) {
    throw PreconditionFailed("interpolation_property_check: the l-norm of T exceeds 1");
  }
  InterpolationRatio r;
  for (const Vector& a : samples) {
    double na = k_space_norm(t.source(), a, params);
    if (na == 0.0) continue;
    double nt = k_space_norm(t.target(), t.apply(a), params);
    r.ratio = std::max(r.ratio, nt / na);
  }
  r.ok = r.ratio <= 1.0 + 1e-9;
  return r;
}

SubcoupleNormVerdict subcouple_norm_check(const SubcoupleSpec& spec, const KMethodParams& params,
                                          const std::vector<Vector>& samples) {
  check_params(params);
  const Couple& amb = spec.ambient();
  if (!has_exact_k_curve(amb)) {
    throw Unsupported("subcouple_norm_check: no exact K-curve for the ambient couple");
  }
  if (!spec.is_coordinate() && spec.dim() != 1) {
    throw Unsupported("subcouple_norm_check: spans of more than one vector");
  }
  SubcoupleNormVerdict v;
  for (const Vector& x : samples) {
    if (x.size() != spec.dim()) throw DimensionMismatch("subcouple_norm_check: coefficient length");
    Vector full = spec.embed(x);
    double na = k_space_norm(amb, full, params);
    double ns;
    if (spec.is_coordinate()) {
      ns = k_space_norm(spec.restricted(), x, params);
    } else {
      // K(t, x v) restricted to the line is |x| min(N0(v), t N1(v)).
      Vector v1(full);
      double n0 = side_norm(amb, Side::zero, v1), n1 = side_norm(amb, Side::one, v1);
      ns = n0 == 0.0 ? 0.0
                     : k_space_norm(ConcaveCurve::from_values(0.0, {n0 / n1}, {n0}, 0.0), params);
    }
    if (na == 0.0 && ns == 0.0) continue;
    double gap = (ns - na) / na;
    v.max_gap = std::max(v.max_gap, gap);
    if (std::abs(gap) > 1e-8) v.equal = false;
    if (gap < -1e-12) v.inclusion = false;
  }
  return v;
}

LorentzComparison lorentz_k_equiv(double p0, Exponent p1, std::span<const double> b,
                                  std::span<const double> ts) {
  if (!(p0 >= 1.0) || !std::isfinite(p0)) throw ExponentOutOfRange("lorentz_k_equiv: p0 in [1, inf)");
  if (!p1.is_infinite()) throw Unsupported("lorentz_k_equiv: only p1 = inf");
  if (b.empty()) throw InvalidArgument("lorentz_k_equiv: empty vector");
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!(b[i] >= 0.0) || !std::isfinite(b[i]) || (i > 0 && b[i] > b[i - 1])) {
      throw InvalidArgument("lorentz_k_equiv: b must be nonnegative and nonincreasing");
    }
  }
  LorentzComparison out;
  if (ts.empty()) {
    for (int k = -12; k <= 12; ++k) out.ts.push_back(std::exp2(k));
  } else {
    out.ts.assign(ts.begin(), ts.end());
  }
  const std::size_t n = b.size();
  SideNorm n0 = SideNorm::weak_lorentz(n, p0);
  SideNorm n1 = SideNorm::weighted(Vector(n, 1.0), p1);
  out.min_ratio = std::numeric_limits<double>::infinity();
  out.max_ratio = 0.0;
  for (double t : out.ts) {
    double lhs = k_functional(n0, n1, b, t, kOne).value;
    double rhs = 0.0;
    for (std::size_t x = 1; x <= n; ++x) {
      double xd = static_cast<double>(x);
      rhs = std::max(rhs, b[x - 1] / (std::pow(xd, -1.0 / p0) + 1.0 / t));
    }
    out.lhs.push_back(lhs);
    out.rhs.push_back(rhs);
    if (lhs == 0.0 && rhs == 0.0) continue;
    double r = rhs / lhs;
    out.min_ratio = std::min(out.min_ratio, r);
    out.max_ratio = std::max(out.max_ratio, r);
  }
  if (out.max_ratio == 0.0) out.min_ratio = out.max_ratio = 1.0;
  out.within_window = out.min_ratio >= 0.125 && out.max_ratio <= 8.0;
  return out;
}

}  // namespace couplekit
