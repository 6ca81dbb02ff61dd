#include "couplekit/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <bit>
#include <cstdint>

#include <boost/math/tools/roots.hpp>

#include "couplekit/errors.hpp"
#include "couplekit/minimize.hpp"

namespace couplekit {

namespace {

const Exponent kOne = Exponent::finite(1.0);
const Exponent kInf = Exponent::infinity();

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

double pnorm(const Eigen::VectorXd& v, Exponent p) {
  if (p.is_infinite()) return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
  if (p.is_one()) return v.cwiseAbs().sum();
  Vector ones(static_cast<std::size_t>(v.size()), 1.0);
  return weighted_norm(ones, p, as_span(v));
}

// Dual vector of y in l_q: <z, y> = ||y||_q, ||z||_q' = 1.
Eigen::VectorXd dual_direction(const Eigen::VectorXd& y, double q) {
  double norm = pnorm(y, Exponent::finite(q));
  Eigen::VectorXd z = Eigen::VectorXd::Zero(y.size());
  if (norm == 0.0) return z;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double r = std::abs(y(i)) / norm;
    z(i) = std::copysign(std::pow(r, q - 1.0), y(i));
  }
  return z;
}

// max over s in {-1, 1}^m of ||M s||_q, by Gray-code enumeration.
double sign_vector_max(const Eigen::MatrixXd& m, Exponent q) {
  const Eigen::Index cols = m.cols();
  if (cols == 0) return 0.0;
  Eigen::VectorXd s = Eigen::VectorXd::Ones(cols);
  Eigen::VectorXd y = m * s;
  double best = pnorm(y, q);
  // The first sign stays +1: ||M(-s)|| = ||M s||.
  const std::uint64_t count = std::uint64_t{1} << (cols - 1);
  for (std::uint64_t k = 1; k < count; ++k) {
    int j = std::countr_zero(k) + 1;
    s(j) = -s(j);
    if (k % 1024 == 0) {
      y = m * s;  // refresh to stop rounding drift
    } else {
      y += 2.0 * s(j) * m.col(j);
    }
    best = std::max(best, pnorm(y, q));
  }
  return best;
}

constexpr Eigen::Index kSignLimit = 20;

NormBound holder_bounds(const Eigen::MatrixXd& m, Exponent p, Exponent q) {
  Exponent pc = p.conjugate();
  Eigen::VectorXd rows(m.rows()), cols(m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows(i) = pnorm(m.row(i).transpose(), pc);
  for (Eigen::Index j = 0; j < m.cols(); ++j) cols(j) = pnorm(m.col(j), q);
  NormBound b;
  b.upper = std::min(pnorm(rows, q), pnorm(cols, pc));
  // Unit vectors e_j have norm 1 in any l_p.
  b.lower = m.cols() ? cols.maxCoeff() : 0.0;
  return b;
}

// Power iteration for the l_p -> l_q norm (1 < p, q < inf).
double power_iteration_lower(const Eigen::MatrixXd& m, Exponent p, Exponent q) {
  double best = 0.0;
  const double qv = q.value();
  const double pc = p.conjugate().value();
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Ones(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) starts.push_back(Eigen::VectorXd::Unit(m.cols(), j));
  for (auto x : starts) {
    x /= pnorm(x, p);
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd y = m * x;
      double val = pnorm(y, q);
      best = std::max(best, val);
      if (val == 0.0) break;
      Eigen::VectorXd w = m.transpose() * dual_direction(y, qv);
      if (pnorm(w, Exponent::finite(pc)) == 0.0) break;
      Eigen::VectorXd next = dual_direction(w, pc);
      if ((next - x).cwiseAbs().maxCoeff() <= 1e-15) break;
      x = next;
    }
  }
  return best;
}

NormBound unweighted_norm(const Eigen::MatrixXd& m, Exponent p, Exponent q) {
  NormBound b;
  if (m.size() == 0) return b;
  if (p.is_one()) {
    double v = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) v = std::max(v, pnorm(m.col(j), q));
    b.lower = b.upper = v;
  } else if (q.is_infinite()) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      v = std::max(v, pnorm(m.row(i).transpose(), p.conjugate()));
    }
    b.lower = b.upper = v;
  } else if (!p.is_infinite() && p.value() == 2.0 && q.value() == 2.0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    b.lower = b.upper = svd.singularValues()(0);
  } else if (p.is_infinite() && m.cols() <= kSignLimit) {
    b.lower = b.upper = sign_vector_max(m, q);
  } else if (q.is_one() && m.rows() <= kSignLimit) {
    Eigen::MatrixXd mt = m.transpose();
    b.lower = b.upper = sign_vector_max(mt, p.conjugate());
  } else {
    b = holder_bounds(m, p, q);
    if (!p.is_infinite() && !q.is_one()) {
      b.lower = std::max(b.lower, power_iteration_lower(m, p, q));
    }
    b.lower = std::min(b.lower, b.upper);
  }
  return b;
}

void check_coordinate_list(std::size_t n, const std::vector<std::size_t>& idx, const char* what) {
  std::vector<std::size_t> sorted(idx);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument(std::string(what) + ": repeated coordinate");
  }
  if (!sorted.empty() && sorted.back() >= n) {
    throw DimensionMismatch(std::string(what) + ": coordinate out of range");
  }
}

Vector to_vector(const Eigen::VectorXd& v) { return Vector(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

LinearMap::LinearMap(Eigen::MatrixXd matrix, Couple source, Couple target)
    : m_(std::move(matrix)), source_(std::move(source)), target_(std::move(target)) {
  if (m_.rows() != static_cast<Eigen::Index>(target_.dim()) ||
      m_.cols() != static_cast<Eigen::Index>(source_.dim())) {
    throw DimensionMismatch("matrix shape does not match the couples");
  }
  if (!m_.allFinite()) throw InvalidArgument("matrix entries must be finite");
}

Vector LinearMap::apply(std::span<const double> a) const {
  check_element(source_, a);
  return to_vector(m_ * to_eigen(a));
}

LinearMap compose(const LinearMap& s, const LinearMap& t) {
  if (s.source().dim() != t.target().dim()) {
    throw DimensionMismatch("maps are not composable");
  }
  return LinearMap(s.matrix() * t.matrix(), t.source(), s.target());
}

LinearMap identity_map(const Couple& c) {
  auto n = static_cast<Eigen::Index>(c.dim());
  return LinearMap(Eigen::MatrixXd::Identity(n, n), c, c);
}

NormBound side_operator_norm(const LinearMap& t, Side s) {
  const Vector& w = t.source().weights(s);
  const Vector& v = t.target().weights(s);
  Eigen::MatrixXd m = t.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) *= v[i];
  for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) /= w[j];
  return unweighted_norm(m, t.source().exponent(s), t.target().exponent(s));
}

NormBound operator_norm_l(const LinearMap& t) {
  NormBound b0 = side_operator_norm(t, Side::zero);
  NormBound b1 = side_operator_norm(t, Side::one);
  return {std::max(b0.lower, b1.lower), std::max(b0.upper, b1.upper)};
}

double operator_norm_b_lower(const LinearMap& t, const std::vector<Vector>& samples,
                             std::span<const double> ts, const KOptions& opt) {
  double best = 0.0;
  for (const Vector& a : samples) {
    Vector ta = t.apply(a);
    for (double s : ts) {
      KResult ka = k_functional(t.source(), a, s, kOne, opt);
      if (ka.value == 0.0) continue;
      KResult kb = k_functional(t.target(), ta, s, kOne, opt);
      best = std::max(best, kb.lower / ka.value);
    }
  }
  return best;
}

SubcoupleSpec SubcoupleSpec::coordinates(const Couple& ambient, std::vector<std::size_t> keep) {
  if (keep.empty()) throw InvalidArgument("subcouple: keep must be nonempty");
  check_coordinate_list(ambient.dim(), keep, "subcouple");
  std::sort(keep.begin(), keep.end());
  auto n = static_cast<Eigen::Index>(ambient.dim());
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) basis(keep[j], j) = 1.0;
  return SubcoupleSpec(ambient, true, std::move(keep), std::move(basis));
}

SubcoupleSpec SubcoupleSpec::span(const Couple& ambient, const std::vector<Vector>& basis) {
  if (basis.empty()) throw InvalidArgument("subcouple: basis must be nonempty");
  if (basis.size() > 3) throw Unsupported("subcouple: spans of more than three vectors");
  auto n = static_cast<Eigen::Index>(ambient.dim());
  Eigen::MatrixXd b(n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    check_element(ambient, basis[j]);
    b.col(static_cast<Eigen::Index>(j)) = to_eigen(basis[j]);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
  if (lu.rank() != b.cols()) throw InvalidArgument("subcouple: basis is linearly dependent");
  return SubcoupleSpec(ambient, false, {}, std::move(b));
}

Vector SubcoupleSpec::embed(std::span<const double> coeffs) const {
  if (coeffs.size() != dim()) throw DimensionMismatch("subcouple: wrong number of coefficients");
  return to_vector(basis_ * to_eigen(coeffs));
}

Couple SubcoupleSpec::restricted() const {
  if (!coordinate_) throw InvalidArgument("subcouple: not a coordinate subcouple");
  return ambient_.restricted(keep_);
}

double subcouple_k(const SubcoupleSpec& spec, std::span<const double> coeffs, double t) {
  if (!(t > 0.0)) throw InvalidArgument("t must be positive");
  if (coeffs.size() != spec.dim()) {
    throw DimensionMismatch("subcouple: wrong number of coefficients");
  }
  const Couple& c = spec.ambient();
  if (spec.is_coordinate()) return k_functional(spec.restricted(), coeffs, t, kOne).value;
  const Eigen::MatrixXd& b = spec.basis();
  if (spec.dim() == 1) {
    Eigen::VectorXd v = b.col(0);
    double n0 = side_norm(c, Side::zero, as_span(v));
    double n1 = side_norm(c, Side::one, as_span(v));
    return std::abs(coeffs[0]) * std::min(n0, t * n1);
  }
  Eigen::VectorXd x = to_eigen(coeffs);
  Eigen::VectorXd bx = b * x;
  double base = side_norm(c, Side::zero, as_span(bx));
  if (base == 0.0) return 0.0;
  // Any y better than y = 0 keeps N0(B(x - y)) <= N0(Bx), which bounds |x - y|.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  double wmin = *std::min_element(c.w0().begin(), c.w0().end());
  double radius = 1.01 * std::sqrt(static_cast<double>(c.dim())) * base / (wmin * smin);
  Vector lo(spec.dim()), hi(spec.dim());
  for (std::size_t j = 0; j < spec.dim(); ++j) {
    lo[j] = x(j) - radius;
    hi[j] = x(j) + radius;
  }
  auto f = [&](std::span<const double> y) {
    Eigen::VectorXd ye = to_eigen(y);
    Eigen::VectorXd a1 = b * ye;
    Eigen::VectorXd a0 = bx - a1;
    return side_norm(c, Side::zero, as_span(a0)) + t * side_norm(c, Side::one, as_span(a1));
  };
  BoxMinimum m = minimize_box(f, lo, hi);
  return std::min(m.value, base);
}

SubcoupleVerdict is_b_subcouple(const SubcoupleSpec& spec, const std::vector<Vector>& samples,
                                std::span<const double> ts, double rel_tol) {
  SubcoupleVerdict v;
  for (const Vector& x : samples) {
    Vector a = spec.embed(x);
    for (double t : ts) {
      double ks = subcouple_k(spec, x, t);
      KResult ka = k_functional(spec.ambient(), a, t, kOne);
      if (ka.value == 0.0) continue;
      // Restricting the splits can only increase K.
      if (ka.lower > ks * (1.0 + 1e-8) + 1e-300) {
        throw InternalError("subcouple K below ambient K");
      }
      double gap = (ks - ka.value) / ka.value;
      v.max_gap = std::max(v.max_gap, gap);
      if (gap > rel_tol && v.is_b) {
        v.is_b = false;
        v.witness = x;
        v.witness_t = t;
      }
    }
  }
  return v;
}

Couple quotient_couple(const Couple& ambient, const std::vector<std::size_t>& kill) {
  check_coordinate_list(ambient.dim(), kill, "quotient");
  if (kill.size() >= ambient.dim()) throw InvalidArgument("quotient: cannot kill every coordinate");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < ambient.dim(); ++i) {
    if (std::find(kill.begin(), kill.end(), i) == kill.end()) keep.push_back(i);
  }
  return ambient.restricted(keep);
}

Vector quotient_class(std::size_t n, const std::vector<std::size_t>& kill,
                      std::span<const double> a) {
  if (a.size() != n) throw DimensionMismatch("quotient: element has the wrong length");
  check_coordinate_list(n, kill, "quotient");
  Vector out;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::find(kill.begin(), kill.end(), i) == kill.end()) out.push_back(a[i]);
  }
  return out;
}

QuotientVerdict is_b_quotient(const Couple& ambient, const std::vector<std::size_t>& kill,
                              const std::vector<Vector>& samples, std::span<const double> ts,
                              double rel_tol) {
  Couple q = quotient_couple(ambient, kill);
  if (kill.size() > 2) throw Unsupported("quotient check: more than two killed coordinates");
  QuotientVerdict v;
  for (const Vector& b : samples) {
    check_element(ambient, b);
    Vector cls = quotient_class(ambient.dim(), kill, b);
    double scale = 0.0;
    for (double x : b) scale = std::max(scale, std::abs(x));
    const double radius = 2.0 * scale + 1.0;
    for (double t : ts) {
      double kq = k_functional(q, cls, t, kOne).value;
      auto shifted = [&](std::span<const double> c) {
        Vector x(b);
        for (std::size_t j = 0; j < kill.size(); ++j) x[kill[j]] += c[j];
        return k_functional(ambient, x, t, kOne).value;
      };
      double kinf = k_functional(ambient, b, t, kOne).value;
      if (!kill.empty()) {
        Vector lo(kill.size(), -radius), hi(kill.size(), radius);
        kinf = std::min(kinf, minimize_box(shifted, lo, hi, 60).value);
      }
      double denom = std::max(kq, kinf);
      if (denom == 0.0) continue;
      double gap = std::abs(kq - kinf) / denom;
      v.max_gap = std::max(v.max_gap, gap);
      if (gap > rel_tol && v.is_b) {
        v.is_b = false;
        v.witness = b;
        v.witness_t = t;
      }
    }
  }
  return v;
}

RetractKind parse_retract_kind(const std::string& name) {
  if (name == "l") return RetractKind::l;
  if (name == "b") return RetractKind::b;
  if (name == "lb") return RetractKind::lb;
  if (name == "bl") return RetractKind::bl;
  throw InvalidArgument("unknown retract kind: " + name);
}

RetractVerdict retract_check(const LinearMap& alpha, const LinearMap& beta, RetractKind kind,
                             const std::vector<Vector>& samples_a,
                             const std::vector<Vector>& samples_b, std::span<const double> ts) {
  if (alpha.target().dim() != beta.source().dim() ||
      beta.target().dim() != alpha.source().dim()) {
    throw DimensionMismatch("retract: alpha and beta shapes do not compose to an identity");
  }
  RetractVerdict v;
  Eigen::MatrixXd ba = beta.matrix() * alpha.matrix();
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(ba.rows(), ba.cols());
  if ((ba - id).cwiseAbs().maxCoeff() > 1e-12) {
    v.ok = false;
    v.failed_clause = "not identity";
    return v;
  }
  const bool alpha_l = kind == RetractKind::l || kind == RetractKind::lb;
  const bool beta_l = kind == RetractKind::l || kind == RetractKind::bl;
  auto passes = [&](const LinearMap& m, bool l_category, const std::vector<Vector>& samples) {
    if (l_category) return operator_norm_l(m).upper <= 1.0 + 1e-12;
    return operator_norm_b_lower(m, samples, ts) <= 1.0 + 1e-9;
  };
  if (!passes(alpha, alpha_l, samples_a)) {
    v.ok = false;
    v.failed_clause = "alpha norm";
  } else if (!passes(beta, beta_l, samples_b)) {
    v.ok = false;
    v.failed_clause = "beta norm";
  }
  return v;
}

LinearMap coordinate_injection(const SubcoupleSpec& spec) {
  return LinearMap(spec.basis(), spec.restricted(), spec.ambient());
}

LinearMap coordinate_projection(const SubcoupleSpec& spec) {
  return LinearMap(spec.basis().transpose(), spec.ambient(), spec.restricted());
}

namespace {

// Sublinear bound P(b) = omega0 K(omega1 / omega0, b).
struct Majorant {
  const Couple& c;
  double omega0;
  double omega1;
  double operator()(const Eigen::VectorXd& b) const {
    return omega0 * k_functional(c, as_span(b), omega1 / omega0, kOne).value;
  }
};

// inf over x of P(B x + e) - <f, x>, searched in a box that grows until the
// minimiser is interior.
double extension_infimum(const Majorant& p, const Eigen::MatrixXd& b, const Eigen::VectorXd& f,
                         const Eigen::VectorXd& e) {
  const auto k = static_cast<std::size_t>(b.cols());
  double pmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < b.cols(); ++j) pmin = std::min(pmin, p(b.col(j)));
  double radius = 4.0 * std::max(p(e), 1e-300) / pmin;
  auto g = [&](std::span<const double> x) {
    Eigen::VectorXd xe = to_eigen(x);
    return p(b * xe + e) - f.dot(xe);
  };
  double best = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 24; ++round) {
    Vector lo(k, -radius), hi(k, radius);
    BoxMinimum m = minimize_box(g, lo, hi, k == 1 ? 120 : 70);
    best = std::min(best, m.value);
    double reach = 0.0;
    for (double xi : m.x) reach = std::max(reach, std::abs(xi));
    if (reach < 0.9 * radius) break;
    radius *= 16.0;
  }
  return best;
}

struct Interval {
  double lo;
  double hi;
};

// Final step: the functional on the whole space is g_f + c z; its two dual
// norms bound the feasible c.
Interval last_step_interval(const Couple& c, double omega0, double omega1,
                            const Eigen::VectorXd& gf, const Eigen::VectorXd& z) {
  auto ratio = [&](double x) {
    Eigen::VectorXd g = gf + x * z;
    return std::max(dual_side_norm(c, Side::zero, as_span(g)) / omega0,
                    dual_side_norm(c, Side::one, as_span(g)) / omega1);
  };
  double reach = std::numeric_limits<double>::infinity();
  for (Side s : {Side::zero, Side::one}) {
    double om = s == Side::zero ? omega0 : omega1;
    double nz = dual_side_norm(c, s, as_span(z));
    reach = std::min(reach, (om + dual_side_norm(c, s, as_span(gf))) / nz);
  }
  // Strictly infeasible at both ends, not just on the boundary.
  reach = 2.0 * reach + 1.0;
  double best = 0.0;
  double center = golden_argmin(ratio, -reach, reach, 200, &best);
  if (best > 1.0 + 1e-9) {
    throw PreconditionFailed("hahn_banach_extend: no extension satisfies the bound");
  }
  auto shifted = [&](double x) { return ratio(x) - 1.0; };
  if (shifted(center) >= 0.0) return {center, center};
  boost::math::tools::eps_tolerance<double> tol(50);
  auto left = boost::math::tools::bisect(shifted, -reach, center, tol);
  auto right = boost::math::tools::bisect(shifted, center, reach, tol);
  // Take the feasible side of each bracket.
  return {left.second, right.first};
}

}  // namespace

Extension hahn_banach_extend(const Couple& ambient, const std::vector<Vector>& basis,
                             const Vector& values, double omega0, double omega1) {
  const std::size_t n = ambient.dim();
  if (!(omega0 > 0.0) || !(omega1 > 0.0)) throw NonpositiveWeight("omega must be positive");
  if (basis.empty()) throw InvalidArgument("hahn_banach_extend: empty subspace");
  if (basis.size() != values.size()) {
    throw DimensionMismatch("hahn_banach_extend: one value per basis vector");
  }
  if (n > 4) throw Unsupported("hahn_banach_extend: ambient dimension above 4");
  Eigen::MatrixXd b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    check_element(ambient, basis[j]);
    b.col(static_cast<Eigen::Index>(j)) = to_eigen(basis[j]);
  }
  if (Eigen::FullPivLU<Eigen::MatrixXd>(b).rank() != b.cols()) {
    throw InvalidArgument("hahn_banach_extend: basis is linearly dependent");
  }
  Majorant p{ambient, omega0, omega1};
  Eigen::VectorXd f = to_eigen(values);

  // Certificate on the basis and on sums and differences of pairs.
  auto certify = [&](const Eigen::VectorXd& v, double tv) {
    if (std::abs(tv) > p(v) * (1.0 + 1e-9)) {
      throw PreconditionFailed("hahn_banach_extend: functional exceeds omega0 K(omega1/omega0, .)",
                               to_vector(v));
    }
  };
  for (Eigen::Index i = 0; i < b.cols(); ++i) {
    certify(b.col(i), f(i));
    for (Eigen::Index j = i + 1; j < b.cols(); ++j) {
      certify(b.col(i) + b.col(j), f(i) + f(j));
      certify(b.col(i) - b.col(j), f(i) - f(j));
    }
  }

  Extension out;
  if (f.cwiseAbs().maxCoeff() == 0.0) {
    out.coeffs.assign(n, 0.0);
    return out;
  }
  for (std::size_t i = 0; i < n && static_cast<std::size_t>(b.cols()) < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i));
    Eigen::MatrixXd trial(b.rows(), b.cols() + 1);
    trial << b, e;
    if (Eigen::FullPivLU<Eigen::MatrixXd>(trial).rank() != trial.cols()) continue;
    Interval iv;
    if (static_cast<std::size_t>(trial.cols()) == n) {
      Eigen::MatrixXd m = trial.transpose();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      rhs.head(f.size()) = f;
      Eigen::VectorXd gf = lu.solve(rhs);
      Eigen::VectorXd z = lu.solve(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(n),
                                                          static_cast<Eigen::Index>(n) - 1));
      iv = last_step_interval(ambient, omega0, omega1, gf, z);
    } else {
      iv.hi = extension_infimum(p, b, f, e);
      iv.lo = -extension_infimum(p, b, f, -e);
    }
    if (iv.lo > iv.hi + 1e-9 * (1.0 + std::abs(iv.hi))) {
      throw PreconditionFailed("hahn_banach_extend: empty feasible interval");
    }
    double cval = 0.5 * (iv.lo + iv.hi);
    b = trial;
    f.conservativeResize(f.size() + 1);
    f(f.size() - 1) = cval;
    ++out.steps;
  }
  Eigen::VectorXd g = b.transpose().fullPivLu().solve(f);
  out.coeffs = to_vector(g);
  out.bound0 = dual_side_norm(ambient, Side::zero, out.coeffs) / omega0;
  out.bound1 = dual_side_norm(ambient, Side::one, out.coeffs) / omega1;
  if (out.steps == 0 && std::max(out.bound0, out.bound1) > 1.0 + 1e-9) {
    throw PreconditionFailed("hahn_banach_extend: functional exceeds the bound", out.coeffs);
  }
  if (std::max(out.bound0, out.bound1) > 1.0 + 1e-9) {
    throw InternalError("hahn_banach_extend: extension violates the bound");
  }
  return out;
}

DualIdentity dual_k_identity(const Couple& c, std::span<const double> a, double t) {
  check_element(c, a);
  if (!(t > 0.0)) throw InvalidArgument("t must be positive");
  const std::size_t n = c.dim();
  if (n > 4) throw Unsupported("dual_k_identity: dimension above 4");
  DualIdentity out;
  KResult k = k_functional(c, a, t, kInf);
  out.k_inf = k.value;
  Eigen::VectorXd av = to_eigen(a);
  double aa = av.squaredNorm();
  if (aa == 0.0) {
    out.argmax.assign(n, 0.0);
    return out;
  }
  auto dual_sum = [&](const Eigen::VectorXd& g) {
    return dual_side_norm(c, Side::zero, as_span(g)) + dual_side_norm(c, Side::one, as_span(g)) / t;
  };
  Eigen::VectorXd g0 = av / aa;
  Eigen::VectorXd best_g = g0;
  double best = dual_sum(g0);
  if (n > 1) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(av);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd z = q.rightCols(static_cast<Eigen::Index>(n) - 1);
    // |g_i| <= min(w0_i, t w1_i) * D(g) for every g, so D(g) <= D(g0) bounds g.
    double wcap = 0.0;
    for (std::size_t i = 0; i < n; ++i) wcap = std::max(wcap, std::min(c.w0()[i], t * c.w1()[i]));
    double radius = 1.01 * std::sqrt(static_cast<double>(n)) * wcap * best + 1e-300;
    auto f = [&](std::span<const double> y) { return dual_sum(g0 + z * to_eigen(y)); };
    Vector lo(n - 1, -radius), hi(n - 1, radius);
    BoxMinimum m = minimize_box(f, lo, hi, 80);
    if (m.value < best) {
      best = m.value;
      best_g = g0 + z * to_eigen(m.x);
    }
  }
  out.dual_sup = 1.0 / best;
  out.argmax = to_vector(best_g);
  double gap = (out.k_inf - out.dual_sup) / out.k_inf;
  if (std::abs(gap) > 1e-6) {
    throw NonConvergence("dual_k_identity: primal and dual values differ", out.dual_sup, out.k_inf);
  }
  return out;
}

LinfEmbedding embed_linf(const Couple& c, const std::vector<Vector>& duals,
                         std::span<const double> a) {
  check_element(c, a);
  if (duals.empty()) throw InvalidArgument("embed_linf: empty sample set");
  Vector values, w0, w1;
  for (const Vector& g : duals) {
    check_element(c, g);
    double d0 = dual_side_norm(c, Side::zero, g);
    double d1 = dual_side_norm(c, Side::one, g);
    if (d0 == 0.0) throw InvalidArgument("embed_linf: zero functional in the sample set");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += g[i] * a[i];
    values.push_back(s);
    w0.push_back(1.0 / d0);
    w1.push_back(1.0 / d1);
  }
  std::size_t m = values.size();
  return {std::move(values), make_couple(m, std::move(w0), std::move(w1), kInf, kInf)};
}

double embedded_k_inf(const LinfEmbedding& e, double t) {
  return k_equal_exponent(e.couple, e.values, t);
}

}  // namespace couplekit
