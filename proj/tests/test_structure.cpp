#include <cmath>
#include <random>

#include "couplekit/errors.hpp"
#include "couplekit/structure.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace couplekit;

namespace {

const Exponent kOne = Exponent::finite(1.0);
const Exponent kTwo = Exponent::finite(2.0);
const Exponent kInf = Exponent::infinity();

Vector dyadic(int lo, int hi) {
  Vector ts;
  for (int k = lo; k <= hi; ++k) ts.push_back(std::exp2(k));
  return ts;
}

Exponent pick(std::mt19937_64& rng, std::initializer_list<Exponent> choices) {
  std::uniform_int_distribution<std::size_t> d(0, choices.size() - 1);
  return *(choices.begin() + d(rng));
}

Couple random_couple(std::mt19937_64& rng, std::size_t n, std::initializer_list<Exponent> ps) {
  return make_couple(n, oracle::random_vector(rng, n, 0.3, 3.0),
                     oracle::random_vector(rng, n, 0.3, 3.0), pick(rng, ps), pick(rng, ps));
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  Eigen::MatrixXd m(rows, cols);
  std::uniform_real_distribution<double> u(-2, 2);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = u(rng);
  }
  return m;
}

// sup of ||Tx|| / ||x|| over random directions: a lower estimate.
double sampled_side_norm(const LinearMap& t, Side s, std::mt19937_64& rng, int draws) {
  std::normal_distribution<double> g(0, 1);
  const Couple& a = t.source();
  const Couple& b = t.target();
  double best = 0.0;
  for (int k = 0; k < draws; ++k) {
    Vector x(a.dim());
    for (auto& v : x) v = g(rng);
    if (k % 3 == 0) {
      for (auto& v : x) v = v > 0 ? 1.0 : -1.0;
    }
    double nx = side_norm(a, s, x);
    if (nx == 0.0) continue;
    best = std::max(best, side_norm(b, s, t.apply(x)) / nx);
  }
  return best;
}

// Maximum of <g, a> / (N0'(g) + N1'(g)/t) over the extreme points of the
// dual unit ball, for couples with exponents in {1, inf}.
double sign_pattern_dual(const Couple& c, const Vector& a, double t) {
  const std::size_t n = c.dim();
  auto dual = [&](const Vector& g) {
    return dual_side_norm(c, Side::zero, g) + dual_side_norm(c, Side::one, g) / t;
  };
  std::vector<double> alphas{0.0, 1.0};
  for (std::size_t i = 0; i < n; ++i) {
    alphas.push_back(t * c.w1()[i] / (c.w0()[i] + t * c.w1()[i]));
  }
  double best = 0.0;
  std::size_t patterns = 1;
  for (std::size_t i = 0; i < n; ++i) patterns *= 3;
  for (std::size_t code = 0; code < patterns; ++code) {
    Vector s(n);
    std::size_t r = code;
    for (std::size_t i = 0; i < n; ++i, r /= 3) s[i] = static_cast<double>(r % 3) - 1.0;
    std::vector<Vector> shapes;
    Vector g0(n), g1(n), g2(n);
    for (std::size_t i = 0; i < n; ++i) {
      g0[i] = s[i];
      g1[i] = s[i] * c.w0()[i];
      g2[i] = s[i] * c.w1()[i];
    }
    shapes = {g0, g1, g2};
    for (double al : alphas) {
      Vector g(n);
      for (std::size_t i = 0; i < n; ++i) {
        g[i] = s[i] * std::min(al * c.w0()[i], (1 - al) * t * c.w1()[i]);
      }
      shapes.push_back(g);
    }
    for (const Vector& g : shapes) {
      double d = dual(g);
      if (d == 0.0) continue;
      double num = 0.0;
      for (std::size_t i = 0; i < n; ++i) num += g[i] * a[i];
      best = std::max(best, num / d);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("linear map validation and composition") {
  Couple c2 = unweighted_couple(2, kOne, kInf);
  Couple c3 = unweighted_couple(3, kOne, kInf);
  CHECK_THROWS_AS(LinearMap(Eigen::MatrixXd::Zero(2, 3), c2, c2), DimensionMismatch);
  LinearMap t(Eigen::MatrixXd::Ones(3, 2), c2, c3);
  CHECK(t.apply(Vector{1, 2}) == Vector{3, 3, 3});
  CHECK_THROWS_AS(compose(t, t), DimensionMismatch);
  LinearMap s(Eigen::MatrixXd::Ones(2, 3), c3, c2);
  CHECK(compose(s, t).matrix() == 3.0 * Eigen::MatrixXd::Ones(2, 2));
}

TEST_CASE("operator_norm_l examples") {
  Couple c = unweighted_couple(2, kOne, kInf);
  CHECK(operator_norm_l(LinearMap(2.0 * Eigen::MatrixXd::Identity(2, 2), c, c)).upper == 2.0);
  Eigen::MatrixXd half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  NormBound b = operator_norm_l(LinearMap(half, c, c));
  CHECK(b.exact());
  CHECK(b.upper == 1.0);
  CHECK(operator_norm_l(LinearMap(Eigen::MatrixXd::Zero(2, 2), c, c)).upper == 0.0);
  Couple w = make_couple(3, {1, 2, 3}, {3, 2, 1}, kTwo, kTwo);
  CHECK(operator_norm_l(identity_map(w)).upper == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("side norms agree with direct evaluation and sampling") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 120; ++trial) {
    std::size_t n = 1 + trial % 4, m = 1 + (trial / 4) % 4;
    Couple a = random_couple(rng, n, {kOne, kTwo, kInf, Exponent::finite(1.5)});
    Couple b = random_couple(rng, m, {kOne, kTwo, kInf, Exponent::finite(3.0)});
    LinearMap t(random_matrix(rng, m, n), a, b);
    for (Side s : {Side::zero, Side::one}) {
      NormBound nb = side_operator_norm(t, s);
      CHECK(nb.lower <= nb.upper * (1 + 1e-12));
      double sampled = sampled_side_norm(t, s, rng, 3000);
      CHECK(sampled <= nb.upper * (1 + 1e-9));
      if (nb.exact()) CHECK(sampled >= 0.5 * nb.upper);
    }
  }
}

TEST_CASE("closed-form side norms match brute-force vertex enumeration") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t n = 1 + trial % 4, m = 1 + (trial / 3) % 4;
    Exponent p = pick(rng, {kOne, kInf}), q = pick(rng, {kOne, kInf});
    Couple a = make_couple(n, oracle::random_vector(rng, n, 0.3, 3), Vector(n, 1), p, p);
    Couple b = make_couple(m, oracle::random_vector(rng, m, 0.3, 3), Vector(m, 1), q, q);
    LinearMap t(random_matrix(rng, m, n), a, b);
    // The unit ball of l_1(w) has vertices e_j / w_j, that of l_inf(w) has s / w.
    double best = 0.0;
    if (p.is_one()) {
      for (std::size_t j = 0; j < n; ++j) {
        Vector x(n, 0.0);
        x[j] = 1.0 / a.w0()[j];
        best = std::max(best, side_norm(b, Side::zero, t.apply(x)));
      }
    } else {
      for (std::size_t code = 0; code < (1u << n); ++code) {
        Vector x(n);
        for (std::size_t j = 0; j < n; ++j) x[j] = ((code >> j) & 1 ? 1.0 : -1.0) / a.w0()[j];
        best = std::max(best, side_norm(b, Side::zero, t.apply(x)));
      }
    }
    NormBound nb = side_operator_norm(t, Side::zero);
    CHECK(nb.exact());
    CHECK(nb.upper == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("multiplicative inequality and b below l") {
  std::mt19937_64 rng(13);
  Vector ts = dyadic(-4, 4);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 1 + trial % 3, m = 1 + (trial / 3) % 3, k = 2;
    Couple a = random_couple(rng, n, {kOne, kInf});
    Couple b = random_couple(rng, m, {kOne, kInf});
    Couple c = random_couple(rng, k, {kOne, kInf});
    LinearMap t(random_matrix(rng, m, n), a, b);
    LinearMap s(random_matrix(rng, k, m), b, c);
    NormBound st = operator_norm_l(compose(s, t));
    CHECK(st.upper <= operator_norm_l(s).upper * operator_norm_l(t).upper * (1 + 1e-12));
    std::vector<Vector> samples{oracle::random_vector(rng, n, -2, 2),
                                oracle::random_vector(rng, n, -2, 2)};
    CHECK(operator_norm_b_lower(t, samples, ts) <= operator_norm_l(t).upper * (1 + 1e-9));
  }
  Couple c = unweighted_couple(3, kOne, kInf);
  std::vector<Vector> samples{{3, 1, 2}, {1, 0, 0}};
  CHECK(operator_norm_b_lower(identity_map(c), samples, ts) ==
        doctest::Approx(1.0).epsilon(1e-8));
  LinearMap two(2.0 * Eigen::MatrixXd::Identity(3, 3), c, c);
  CHECK(operator_norm_b_lower(two, samples, ts) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(operator_norm_b_lower(two, {{0, 0, 0}}, ts) == 0.0);
}

TEST_CASE("subcouple validation") {
  Couple c = unweighted_couple(3, kOne, kInf);
  CHECK_THROWS_AS(SubcoupleSpec::coordinates(c, {}), InvalidArgument);
  CHECK_THROWS_AS(SubcoupleSpec::coordinates(c, {0, 0}), InvalidArgument);
  CHECK_THROWS_AS(SubcoupleSpec::coordinates(c, {3}), DimensionMismatch);
  CHECK_THROWS_AS(SubcoupleSpec::span(c, {{1, 1, 0}, {2, 2, 0}}), InvalidArgument);
  CHECK_THROWS_AS(SubcoupleSpec::span(c, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}}),
                  Unsupported);
  SubcoupleSpec s = SubcoupleSpec::coordinates(c, {2, 0});
  CHECK(s.keep() == std::vector<std::size_t>{0, 2});
  CHECK(s.embed(Vector{5, 7}) == Vector{5, 0, 7});
}

TEST_CASE("is_b_subcouple examples") {
  Couple c = unweighted_couple(2, kOne, kInf);
  Vector ts = dyadic(-5, 5);
  SubcoupleSpec first = SubcoupleSpec::coordinates(c, {0});
  for (double t : ts) CHECK(subcouple_k(first, Vector{1}, t) == doctest::Approx(std::min(t, 1.0)));
  CHECK(is_b_subcouple(first, {{1}, {-2.5}}, ts).is_b);
  SubcoupleSpec full = SubcoupleSpec::coordinates(c, {0, 1});
  CHECK(is_b_subcouple(full, {{3, 1}, {1, -1}}, ts).is_b);

  // (1,1) spans a b-subcouple: K_sub(t) = min(2, t) = K_ambient(t).
  SubcoupleSpec diag = SubcoupleSpec::span(c, {{1, 1}});
  CHECK(is_b_subcouple(diag, {{1}}, ts).is_b);
  // (2,1) does not: K_sub(1.5) = 3 > K_ambient(1.5) = 2.5.
  SubcoupleSpec skew = SubcoupleSpec::span(c, {{2, 1}});
  CHECK(subcouple_k(skew, Vector{1}, 1.5) == doctest::Approx(3.0));
  SubcoupleVerdict v = is_b_subcouple(skew, {{1}}, Vector{0.5, 1.0, 1.5, 2.0});
  CHECK_FALSE(v.is_b);
  REQUIRE(v.witness_t.has_value());
  CHECK(*v.witness_t == 1.5);
  CHECK(v.max_gap == doctest::Approx(3.0 / 2.5 - 1.0));
}

TEST_CASE("subcouple K agrees with a brute-force restricted infimum") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t n = 2 + trial % 2;
    Couple c = random_couple(rng, n, {kOne, kTwo, kInf});
    std::size_t k = 1 + trial % 2;
    std::vector<Vector> basis;
    for (std::size_t j = 0; j < k; ++j) basis.push_back(oracle::random_vector(rng, n, -2, 2));
    SubcoupleSpec spec = SubcoupleSpec::span(c, basis);
    Vector x = oracle::random_vector(rng, k, -2, 2);
    double t = std::exp2(static_cast<int>(rng() % 5) - 2);
    Vector bx = spec.embed(x);
    auto f = [&](const Vector& y) {
      Vector by = spec.embed(y), r(n);
      for (std::size_t i = 0; i < n; ++i) r[i] = bx[i] - by[i];
      return side_norm(c, Side::zero, r) + t * side_norm(c, Side::one, by);
    };
    Vector lo(k), hi(k);
    for (std::size_t j = 0; j < k; ++j) {
      lo[j] = -3 * std::abs(x[j]) - 3;
      hi[j] = 3 * std::abs(x[j]) + 3;
    }
    double brute = oracle::grid_zoom_min(f, lo, hi, 21, 60);
    double ks = subcouple_k(spec, x, t);
    CHECK(ks <= brute * (1 + 1e-9));
    CHECK(ks >= brute * (1 - 1e-6));
  }
}

TEST_CASE("restricting splits never lowers K") {
  std::mt19937_64 rng(15);
  Vector ts = dyadic(-3, 3);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 2 + trial % 3;
    Couple c = random_couple(rng, n, {kOne, kTwo, kInf});
    SubcoupleSpec coord = SubcoupleSpec::coordinates(c, {0, n - 1});
    SubcoupleVerdict vc = is_b_subcouple(coord, {oracle::random_vector(rng, 2, -2, 2)}, ts);
    CHECK(vc.is_b);
    CHECK(vc.max_gap <= 1e-8);
    SubcoupleSpec sp = SubcoupleSpec::span(c, {oracle::random_vector(rng, n, -2, 2)});
    SubcoupleVerdict vs = is_b_subcouple(sp, {{1.0}}, ts);
    CHECK(vs.max_gap >= -1e-8);
  }
}

TEST_CASE("quotients by coordinates") {
  Couple c = unweighted_couple(2, kOne, kInf);
  CHECK(quotient_couple(c, {1}) == unweighted_couple(1, kOne, kInf));
  CHECK(quotient_couple(c, {}) == c);
  CHECK_THROWS_AS(quotient_couple(c, {0, 1}), InvalidArgument);
  CHECK(quotient_class(3, {1}, Vector{4, 5, 6}) == Vector{4, 6});
  Vector ts = dyadic(-3, 3);
  CHECK(is_b_quotient(c, {1}, {{3, 1}, {-1, 2}}, ts).is_b);
  CHECK(is_b_quotient(c, {}, {{3, 1}}, ts).is_b);
}

TEST_CASE("coordinate quotients satisfy the quotient K identity against a grid oracle") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 12; ++trial) {
    std::size_t n = 2 + trial % 3;
    Couple c = random_couple(rng, n, {kOne, kTwo, kInf});
    std::vector<std::size_t> kill{trial % n};
    Vector b = oracle::random_vector(rng, n, -2, 2);
    double t = std::exp2(static_cast<int>(rng() % 5) - 2);
    Couple q = quotient_couple(c, kill);
    double kq = k_functional(q, quotient_class(n, kill, b), t, kOne).value;
    // inf over the killed coordinate of the ambient K, by grid zoom.
    auto f = [&](const Vector& cc) {
      Vector x(b);
      x[kill[0]] += cc[0];
      return k_functional(c, x, t, kOne).value;
    };
    double brute = oracle::grid_zoom_min(f, {-5}, {5}, 21, 40);
    CHECK(kq == doctest::Approx(brute).epsilon(1e-5));
    CHECK(is_b_quotient(c, kill, {b}, Vector{t}).is_b);
  }
}

TEST_CASE("retract checks") {
  Couple c = unweighted_couple(2, kOne, kInf);
  Vector ts = dyadic(-3, 3);
  LinearMap id = identity_map(c);
  for (auto kind : {RetractKind::l, RetractKind::b, RetractKind::lb, RetractKind::bl}) {
    CHECK(retract_check(id, id, kind, {{1, 2}}, {{1, 2}}, ts).ok);
  }
  LinearMap two(2.0 * Eigen::MatrixXd::Identity(2, 2), c, c);
  RetractVerdict bad = retract_check(two, id, RetractKind::l, {}, {}, ts);
  CHECK_FALSE(bad.ok);
  CHECK(bad.failed_clause == "not identity");
  LinearMap half(0.5 * Eigen::MatrixXd::Identity(2, 2), c, c);
  RetractVerdict norm = retract_check(two, half, RetractKind::l, {{1, 0}}, {{1, 0}}, ts);
  CHECK_FALSE(norm.ok);
  CHECK(norm.failed_clause == "alpha norm");
  CHECK(parse_retract_kind("lb") == RetractKind::lb);
  CHECK_THROWS_AS(parse_retract_kind("x"), InvalidArgument);
}

TEST_CASE("coordinate b-subcouples are lb-retracts") {
  std::mt19937_64 rng(17);
  Vector ts = dyadic(-4, 4);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 2 + trial % 4;
    Couple c = random_couple(rng, n, {kOne, kTwo, kInf});
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() % 2) keep.push_back(i);
    }
    if (keep.empty()) keep.push_back(0);
    SubcoupleSpec spec = SubcoupleSpec::coordinates(c, keep);
    LinearMap alpha = coordinate_injection(spec);
    LinearMap beta = coordinate_projection(spec);
    std::vector<Vector> sa{oracle::random_vector(rng, keep.size(), -2, 2)};
    std::vector<Vector> sb{oracle::random_vector(rng, n, -2, 2)};
    RetractVerdict v = retract_check(alpha, beta, RetractKind::lb, sa, sb, ts);
    CHECK(v.ok);
    CHECK(v.failed_clause.empty());
  }
}

TEST_CASE("hahn_banach_extend examples") {
  Couple c = unweighted_couple(2, kOne, kInf);
  Extension e = hahn_banach_extend(c, {{1, 0}}, {1.0}, 1.0, 1.0);
  CHECK(e.coeffs[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(e.coeffs[1]) <= 1e-9);
  CHECK(e.bound0 <= 1 + 1e-9);
  CHECK(e.bound1 <= 1 + 1e-9);

  Extension zero = hahn_banach_extend(c, {{1, 0}}, {0.0}, 1.0, 1.0);
  CHECK(zero.coeffs == Vector{0, 0});

  try {
    hahn_banach_extend(c, {{1, 0}}, {2.0}, 1.0, 1.0);
    FAIL("expected PreconditionFailed");
  } catch (const PreconditionFailed& err) {
    CHECK(err.witness() == Vector{1, 0});
  }
  CHECK_THROWS_AS(hahn_banach_extend(c, {{1, 0}}, {1.0}, 0.0, 1.0), NonpositiveWeight);
  CHECK_THROWS_AS(hahn_banach_extend(unweighted_couple(5, kOne, kInf), {{1, 0, 0, 0, 0}}, {0.1},
                                     1.0, 1.0),
                  Unsupported);
}

TEST_CASE("hahn_banach_extend on random one-dimensional subspaces") {
  std::mt19937_64 rng(18);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 24; ++trial) {
    std::size_t n = 2 + trial % 3;
    // Two fractional exponents make each K solve iterative; keep those to n <= 3.
    Couple c = n < 4 ? random_couple(rng, n, {kOne, kTwo, kInf, Exponent::finite(1.5)})
                     : random_couple(rng, n, {kOne, kTwo, kInf});
    Vector v = oracle::random_vector(rng, n, -2, 2);
    double om0 = std::exp2(u(rng) * 2), om1 = std::exp2(u(rng) * 2);
    double bound = om0 * k_functional(c, v, om1 / om0, kOne).value;
    double tv = u(rng) * bound;
    Extension e = hahn_banach_extend(c, {v}, {tv}, om0, om1);
    double sv = 0.0;
    for (std::size_t i = 0; i < n; ++i) sv += e.coeffs[i] * v[i];
    CHECK(sv == doctest::Approx(tv).epsilon(1e-9));
    CHECK(e.bound0 <= 1 + 1e-9);
    CHECK(e.bound1 <= 1 + 1e-9);
    // |S b| <= omega0 K(omega1/omega0, b) on random b.
    for (int k = 0; k < 5; ++k) {
      Vector b = oracle::random_vector(rng, n, -2, 2);
      double sb = 0.0;
      for (std::size_t i = 0; i < n; ++i) sb += e.coeffs[i] * b[i];
      CHECK(std::abs(sb) <= om0 * k_functional(c, b, om1 / om0, kOne).value * (1 + 1e-9));
    }
  }
}

TEST_CASE("hahn_banach_extend lies in the feasible segment found by scanning (n = 2)") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 30; ++trial) {
    Couple c = random_couple(rng, 2, {kOne, kTwo, kInf});
    Vector v = oracle::random_vector(rng, 2, -2, 2);
    double om0 = std::exp2(u(rng)), om1 = std::exp2(u(rng));
    double tv = u(rng) * om0 * k_functional(c, v, om1 / om0, kOne).value;
    Extension e = hahn_banach_extend(c, {v}, {tv}, om0, om1);
    // g = tv v / |v|^2 + s v_perp; scan s for feasibility of both dual bounds.
    double vv = v[0] * v[0] + v[1] * v[1];
    Vector perp{-v[1], v[0]};
    auto g_of = [&](double s) {
      return Vector{tv * v[0] / vv + s * perp[0], tv * v[1] / vv + s * perp[1]};
    };
    auto feasible = [&](double s) {
      Vector g = g_of(s);
      return dual_side_norm(c, Side::zero, g) <= om0 * (1 + 1e-12) &&
             dual_side_norm(c, Side::one, g) <= om1 * (1 + 1e-12);
    };
    double lo = 1e300, hi = -1e300;
    const int steps = 200000;
    const double span = 20.0;
    for (int k = 0; k <= steps; ++k) {
      double s = -span + 2 * span * k / steps;
      if (feasible(s)) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
    }
    double se = (e.coeffs[0] * perp[0] + e.coeffs[1] * perp[1]) / vv;
    if (lo > hi) {
      // Segment thinner than the scan step: the extension must still be feasible.
      CHECK(feasible(se));
      continue;
    }
    double step = 2 * span / steps;
    CHECK(se >= lo - step);
    CHECK(se <= hi + step);
  }
}

TEST_CASE("dual_k_identity examples") {
  Couple c = unweighted_couple(3, kOne, kInf);
  DualIdentity d = dual_k_identity(c, Vector{3, 1, 2}, 1.0);
  CHECK(d.k_inf == doctest::Approx(5.0 / 3.0).epsilon(1e-9));
  CHECK(d.dual_sup == doctest::Approx(5.0 / 3.0).epsilon(1e-9));
  CHECK(sign_pattern_dual(c, {3, 1, 2}, 1.0) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  DualIdentity z = dual_k_identity(c, Vector{0, 0, 0}, 1.0);
  CHECK(z.k_inf == 0.0);
  CHECK(z.dual_sup == 0.0);
  Couple scalar = unweighted_couple(1, kOne, kInf);
  DualIdentity s = dual_k_identity(scalar, Vector{1}, 1.0);
  CHECK(s.k_inf == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.dual_sup == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(dual_k_identity(unweighted_couple(5, kOne, kInf), Vector(5, 1.0), 1.0),
                  Unsupported);
}

TEST_CASE("dual_k_identity matches the sign-pattern oracle") {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 1 + trial % 3;
    Couple c = random_couple(rng, n, {kOne, kInf});
    Vector a = oracle::random_vector(rng, n, -3, 3);
    double t = std::exp2(static_cast<int>(rng() % 7) - 3);
    DualIdentity d = dual_k_identity(c, a, t);
    double oracle_dual = sign_pattern_dual(c, a, t);
    CHECK(d.dual_sup == doctest::Approx(oracle_dual).epsilon(1e-7));
    CHECK(d.k_inf == doctest::Approx(oracle_dual).epsilon(1e-7));
  }
}

TEST_CASE("embed_linf") {
  Couple c = unweighted_couple(3, kOne, kInf);
  Vector a{3, 1, 2};
  DualIdentity d = dual_k_identity(c, a, 1.0);
  std::vector<Vector> samples{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {1, 0, 1}};
  LinfEmbedding e = embed_linf(c, samples, a);
  CHECK(embedded_k_inf(e, 1.0) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  samples.push_back(d.argmax);
  CHECK(embedded_k_inf(embed_linf(c, samples, a), 1.0) ==
        doctest::Approx(d.k_inf).epsilon(1e-8));
  LinfEmbedding zero = embed_linf(c, samples, Vector{0, 0, 0});
  CHECK(embedded_k_inf(zero, 1.0) == 0.0);
  LinfEmbedding gap = embed_linf(c, {{1, 0, 0}}, Vector{0, 0, 1});
  CHECK(embedded_k_inf(gap, 1.0) == 0.0);
  CHECK(k_functional(c, Vector{0, 0, 1}, 1.0, kInf).value > 0.0);
  CHECK_THROWS_AS(embed_linf(c, {}, a), InvalidArgument);

  // Never above the ambient K on random samples.
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    Couple w = random_couple(rng, 3, {kOne, kTwo, kInf});
    Vector b = oracle::random_vector(rng, 3, -2, 2);
    std::vector<Vector> s;
    for (int k = 0; k < 6; ++k) s.push_back(oracle::random_vector(rng, 3, -1, 1));
    for (double t : {0.25, 1.0, 4.0}) {
      CHECK(embedded_k_inf(embed_linf(w, s, b), t) <=
            k_functional(w, b, t, kInf).value * (1 + 1e-12));
    }
  }
}
