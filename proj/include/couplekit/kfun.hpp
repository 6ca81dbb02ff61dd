#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "couplekit/couple.hpp"
#include "couplekit/curve.hpp"

namespace couplekit {

// A monotone lattice norm on R^n used as one side of a K-functional.
class SideNorm {
 public:
  enum class Kind { weighted_lp, weak_lorentz };

  static SideNorm weighted(Vector weights, Exponent p);
  static SideNorm of(const Couple& c, Side s);
  // Discrete weak Lorentz norm max_k k^(1/p) b*_k (k = 1..n), 1 <= p < inf.
  static SideNorm weak_lorentz(std::size_t n, double p);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const Vector& weights() const { return weights_; }
  Exponent exponent() const { return p_; }
  bool is_weighted(Exponent p) const { return kind_ == Kind::weighted_lp && p_ == p; }

  double operator()(std::span<const double> a) const;

 private:
  SideNorm(Kind kind, std::size_t dim, Vector weights, Exponent p)
      : kind_(kind), dim_(dim), weights_(std::move(weights)), p_(p) {}
  Kind kind_;
  std::size_t dim_;
  Vector weights_;
  Exponent p_;
};

struct Split {
  Vector a0;
  Vector a1;
  double value = 0.0;  // (N0(a0)^p + (t N1(a1))^p)^(1/p)
};

struct KResult {
  double value = 0.0;  // achieved by `split`; upper bound on K
  double lower = 0.0;  // certified lower bound on K
  Split split;
  int evaluations = 0;
};

struct KOptions {
  double tol = 1e-9;  // relative gap between value and lower
  int max_evaluations = 600;
};

// K_p(t, a) = inf over a = a0 + a1 of (N0(a0)^p + (t N1(a1))^p)^(1/p).
KResult k_functional(const Couple& c, std::span<const double> a, double t, Exponent p,
                     const KOptions& opt = {});
KResult k_functional(const SideNorm& n0, const SideNorm& n1, std::span<const double> a, double t,
                     Exponent p, const KOptions& opt = {});

// J_p(t, a) = (N0(a)^p + (t N1(a))^p)^(1/p).
double j_functional(const Couple& c, std::span<const double> a, double t, Exponent p);

struct Rearrangement {
  Vector values;                  // |a| sorted nonincreasing
  std::vector<std::size_t> order; // values[i] = |a[order[i]]|
};
// Stable: equal magnitudes keep their original index order.
Rearrangement rearrange(std::span<const double> a);
Vector decreasing_rearrangement(std::span<const double> a);

// K_1 for the unweighted {l_1, l_inf} couple: integral of a* up to t.
double k_l1_linf(std::span<const double> a, double t);
ConcaveCurve k_l1_linf_curve(std::span<const double> a);

// Closed form for p0 = p1 = p: coefficient-wise K_p of each coordinate.
double k_equal_exponent(const Couple& c, std::span<const double> a, double t);

// Exact K_1 curve for couples with p0, p1 in {1, inf}; nullopt otherwise.
std::optional<ConcaveCurve> exact_k_curve(const Couple& c, std::span<const double> a);
bool has_exact_k_curve(const Couple& c);

// Element of the unweighted {l_1, l_inf} couple whose K-curve is phi.
// Throws InvalidArgument naming the failed admissibility clause.
Vector realize_k(const ConcaveCurve& phi);

enum class ConeKind { halfline, unit_interval, discrete };
ConeKind parse_cone_kind(const std::string& name);
bool cone_membership(const ConcaveCurve& phi, ConeKind kind);

}  // namespace couplekit
