#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace couplekit {

using Vector = std::vector<double>;

// Exponent p in [1, inf]. Infinity is its own state, never a large double.
class Exponent {
 public:
  static Exponent finite(double p);
  static Exponent infinity();
  // Parses "inf"/"infinity" or a decimal number.
  static Exponent parse(const std::string& text);

  bool is_infinite() const { return infinite_; }
  bool is_one() const { return !infinite_ && value_ == 1.0; }
  // Only valid for finite exponents.
  double value() const;
  // Hoelder conjugate: 1 <-> inf, p -> p/(p-1).
  Exponent conjugate() const;
  std::string to_string() const;

  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  Exponent(bool infinite, double value) : infinite_(infinite), value_(value) {}
  bool infinite_;
  double value_;
};

enum class Side { zero, one };

// Pair of weighted sequence norms l_p0(w0), l_p1(w1) on R^n.
class Couple {
 public:
  std::size_t dim() const { return w0_.size(); }
  const Vector& weights(Side s) const { return s == Side::zero ? w0_ : w1_; }
  Exponent exponent(Side s) const { return s == Side::zero ? p0_ : p1_; }
  const Vector& w0() const { return w0_; }
  const Vector& w1() const { return w1_; }
  Exponent p0() const { return p0_; }
  Exponent p1() const { return p1_; }

  // True for the unweighted {l_1, l_inf} couple.
  bool is_unweighted_l1_linf() const;
  // Couple on the listed coordinates, same weights and exponents.
  Couple restricted(std::span<const std::size_t> keep) const;
  // The couple with sides swapped.
  Couple swapped() const;

  friend bool operator==(const Couple&, const Couple&) = default;

 private:
  friend Couple make_couple(std::size_t, Vector, Vector, Exponent, Exponent);
  Couple(Vector w0, Vector w1, Exponent p0, Exponent p1)
      : w0_(std::move(w0)), w1_(std::move(w1)), p0_(p0), p1_(p1) {}
  Vector w0_;
  Vector w1_;
  Exponent p0_;
  Exponent p1_;
};

Couple make_couple(std::size_t n, Vector w0, Vector w1, Exponent p0, Exponent p1);
Couple unweighted_couple(std::size_t n, Exponent p0, Exponent p1);

// (sum (w|a|)^p)^(1/p), max for p = inf. Scaled to avoid overflow.
double weighted_norm(std::span<const double> w, Exponent p, std::span<const double> a);
// Norm of l_p(w) evaluated on a.
double side_norm(const Couple& c, Side s, std::span<const double> a);
// Dual norm: l_p'(1/w).
double dual_side_norm(const Couple& c, Side s, std::span<const double> a);

// Throws DimensionMismatch / InvalidArgument unless a is an element of c.
void check_element(const Couple& c, std::span<const double> a);

// (u^p + v^p)^(1/p) for u, v >= 0; max for p = inf.
double lp_combine(double u, double v, Exponent p);

}  // namespace couplekit
