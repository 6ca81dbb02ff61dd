#include "couplekit/couple.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "couplekit/errors.hpp"

namespace couplekit {

Exponent Exponent::finite(double p) {
  if (!std::isfinite(p) || !(p >= 1.0)) {
    throw ExponentOutOfRange("exponent out of range: p must lie in [1, inf], got " +
                             std::to_string(p));
  }
  return Exponent(false, p);
}

Exponent Exponent::infinity() { return Exponent(true, 0.0); }

Exponent Exponent::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
  double p = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), p);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidArgument("cannot parse exponent '" + text + "'");
  }
  return finite(p);
}

double Exponent::value() const {
  if (infinite_) throw InternalError("Exponent::value called on infinity");
  return value_;
}

Exponent Exponent::conjugate() const {
  if (infinite_) return finite(1.0);
  if (value_ == 1.0) return infinity();
  return finite(value_ / (value_ - 1.0));
}

std::string Exponent::to_string() const {
  if (infinite_) return "inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value_);
  return std::string(buf, ptr);
}

bool Couple::is_unweighted_l1_linf() const {
  auto ones = [](const Vector& w) {
    return std::all_of(w.begin(), w.end(), [](double x) { return x == 1.0; });
  };
  return p0_.is_one() && p1_.is_infinite() && ones(w0_) && ones(w1_);
}

Couple Couple::restricted(std::span<const std::size_t> keep) const {
  if (keep.empty()) throw InvalidArgument("restriction to an empty coordinate set");
  Vector w0, w1;
  for (std::size_t i : keep) {
    if (i >= dim()) throw DimensionMismatch("coordinate index out of range");
    w0.push_back(w0_[i]);
    w1.push_back(w1_[i]);
  }
  return Couple(std::move(w0), std::move(w1), p0_, p1_);
}

Couple Couple::swapped() const { return Couple(w1_, w0_, p1_, p0_); }

Couple make_couple(std::size_t n, Vector w0, Vector w1, Exponent p0, Exponent p1) {
  if (n == 0) throw DimensionMismatch("dimension mismatch: n must be at least 1");
  if (w0.size() != n || w1.size() != n) {
    throw DimensionMismatch("dimension mismatch: weight vectors must have length " +
                            std::to_string(n));
  }
  for (const Vector* w : {&w0, &w1}) {
    for (double x : *w) {
      if (!std::isfinite(x) || !(x > 0.0)) {
        throw NonpositiveWeight("nonpositive weight: weights must be finite and > 0");
      }
    }
  }
  return Couple(std::move(w0), std::move(w1), p0, p1);
}

Couple unweighted_couple(std::size_t n, Exponent p0, Exponent p1) {
  return make_couple(n, Vector(n, 1.0), Vector(n, 1.0), p0, p1);
}

double weighted_norm(std::span<const double> w, Exponent p, std::span<const double> a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, w[i] * std::abs(a[i]));
  if (p.is_infinite() || m == 0.0) return m;
  double q = p.value();
  double sum = 0.0;
  if (q == 1.0) {
    for (std::size_t i = 0; i < a.size(); ++i) sum += w[i] * std::abs(a[i]);
    return sum;
  }
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::pow(w[i] * std::abs(a[i]) / m, q);
  return m * std::pow(sum, 1.0 / q);
}

double side_norm(const Couple& c, Side s, std::span<const double> a) {
  if (a.size() != c.dim()) throw DimensionMismatch("dimension mismatch: element length");
  return weighted_norm(c.weights(s), c.exponent(s), a);
}

double dual_side_norm(const Couple& c, Side s, std::span<const double> a) {
  if (a.size() != c.dim()) throw DimensionMismatch("dimension mismatch: functional length");
  const Vector& w = c.weights(s);
  Vector inv(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) inv[i] = 1.0 / w[i];
  return weighted_norm(inv, c.exponent(s).conjugate(), a);
}

void check_element(const Couple& c, std::span<const double> a) {
  if (a.size() != c.dim()) {
    throw DimensionMismatch("dimension mismatch: element has length " +
                            std::to_string(a.size()) + ", couple has n=" +
                            std::to_string(c.dim()));
  }
  for (double x : a) {
    if (!std::isfinite(x)) throw InvalidArgument("element entries must be finite");
  }
}

double lp_combine(double u, double v, Exponent p) {
  if (p.is_infinite()) return std::max(u, v);
  double q = p.value();
  if (q == 1.0) return u + v;
  double m = std::max(u, v);
  if (m == 0.0) return 0.0;
  return m * std::pow(std::pow(u / m, q) + std::pow(v / m, q), 1.0 / q);
}

}  // namespace couplekit
