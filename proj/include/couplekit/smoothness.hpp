#pragma once

#include <vector>

#include <Eigen/Dense>

#include "couplekit/couple.hpp"
#include "couplekit/curve.hpp"

namespace couplekit {

// Samples f(x_i) on the grid x_i = i h, i = 0..N. Discrete model of the
// {C^0, C^1} couple on the line.
class GridFunction {
 public:
  // Throws InvalidArgument unless h > 0, at least two samples, all finite.
  GridFunction(double h, Vector values);

  double step() const { return h_; }
  const Vector& values() const { return values_; }
  std::size_t points() const { return values_.size(); }

 private:
  double h_;
  Vector values_;
};

// max_i |f(x_i + d h) - f(x_i)| for every lag d = 0..N.
Vector lag_maxima(const GridFunction& f);

// max |f(x) - f(y)| over grid pairs with |x - y| <= t. Throws for t < 0.
double modulus_of_continuity(const GridFunction& f, double t);

// max over grid pairs of |f(x) - f(y)| / (2 + |x - y| / t). Throws for t <= 0.
double k_c0c1(const GridFunction& f, double t);

// Least concave majorant of the modulus, sampled at the lags d h, d >= 1.
ConcaveCurve modulus_majorant(const GridFunction& f);

struct MajorantComparison {
  double lhs = 0.0;    // k_c0c1(f, t)
  double rhs = 0.0;    // modulus_majorant(f)(t) / 2
  double ratio = 1.0;  // lhs / rhs, reported as 1 when both vanish
};

inline constexpr double kMajorantRatioLow = 0.25;
inline constexpr double kMajorantRatioHigh = 4.0;

// Compares the sup formula with half the concave majorant of the modulus.
// Throws InternalError if the ratio leaves [1/4, 4].
MajorantComparison majorant_equivalence(const GridFunction& f, double t);

// b(x, y) = f(x) - f(y) on all grid pairs.
Eigen::MatrixXd difference_embed(const GridFunction& f);

// K_inf(t, b) for the pair couple {l_inf(1/2), l_inf(1/|x - y|)} on the
// off-diagonal pairs: max |b(x, y)| / (2 + |x - y| / t).
double embedded_k(const Eigen::MatrixXd& b, double h, double t);

// The same pair couple as an explicit Couple on the off-diagonal entries,
// listed row by row. Used to cross-check embedded_k with the general code.
Couple embedded_couple(std::size_t points, double h);
Vector embedded_element(const Eigen::MatrixXd& b);

}  // namespace couplekit
