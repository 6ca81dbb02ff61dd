#pragma once

#include <span>
#include <vector>

#include "couplekit/couple.hpp"
#include "couplekit/curve.hpp"
#include "couplekit/structure.hpp"

namespace couplekit {

// Real-method parameters: 0 < theta < 1, 1 <= q <= inf.
struct KMethodParams {
  double theta = 0.5;
  Exponent q = Exponent::finite(1.0);
};
void check_params(const KMethodParams& params);

// (int_0^inf (t^-theta phi(t))^q dt/t)^(1/q), sup t^-theta phi(t) for q = inf.
// Piecewise closed form for integer q, Gauss-Kronrod on each interior piece
// otherwise. Throws InvalidArgument when the integral diverges
// (phi(0+) > 0 or a positive terminal slope), unless phi vanishes.
double k_space_norm(const ConcaveCurve& phi, const KMethodParams& params);
// Same on the exact K_1 curve of a; Unsupported for couples without one.
double k_space_norm(const Couple& c, std::span<const double> a, const KMethodParams& params);

// k_space_norm scaled by (theta (1 - theta) q)^(1/q) (1 for q = inf), which
// makes every param set give 1 on the unit atom.
double normalized_k_space_norm(const ConcaveCurve& phi, const KMethodParams& params);

struct InterpolationRatio {
  double ratio = 0.0;  // max over samples of ||Ta|| / ||a||
  bool ok = true;      // ratio <= 1 + 1e-9
};

// Throws PreconditionFailed when the l-norm of T exceeds 1 + 1e-12.
InterpolationRatio interpolation_property_check(const LinearMap& t,
                                                const std::vector<Vector>& samples,
                                                const KMethodParams& params);

struct SubcoupleNormVerdict {
  bool equal = true;      // sub and ambient norms agree within 1e-8 relative
  bool inclusion = true;  // sub norm >= ambient norm on every sample
  double max_gap = 0.0;   // max of (sub - ambient) / ambient
};

// Compares the (theta, q) norm computed from the subcouple's K-curve with
// the one from the ambient curve, on samples given as subspace coefficients.
// Coordinate subcouples and one-vector spans of couples with exact curves.
SubcoupleNormVerdict subcouple_norm_check(const SubcoupleSpec& spec, const KMethodParams& params,
                                          const std::vector<Vector>& samples);

struct LorentzComparison {
  Vector ts;
  Vector lhs;  // K_1 in the couple of weak Lorentz norms (p1 = inf: l_inf)
  Vector rhs;  // max_x b(x) / (x^(-1/p0) + x^(-1/p1) / t)
  double min_ratio = 1.0;  // of rhs / lhs
  double max_ratio = 1.0;
  bool within_window = true;  // ratios in [1/8, 8]
};

// 1 <= p0 < inf, p1 = inf; b nonnegative and nonincreasing. Default grid
// 2^-12 .. 2^12.
LorentzComparison lorentz_k_equiv(double p0, Exponent p1, std::span<const double> b,
                                  std::span<const double> ts = {});

}  // namespace couplekit
