#pragma once

#include <functional>
#include <span>
#include <vector>

namespace couplekit {

// One evaluation of a convex function g on [lo, hi]. `x` is the abscissa
// actually achieved, which may differ slightly from the requested target.
struct ConvexSample {
  double x;
  double value;
};

struct ConvexMinimum {
  double x = 0.0;
  double value = 0.0;        // best sampled value: an upper bound on min g
  double lower = 0.0;        // certified lower bound on min g
  int evaluations = 0;
};

enum class TiePreference { left, right };

// Golden-section search on a convex function, stopped when the secant
// lower bound is within rel_tol of the best value. Throws NonConvergence
// with the (lower, upper) pair when the budget runs out.
ConvexMinimum minimize_convex(const std::function<ConvexSample(double)>& g, double lo, double hi,
                              double rel_tol, int max_evaluations,
                              TiePreference prefer = TiePreference::left,
                              double floor = 0.0);

// Lower bound for min g over [x_0, x_m] implied by convexity of g through
// the (sorted, distinct) samples; never below `floor`.
double convex_lower_bound(std::span<const ConvexSample> sorted, double floor);

struct BoxMinimum {
  std::vector<double> x;
  double value = 0.0;
};

// Minimises a convex function on a box by nested golden-section searches,
// one coordinate per level. Intended for dimensions <= 3.
BoxMinimum minimize_box(const std::function<double(std::span<const double>)>& f,
                        std::span<const double> lo, std::span<const double> hi,
                        int iterations_per_level = 80);

// Scalar golden section on a convex (or unimodal) function.
double golden_argmin(const std::function<double(double)>& f, double lo, double hi,
                     int iterations, double* best_value = nullptr);

}  // namespace couplekit
