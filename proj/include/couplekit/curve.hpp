#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "couplekit/couple.hpp"

namespace couplekit {

// Nonnegative, nondecreasing, concave piecewise-linear function on (0, inf).
//
//   phi(t) = origin + initial_slope * t           on (0, t_1]
//   linear between (t_i, v_i) and (t_{i+1}, v_{i+1})
//   phi(t) = v_k + terminal_slope * (t - t_k)     on [t_k, inf)
//
// Slopes are stored alongside values; the constructor re-derives one from
// the other and rejects inconsistent input.
class ConcaveCurve {
 public:
  ConcaveCurve(double origin, std::vector<double> breakpoints, std::vector<double> values,
               double initial_slope, double terminal_slope);

  // Slopes are derived from the values.
  static ConcaveCurve from_values(double origin, std::vector<double> breakpoints,
                                  std::vector<double> values, double terminal_slope);
  // slopes[i] is the slope left of breakpoints[i]; slopes.back() is terminal.
  static ConcaveCurve from_slopes(double origin, std::vector<double> breakpoints,
                                  const std::vector<double>& slopes);
  static ConcaveCurve linear(double origin, double slope);

  double origin() const { return origin_; }
  const std::vector<double>& breakpoints() const { return ts_; }
  const std::vector<double>& values() const { return vs_; }
  double initial_slope() const { return initial_slope_; }
  double terminal_slope() const { return terminal_slope_; }
  // Slopes of all k+1 pieces, left to right.
  std::vector<double> slopes() const;

  // Throws InvalidArgument for t <= 0.
  double operator()(double t) const;

  // Same function without collinear breakpoints.
  ConcaveCurve simplified() const;

 private:
  double origin_;
  std::vector<double> ts_;
  std::vector<double> vs_;
  double initial_slope_;
  double terminal_slope_;
};

double curve_eval(const ConcaveCurve& f, double t);

struct CurveComparison {
  bool leq = true;
  // First t (in increasing order) where f > g, when leq is false.
  std::optional<double> witness;
  // min over checked abscissae of g - f (and of the slope gap at infinity).
  double margin = 0.0;
};

// Exact comparison f <= g on (0, inf): limit at 0+, union of breakpoints,
// and terminal slopes. Differences up to rel_tol * max(|f|,|g|) are ignored.
CurveComparison compare_curves(const ConcaveCurve& f, const ConcaveCurve& g,
                               double rel_tol = 0.0);
bool curve_leq(const ConcaveCurve& f, const ConcaveCurve& g, double rel_tol = 0.0);

// Least concave majorant of max(f, g).
ConcaveCurve curve_max(const ConcaveCurve& f, const ConcaveCurve& g);

// Least concave nondecreasing majorant on (0, inf) of the points (t_i, y_i),
// anchored at phi(0+) = origin and eventually growing with terminal_slope.
ConcaveCurve concave_hull(double origin, std::vector<std::pair<double, double>> points,
                          double terminal_slope);

// Least concave nondecreasing majorant anchored at the origin: phi(0+) = 0,
// terminal slope 0. Throws InvalidArgument on empty input or t <= 0, y < 0.
ConcaveCurve least_concave_majorant(std::vector<std::pair<double, double>> points);

// Lower envelope t -> min_j (c_j + d_j t) of lines with c_j, d_j >= 0.
ConcaveCurve lower_envelope(std::span<const std::pair<double, double>> lines);

}  // namespace couplekit
