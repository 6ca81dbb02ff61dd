#include "couplekit/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "couplekit/errors.hpp"

namespace couplekit {

namespace {

const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

void insert_sorted(std::vector<ConvexSample>& v, ConvexSample s) {
  auto it = std::lower_bound(v.begin(), v.end(), s.x,
                             [](const ConvexSample& a, double x) { return a.x < x; });
  if (it != v.end() && it->x == s.x) {
    it->value = std::min(it->value, s.value);
    return;
  }
  v.insert(it, s);
}

// Line through samples i and j, evaluated at x.
double secant(std::span<const ConvexSample> s, std::size_t i, std::size_t j, double x) {
  double slope = (s[j].value - s[i].value) / (s[j].x - s[i].x);
  return s[i].value + slope * (x - s[i].x);
}

}  // namespace

double convex_lower_bound(std::span<const ConvexSample> s, double floor) {
  const std::size_t m = s.size();
  if (m == 0) return floor;
  if (m == 1) return std::max(floor, -kInf);
  double best = kInf;
  for (std::size_t j = 0; j + 1 < m; ++j) {
    double a = s[j].x, b = s[j + 1].x;
    bool has_left = j >= 1;
    bool has_right = j + 2 < m;
    double bound;
    if (!has_left && !has_right) {
      bound = -kInf;
    } else if (has_left && !has_right) {
      bound = std::min(secant(s, j - 1, j, a), secant(s, j - 1, j, b));
    } else if (!has_left && has_right) {
      bound = std::min(secant(s, j + 1, j + 2, a), secant(s, j + 1, j + 2, b));
    } else {
      auto mx = [&](double x) {
        return std::max(secant(s, j - 1, j, x), secant(s, j + 1, j + 2, x));
      };
      bound = std::min(mx(a), mx(b));
      double sl = (s[j].value - s[j - 1].value) / (s[j].x - s[j - 1].x);
      double sr = (s[j + 2].value - s[j + 1].value) / (s[j + 2].x - s[j + 1].x);
      if (sl != sr) {
        // Intersection of the two secant lines.
        double x = (s[j + 1].value - s[j].value + sl * s[j].x - sr * s[j + 1].x) / (sl - sr);
        if (x > a && x < b) bound = std::min(bound, mx(x));
      }
    }
    best = std::min(best, bound);
  }
  return std::max(floor, best);
}

ConvexMinimum minimize_convex(const std::function<ConvexSample(double)>& g, double lo, double hi,
                              double rel_tol, int max_evaluations, TiePreference prefer,
                              double floor) {
  if (!(hi >= lo)) throw InvalidArgument("minimize_convex: empty interval");
  std::vector<ConvexSample> samples;
  int evals = 0;
  auto eval = [&](double target) {
    ConvexSample s = g(target);
    ++evals;
    insert_sorted(samples, s);
    return s.value;
  };
  auto finish = [&](double lower) {
    double best = kInf;
    for (const auto& s : samples) best = std::min(best, s.value);
    double slack = 1e-14 * std::abs(best);
    ConvexMinimum out;
    out.evaluations = evals;
    out.lower = std::min(lower, best);
    bool found = false;
    for (const auto& s : samples) {
      if (s.value <= best + slack) {
        if (!found || prefer == TiePreference::right) {
          out.x = s.x;
          out.value = s.value;
          found = true;
        }
      }
    }
    return out;
  };
  auto converged = [&](double lower, double best) {
    return best - lower <= rel_tol * std::abs(best) || best <= floor;
  };

  double flo = eval(lo);
  if (hi == lo) return finish(flo);
  eval(hi);
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = eval(c), fd = eval(d);
  double lower = -kInf;
  while (true) {
    double best = kInf;
    for (const auto& s : samples) best = std::min(best, s.value);
    lower = convex_lower_bound(samples, floor);
    if (converged(lower, best)) return finish(lower);
    if (evals >= max_evaluations || !(d - c > 0.0) ||
        (b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) {
      if (best - lower <= 1e-12 * std::abs(best)) return finish(lower);
      throw NonConvergence("convex minimisation did not reach the requested gap", lower, best);
    }
    bool go_left = prefer == TiePreference::left ? fc <= fd : fc < fd;
    if (go_left) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = eval(d);
    }
  }
}

double golden_argmin(const std::function<double(double)>& f, double lo, double hi,
                     int iterations, double* best_value) {
  double best_x = lo, best_f = f(lo);
  auto consider = [&](double x, double v) {
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  };
  if (hi > lo) {
    consider(hi, f(hi));
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    consider(c, fc);
    consider(d, fd);
    for (int it = 0; it < iterations && d > c; ++it) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = f(c);
        consider(c, fc);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = f(d);
        consider(d, fd);
      }
    }
  }
  if (best_value) *best_value = best_f;
  return best_x;
}

namespace {

double minimize_level(const std::function<double(std::span<const double>)>& f,
                      std::span<const double> lo, std::span<const double> hi,
                      std::vector<double>& x, std::size_t level, int iterations,
                      std::vector<double>* argmin) {
  if (level == x.size()) return f(x);
  auto inner = [&](double v) {
    x[level] = v;
    return minimize_level(f, lo, hi, x, level + 1, iterations, nullptr);
  };
  double best = 0.0;
  double xv = golden_argmin(inner, lo[level], hi[level], iterations, &best);
  if (argmin) {
    // Recover the inner optimiser at the chosen coordinate.
    x[level] = xv;
    for (std::size_t l = level + 1; l < x.size(); ++l) {
      auto inner_l = [&](double v) {
        x[l] = v;
        return minimize_level(f, lo, hi, x, l + 1, iterations, nullptr);
      };
      x[l] = golden_argmin(inner_l, lo[l], hi[l], iterations, nullptr);
    }
    *argmin = x;
    best = f(x);
  }
  return best;
}

}  // namespace

BoxMinimum minimize_box(const std::function<double(std::span<const double>)>& f,
                        std::span<const double> lo, std::span<const double> hi,
                        int iterations_per_level) {
  if (lo.size() != hi.size()) throw DimensionMismatch("minimize_box: bound lengths differ");
  BoxMinimum out;
  std::vector<double> x(lo.begin(), lo.end());
  if (x.empty()) {
    out.value = f(x);
    return out;
  }
  out.value = minimize_level(f, lo, hi, x, 0, iterations_per_level, &out.x);
  return out;
}

}  // namespace couplekit
