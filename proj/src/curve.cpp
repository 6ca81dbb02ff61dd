#include "couplekit/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "couplekit/errors.hpp"

namespace couplekit {

namespace {

constexpr double kValueTol = 1e-12;
constexpr double kSlopeTol = 1e-9;

double slope_scale(const std::vector<double>& s) {
  double m = 0.0;
  for (double x : s) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

ConcaveCurve::ConcaveCurve(double origin, std::vector<double> breakpoints,
                           std::vector<double> values, double initial_slope,
                           double terminal_slope)
    : origin_(origin),
      ts_(std::move(breakpoints)),
      vs_(std::move(values)),
      initial_slope_(initial_slope),
      terminal_slope_(terminal_slope) {
  if (ts_.size() != vs_.size()) {
    throw InvalidCurve("curve: breakpoints and values differ in length");
  }
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(origin_) || !finite(initial_slope_) || !finite(terminal_slope_) ||
      !std::all_of(ts_.begin(), ts_.end(), finite) ||
      !std::all_of(vs_.begin(), vs_.end(), finite)) {
    throw InvalidCurve("curve: non-finite data");
  }
  double scale = std::abs(origin_);
  for (double v : vs_) scale = std::max(scale, std::abs(v));
  const double vtol = kValueTol * std::max(scale, std::numeric_limits<double>::min());

  if (origin_ < -vtol) throw InvalidCurve("curve: phi(0+) is negative");
  for (std::size_t i = 0; i < ts_.size(); ++i) {
    if (!(ts_[i] > 0.0)) throw InvalidCurve("curve: breakpoints must be positive");
    if (i > 0 && !(ts_[i] > ts_[i - 1])) {
      throw InvalidCurve("curve: breakpoints must be strictly increasing");
    }
    if (vs_[i] < -vtol) throw InvalidCurve("curve: negative value");
    double prev = i == 0 ? origin_ : vs_[i - 1];
    if (vs_[i] < prev - vtol) throw InvalidCurve("curve: values decrease");
  }

  if (ts_.empty()) {
    double s = std::max(std::abs(initial_slope_), std::abs(terminal_slope_));
    if (std::abs(initial_slope_ - terminal_slope_) > kSlopeTol * s) {
      throw InvalidCurve("curve: without breakpoints the initial and terminal slopes must agree");
    }
  } else {
    double predicted = origin_ + initial_slope_ * ts_[0];
    double tol = 1e-9 * std::max({std::abs(predicted), std::abs(vs_[0]),
                                  std::numeric_limits<double>::min()});
    if (std::abs(predicted - vs_[0]) > tol) {
      throw InvalidCurve("curve: initial slope inconsistent with first value");
    }
  }

  std::vector<double> s = slopes();
  const double stol = kSlopeTol * std::max(slope_scale(s), std::numeric_limits<double>::min());
  if (terminal_slope_ < -stol) throw InvalidCurve("curve: negative terminal slope");
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] > s[i - 1] + stol) throw InvalidCurve("curve: slopes increase (not concave)");
  }
}

ConcaveCurve ConcaveCurve::from_values(double origin, std::vector<double> breakpoints,
                                       std::vector<double> values, double terminal_slope) {
  double initial = terminal_slope;
  if (!breakpoints.empty()) {
    if (values.empty()) throw InvalidCurve("curve: breakpoints and values differ in length");
    initial = (values[0] - origin) / breakpoints[0];
  }
  return ConcaveCurve(origin, std::move(breakpoints), std::move(values), initial,
                      terminal_slope);
}

ConcaveCurve ConcaveCurve::from_slopes(double origin, std::vector<double> breakpoints,
                                       const std::vector<double>& slopes) {
  if (slopes.size() != breakpoints.size() + 1) {
    throw InvalidCurve("curve: need one more slope than breakpoints");
  }
  std::vector<double> values(breakpoints.size());
  double prev_t = 0.0, prev_v = origin;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    prev_v += slopes[i] * (breakpoints[i] - prev_t);
    prev_t = breakpoints[i];
    values[i] = prev_v;
  }
  return ConcaveCurve(origin, std::move(breakpoints), std::move(values), slopes.front(),
                      slopes.back());
}

ConcaveCurve ConcaveCurve::linear(double origin, double slope) {
  return ConcaveCurve(origin, {}, {}, slope, slope);
}

std::vector<double> ConcaveCurve::slopes() const {
  std::vector<double> s;
  s.reserve(ts_.size() + 1);
  s.push_back(initial_slope_);
  for (std::size_t i = 1; i < ts_.size(); ++i) {
    s.push_back((vs_[i] - vs_[i - 1]) / (ts_[i] - ts_[i - 1]));
  }
  if (!ts_.empty()) s.push_back(terminal_slope_);
  return s;
}

double ConcaveCurve::operator()(double t) const {
  if (!(t > 0.0)) throw InvalidArgument("t must be positive");
  if (ts_.empty() || t <= ts_.front()) {
    if (!ts_.empty() && t == ts_.front()) return vs_.front();
    return origin_ + initial_slope_ * t;
  }
  if (t >= ts_.back()) return vs_.back() + terminal_slope_ * (t - ts_.back());
  auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
  std::size_t j = static_cast<std::size_t>(it - ts_.begin());
  double t0 = ts_[j - 1], t1 = ts_[j];
  if (t == t0) return vs_[j - 1];
  double lambda = (t - t0) / (t1 - t0);
  return vs_[j - 1] + lambda * (vs_[j] - vs_[j - 1]);
}

ConcaveCurve ConcaveCurve::simplified() const {
  std::vector<double> s = slopes();
  std::vector<double> ts, vs;
  for (std::size_t i = 0; i < ts_.size(); ++i) {
    double left = s[i], right = s[i + 1];
    if (std::abs(left - right) > 1e-13 * std::max(std::abs(left), std::abs(right))) {
      ts.push_back(ts_[i]);
      vs.push_back(vs_[i]);
    }
  }
  double initial = ts.empty() ? terminal_slope_ : initial_slope_;
  return ConcaveCurve(origin_, std::move(ts), std::move(vs), initial, terminal_slope_);
}

double curve_eval(const ConcaveCurve& f, double t) { return f(t); }

CurveComparison compare_curves(const ConcaveCurve& f, const ConcaveCurve& g, double rel_tol) {
  CurveComparison out;
  std::vector<double> ts = f.breakpoints();
  ts.insert(ts.end(), g.breakpoints().begin(), g.breakpoints().end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  auto tol_at = [&](double a, double b) { return rel_tol * std::max(std::abs(a), std::abs(b)); };

  out.margin = std::numeric_limits<double>::infinity();
  auto fail = [&](double t) {
    if (out.leq) {
      out.leq = false;
      out.witness = t;
    }
  };

  double d0 = g.origin() - f.origin();
  out.margin = std::min(out.margin, d0);
  if (d0 < -tol_at(f.origin(), g.origin())) {
    // f > g just right of 0; pick a point where the linear gap is still negative.
    double t1 = ts.empty() ? 1.0 : ts.front();
    double d1 = g(t1) - f(t1);
    fail(d1 < 0.0 ? t1 : 0.5 * t1 * d0 / (d0 - d1));
  }
  for (double t : ts) {
    double fv = f(t), gv = g(t);
    out.margin = std::min(out.margin, gv - fv);
    if (gv - fv < -tol_at(fv, gv)) fail(t);
  }
  double sf = f.terminal_slope(), sg = g.terminal_slope();
  if (sg - sf < -tol_at(sf, sg)) {
    double last = ts.empty() ? 1.0 : ts.back();
    double gap = std::max(0.0, g(last) - f(last));
    out.margin = -std::numeric_limits<double>::infinity();
    fail(last + 2.0 * gap / (sf - sg) + 1.0);
  }
  return out;
}

bool curve_leq(const ConcaveCurve& f, const ConcaveCurve& g, double rel_tol) {
  return compare_curves(f, g, rel_tol).leq;
}

ConcaveCurve curve_max(const ConcaveCurve& f, const ConcaveCurve& g) {
  std::vector<std::pair<double, double>> pts;
  for (const ConcaveCurve* c : {&f, &g}) {
    for (double t : c->breakpoints()) pts.emplace_back(t, std::max(f(t), g(t)));
  }
  return concave_hull(std::max(f.origin(), g.origin()), std::move(pts),
                      std::max(f.terminal_slope(), g.terminal_slope()));
}

ConcaveCurve concave_hull(double origin, std::vector<std::pair<double, double>> points,
                          double terminal_slope) {
  if (!(terminal_slope >= 0.0) || !(origin >= 0.0)) {
    throw InvalidArgument("concave hull: origin and terminal slope must be nonnegative");
  }
  for (auto& [t, y] : points) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("concave hull: t must be positive");
    if (!std::isfinite(y)) throw InvalidArgument("concave hull: values must be finite");
  }
  std::sort(points.begin(), points.end());
  std::vector<std::pair<double, double>> pts;
  pts.emplace_back(0.0, origin);
  for (auto& p : points) {
    if (pts.size() > 1 && pts.back().first == p.first) {
      pts.back().second = std::max(pts.back().second, p.second);
    } else {
      pts.push_back(p);
    }
  }
  // The ray with the terminal slope leaves the hull at the maximiser of y - s t.
  std::size_t vstar = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].second - terminal_slope * pts[i].first >=
        pts[vstar].second - terminal_slope * pts[vstar].first) {
      vstar = i;
    }
  }
  std::vector<std::pair<double, double>> hull;
  for (std::size_t i = 0; i <= vstar; ++i) {
    const auto& c = pts[i];
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      // Pop b when it lies on or below the chord a-c.
      double cross = (b.first - a.first) * (c.second - a.second) -
                     (b.second - a.second) * (c.first - a.first);
      if (cross >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(c);
  }
  std::vector<double> ts, vs;
  for (std::size_t i = 1; i < hull.size(); ++i) {
    ts.push_back(hull[i].first);
    vs.push_back(hull[i].second);
  }
  if (ts.empty()) return ConcaveCurve::linear(origin, terminal_slope);
  return ConcaveCurve::from_values(origin, std::move(ts), std::move(vs), terminal_slope);
}

ConcaveCurve least_concave_majorant(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw InvalidArgument("least concave majorant of an empty point set");
  for (auto& [t, y] : points) {
    if (!(y >= 0.0)) throw InvalidArgument("least concave majorant: values must be >= 0");
  }
  return concave_hull(0.0, std::move(points), 0.0);
}

ConcaveCurve lower_envelope(std::span<const std::pair<double, double>> lines) {
  if (lines.empty()) throw InvalidArgument("lower envelope of no lines");
  std::vector<std::pair<double, double>> ls(lines.begin(), lines.end());
  for (auto& [c, d] : ls) {
    if (!(c >= 0.0) || !(d >= 0.0) || !std::isfinite(c) || !std::isfinite(d)) {
      throw InvalidArgument("lower envelope: intercepts and slopes must be finite and >= 0");
    }
  }
  // Steepest first; among equal slopes keep the lowest intercept.
  std::sort(ls.begin(), ls.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  auto cross_at = [](const std::pair<double, double>& a, const std::pair<double, double>& b) {
    return (b.first - a.first) / (a.second - b.second);
  };
  std::vector<std::pair<double, double>> st;
  for (const auto& l : ls) {
    // Nearly parallel lines: keep the lower one. Their intersection is
    // numerically meaningless and would break the ordering of breakpoints.
    if (!st.empty() && st.back().second - l.second <= 1e-12 * st.back().second) {
      if (l.first >= st.back().first) continue;
      st.pop_back();
    }
    while (!st.empty()) {
      if (cross_at(st.back(), l) <= 0.0) {
        st.pop_back();
        continue;
      }
      if (st.size() >= 2 && cross_at(st[st.size() - 2], l) <= cross_at(st[st.size() - 2], st.back())) {
        st.pop_back();
        continue;
      }
      break;
    }
    st.push_back(l);
  }
  // Nearly concurrent triples give breakpoints closer than rounding can
  // resolve; drop the middle line of such a triple.
  for (std::size_t i = 0; i + 2 < st.size();) {
    double t0 = cross_at(st[i], st[i + 1]), t1 = cross_at(st[i + 1], st[i + 2]);
    if (t1 - t0 <= 1e-12 * std::abs(t1)) {
      st.erase(st.begin() + static_cast<std::ptrdiff_t>(i + 1));
      if (i > 0) --i;
    } else {
      ++i;
    }
  }
  std::vector<double> ts, vs;
  for (std::size_t i = 0; i + 1 < st.size(); ++i) {
    double t = cross_at(st[i], st[i + 1]);
    ts.push_back(t);
    vs.push_back(std::min(st[i].first + st[i].second * t, st[i + 1].first + st[i + 1].second * t));
  }
  if (ts.empty()) return ConcaveCurve::linear(st[0].first, st[0].second);
  return ConcaveCurve(st.front().first, std::move(ts), std::move(vs), st.front().second,
                      st.back().second);
}

}  // namespace couplekit
