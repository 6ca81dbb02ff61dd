#include "couplekit/smoothness.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "couplekit/errors.hpp"
#include "couplekit/kernels.hpp"

namespace couplekit {

GridFunction::GridFunction(double h, Vector values) : h_(h), values_(std::move(values)) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("grid step must be positive");
  if (values_.size() < 2) throw InvalidArgument("grid function needs at least two samples");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("grid function samples must be finite");
  }
}

Vector lag_maxima(const GridFunction& f) { return parallel::lag_maxima(f.values()); }

double modulus_of_continuity(const GridFunction& f, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("t must be nonnegative");
  Vector d = lag_maxima(f);
  double m = 0.0;
  for (std::size_t lag = 1; lag < d.size(); ++lag) {
    if (static_cast<double>(lag) * f.step() > t) break;
    m = std::max(m, d[lag]);
  }
  return m;
}

namespace {

double sup_formula(const Vector& d, double h, double t) {
  double m = 0.0;
  for (std::size_t lag = 1; lag < d.size(); ++lag) {
    m = std::max(m, d[lag] / (2.0 + static_cast<double>(lag) * h / t));
  }
  return m;
}

}  // namespace

double k_c0c1(const GridFunction& f, double t) {
  if (!(t > 0.0)) throw InvalidArgument("t must be positive");
  return sup_formula(lag_maxima(f), f.step(), t);
}

ConcaveCurve modulus_majorant(const GridFunction& f) {
  Vector d = lag_maxima(f);
  std::vector<std::pair<double, double>> pts;
  double running = 0.0;
  for (std::size_t lag = 1; lag < d.size(); ++lag) {
    running = std::max(running, d[lag]);
    pts.emplace_back(static_cast<double>(lag) * f.step(), running);
  }
  return least_concave_majorant(std::move(pts));
}

MajorantComparison majorant_equivalence(const GridFunction& f, double t) {
  if (!(t > 0.0)) throw InvalidArgument("t must be positive");
  MajorantComparison r;
  r.lhs = k_c0c1(f, t);
  r.rhs = 0.5 * modulus_majorant(f)(t);
  if (r.lhs == 0.0 && r.rhs == 0.0) {
    r.ratio = 1.0;
  } else {
    r.ratio = r.lhs / r.rhs;
  }
  if (!(r.ratio >= kMajorantRatioLow && r.ratio <= kMajorantRatioHigh)) {
    throw InternalError("sup formula and modulus majorant differ by ratio " +
                        std::to_string(r.ratio));
  }
  return r;
}

Eigen::MatrixXd difference_embed(const GridFunction& f) {
  const auto n = static_cast<Eigen::Index>(f.points());
  Eigen::MatrixXd b(n, n);
  const Vector& v = f.values();
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) b(x, y) = v[x] - v[y];
  }
  return b;
}

double embedded_k(const Eigen::MatrixXd& b, double h, double t) {
  return parallel::pair_family_max(b, h, t);
}

Couple embedded_couple(std::size_t points, double h) {
  if (points < 2) throw InvalidArgument("embedded couple needs at least two points");
  Vector w0, w1;
  for (std::size_t x = 0; x < points; ++x) {
    for (std::size_t y = 0; y < points; ++y) {
      if (x == y) continue;
      w0.push_back(0.5);
      double dist = static_cast<double>(x > y ? x - y : y - x) * h;
      w1.push_back(1.0 / dist);
    }
  }
  std::size_t n = w0.size();
  return make_couple(n, std::move(w0), std::move(w1), Exponent::infinity(),
                     Exponent::infinity());
}

Vector embedded_element(const Eigen::MatrixXd& b) {
  Vector out;
  for (Eigen::Index x = 0; x < b.rows(); ++x) {
    for (Eigen::Index y = 0; y < b.cols(); ++y) {
      if (x != y) out.push_back(b(x, y));
    }
  }
  return out;
}

}  // namespace couplekit
