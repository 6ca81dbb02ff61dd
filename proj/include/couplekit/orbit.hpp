#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "couplekit/couple.hpp"
#include "couplekit/kfun.hpp"

namespace couplekit {

// Is b (in couple B) in the orbit of a (in couple A)?
struct OrbitProblem {
  Couple couple_a;
  Couple couple_b;
  Vector a;
  Vector b;
};

struct Domination {
  bool holds = true;
  // First t with K(t, b; B) > K(t, a; A).
  std::optional<double> witness_t;
  // min over checked t of K(t, a) - K(t, b).
  double margin = 0.0;
};

// K(t, b; B) <= K(t, a; A) for all t. Exact breakpoint comparison when both
// couples have exact K-curves (relative slack 1e-12); otherwise the solver on
// `ts` (default: 2^-20 .. 2^20), where a violation needs the certified lower
// bound of K(t, b) to exceed the value of K(t, a).
Domination dominates(const OrbitProblem& problem, std::span<const double> ts = {});

struct HlpConstruction {
  Eigen::MatrixXd matrix;  // dim(b) x dim(a), matrix * a = b
  int t_transforms = 0;
  double reconstruction_error = 0.0;  // max |matrix * a - b|
  double max_column_sum = 0.0;        // l_1 -> l_1 norm
  double max_row_sum = 0.0;           // l_inf -> l_inf norm
};

// T with Ta = b and both {l_1, l_inf} norms at most 1, built as
// signs/permutation o T-transforms o contraction o signs/permutation.
// Throws PreconditionFailed (witness {t}) when b is not dominated by a.
HlpConstruction hlp_construct(std::span<const double> a, std::span<const double> b);

// The least concave majorant of a sampled nonnegative function, anchored at
// 0 with value 0: its values at the sample points.
Vector level_majorant(std::span<const double> x, std::span<const double> a);

// The operator that turns a into its majorant: keeps abar where a touches
// the majorant and blends abar linearly between the neighbouring contact
// points elsewhere. The origin counts as a contact point with abar(0) = 0;
// past the last contact point the value abar(x1) is kept. x positive and
// increasing, a nonnegative.
Vector level_interp_operator(std::span<const double> x, std::span<const double> a,
                             std::span<const double> abar);

struct MinKernelVerdict {
  bool ok = true;
  std::optional<std::size_t> violating_index;
};

// |b(m)| <= sum_n min(w0(m)/w0(n), w1(m)/w1(n)) |a(n)| for every m.
MinKernelVerdict min_kernel_check(std::span<const double> w0, std::span<const double> w1,
                                  std::span<const double> a, std::span<const double> b);

struct Decomposition {
  std::vector<int> levels;   // nu, increasing; part nu lives at t = 2^(nu + shift)
  double shift = 0.0;
  std::vector<Vector> parts;
  double c_meas = 0.0;              // max J_inf(t_nu, u_nu) / K_1(t_nu, a)
  double recomposition_error = 0.0; // K_1(1, sum u - a)
};

// Dyadic decomposition a = sum u_nu from near-optimal splits at t = 2^nu:
// telescoping differences of the side-0 parts, extreme levels absorbing the
// tails. Without `levels`, the range -L..L is the smallest L >= 1 with
// K(2^-L) and K(2^L) / 2^L both at most eps K(1) (L <= 60). Throws
// PreconditionFailed for a = 0.
Decomposition fundamental_decomposition(const Couple& c, std::span<const double> a,
                                        double eps = 1e-6,
                                        std::optional<std::pair<int, int>> levels = {});

struct GammaEstimate {
  double estimate = 0.0;  // max over samples
  Vector per_sample;      // best c_meas found for each sample
};

// Upper estimate of the decomposition constant restricted to the samples:
// per sample the smallest c_meas over shifted dyadic grids (shifts k/8 and,
// for exact curves, shifts through each breakpoint) and single-level
// decompositions at those points. Throws InvalidArgument on no samples.
GammaEstimate gamma_estimate(const Couple& c, const std::vector<Vector>& samples,
                             double eps = 1e-6);

}  // namespace couplekit
