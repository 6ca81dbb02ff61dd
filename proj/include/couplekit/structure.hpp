#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "couplekit/couple.hpp"
#include "couplekit/kfun.hpp"

namespace couplekit {

// Dense matrix from the ambient space of `source` to that of `target`.
class LinearMap {
 public:
  // Throws DimensionMismatch unless matrix is target.dim() x source.dim().
  LinearMap(Eigen::MatrixXd matrix, Couple source, Couple target);

  const Eigen::MatrixXd& matrix() const { return m_; }
  const Couple& source() const { return source_; }
  const Couple& target() const { return target_; }
  Vector apply(std::span<const double> a) const;

 private:
  Eigen::MatrixXd m_;
  Couple source_;
  Couple target_;
};

// s o t. Throws DimensionMismatch unless t.target() has s.source()'s dimension.
LinearMap compose(const LinearMap& s, const LinearMap& t);
LinearMap identity_map(const Couple& c);

// Interval certain to contain an operator norm; lower == upper when a
// closed form applies.
struct NormBound {
  double lower = 0.0;
  double upper = 0.0;
  bool exact() const { return lower == upper; }
};

// Norm of T from l_p(w) (source side s) to l_q(v) (target side s).
// Closed forms: p = 1 (columns), q = inf (rows), p = q = 2 (largest
// singular value), p = inf or q = 1 (sign vectors, up to 20 coordinates).
// Otherwise power iteration below and Hoelder estimates above.
NormBound side_operator_norm(const LinearMap& t, Side s);

// max of the two side norms.
NormBound operator_norm_l(const LinearMap& t);

// max over samples and t of K_lower(t, Ta) / K_upper(t, a): a certified
// lower bound for the bounded-map norm. Samples with K(t, a) = 0 are skipped.
double operator_norm_b_lower(const LinearMap& t, const std::vector<Vector>& samples,
                             std::span<const double> ts, const KOptions& opt = {});

// A subspace of a couple's ambient space with the inherited norms, given by
// coordinates or by a basis of at most three vectors.
class SubcoupleSpec {
 public:
  static SubcoupleSpec coordinates(const Couple& ambient, std::vector<std::size_t> keep);
  static SubcoupleSpec span(const Couple& ambient, const std::vector<Vector>& basis);

  const Couple& ambient() const { return ambient_; }
  bool is_coordinate() const { return coordinate_; }
  // Kept coordinates, increasing (coordinate subcouples only).
  const std::vector<std::size_t>& keep() const { return keep_; }
  // n x k, columns span the subspace.
  const Eigen::MatrixXd& basis() const { return basis_; }
  std::size_t dim() const { return static_cast<std::size_t>(basis_.cols()); }
  // The ambient vector with these coefficients.
  Vector embed(std::span<const double> coeffs) const;
  // The couple carried by a coordinate subcouple.
  Couple restricted() const;

 private:
  SubcoupleSpec(Couple ambient, bool coordinate, std::vector<std::size_t> keep,
                Eigen::MatrixXd basis)
      : ambient_(std::move(ambient)), coordinate_(coordinate), keep_(std::move(keep)),
        basis_(std::move(basis)) {}
  Couple ambient_;
  bool coordinate_;
  std::vector<std::size_t> keep_;
  Eigen::MatrixXd basis_;
};

// K_1(t, x) in the subcouple: splits restricted to the subspace. Exact for
// coordinate subcouples (general solver) and one-vector spans; nested
// golden-section search for spans of two or three vectors.
double subcouple_k(const SubcoupleSpec& spec, std::span<const double> coeffs, double t);

struct SubcoupleVerdict {
  bool is_b = true;
  // First (coefficients, t) where the subcouple K exceeds the ambient K.
  std::optional<Vector> witness;
  std::optional<double> witness_t;
  // max over checks of (K_sub - K_ambient) / K_ambient.
  double max_gap = 0.0;
};

// Compares the subcouple K with the ambient K on samples (coefficient
// vectors) and a t-grid. K_ambient <= K_sub always; a violation beyond
// solver tolerance throws InternalError.
SubcoupleVerdict is_b_subcouple(const SubcoupleSpec& spec, const std::vector<Vector>& samples,
                                std::span<const double> ts, double rel_tol = 1e-7);

// Quotient by the coordinates in `kill`: the couple on the remaining
// coordinates. Throws InvalidArgument when every coordinate is killed.
Couple quotient_couple(const Couple& ambient, const std::vector<std::size_t>& kill);
// Image of an ambient element in the quotient.
Vector quotient_class(std::size_t n, const std::vector<std::size_t>& kill,
                      std::span<const double> a);

struct QuotientVerdict {
  bool is_b = true;
  double max_gap = 0.0;
  std::optional<Vector> witness;
  std::optional<double> witness_t;
};

// Compares K(t, [b]) in the quotient couple with inf over killed
// coordinates c of K(t, b + c) in the ambient couple. The infimum is
// searched by golden section over c (at most two killed coordinates).
QuotientVerdict is_b_quotient(const Couple& ambient, const std::vector<std::size_t>& kill,
                              const std::vector<Vector>& samples, std::span<const double> ts,
                              double rel_tol = 1e-7);

enum class RetractKind { l, b, lb, bl };
RetractKind parse_retract_kind(const std::string& name);

struct RetractVerdict {
  bool ok = true;
  // "not identity", "alpha norm" or "beta norm"; empty when ok.
  std::string failed_clause;
};

// alpha: A -> B, beta: B -> A. Checks beta o alpha = id (1e-12) and the
// norm clauses: l-maps need operator_norm_l <= 1, b-maps a sampled
// K-ratio <= 1 + 1e-9 (samples_a in A for alpha, samples_b in B for beta).
RetractVerdict retract_check(const LinearMap& alpha, const LinearMap& beta, RetractKind kind,
                             const std::vector<Vector>& samples_a,
                             const std::vector<Vector>& samples_b, std::span<const double> ts);

// Inclusion of a coordinate subcouple into its ambient couple, and the
// projection that keeps those coordinates and zeroes the rest.
LinearMap coordinate_injection(const SubcoupleSpec& spec);
LinearMap coordinate_projection(const SubcoupleSpec& spec);

struct Extension {
  Vector coeffs;           // S b = <coeffs, b>
  double bound0 = 0.0;     // dual norm of S on side 0, divided by omega0
  double bound1 = 0.0;     // dual norm of S on side 1, divided by omega1
  int steps = 0;           // dimensions added
};

// Extends the functional given by its values on `basis` to the whole space,
// keeping |S b| <= omega0 K(omega1 / omega0, b). Adds one coordinate
// direction at a time and takes the midpoint of the feasible interval.
// Throws PreconditionFailed (witness: offending subspace vector) when the
// functional already exceeds the bound on the subspace, Unsupported for
// ambient dimension above 4.
Extension hahn_banach_extend(const Couple& ambient, const std::vector<Vector>& basis,
                             const Vector& values, double omega0, double omega1);

struct DualIdentity {
  double k_inf = 0.0;     // K_inf(t, a), solver value
  double dual_sup = 0.0;  // max <g, a> / (N0'(g) + N1'(g) / t)
  Vector argmax;          // maximising g
};

// Computes both sides of the duality between K_inf(t) and the dual sum
// norm. The dual side is minimised over the hyperplane <g, a> = 1 by nested
// golden sections (n <= 4). Throws NonConvergence when the two values
// differ by more than 1e-6 relative.
DualIdentity dual_k_identity(const Couple& c, std::span<const double> a, double t);

// Sampled embedding a -> (<g_j, a>)_j into the l_inf couple with weights
// 1 / N0'(g_j), 1 / N1'(g_j).
struct LinfEmbedding {
  Vector values;
  Couple couple;
};

LinfEmbedding embed_linf(const Couple& c, const std::vector<Vector>& duals,
                         std::span<const double> a);
// K_inf(t, .) of the embedded element: max_j |<g_j, a>| / (N0'(g_j) + N1'(g_j) / t).
double embedded_k_inf(const LinfEmbedding& e, double t);

}  // namespace couplekit
