#pragma once

// Minimal operator spaces of finite-dimensional Banach spaces: diagonal
// realizations over extreme dual functionals, Banach multipliers through the
// eigenvector criterion and cross-validation with the envelope pipeline.

#include <string>
#include <vector>

#include "ncshilov/multiplier.hpp"

namespace ncshilov {

enum class BallKind { l1, linf, l2, polytope };
const char* to_string(BallKind k);

/// A norm on ℂ^d.  A polytope ball is the circled convex hull of its vertices,
/// so ‖ψ‖* = max_i |ψ(v_i)|.
struct BanachSpace {
  std::size_t dim = 0;
  BallKind kind = BallKind::linf;
  std::vector<CVector> vertices;

  void validate() const;
  /// ψ ↦ ‖ψ‖* for a row functional given as a vector of its values on e_k.
  double dual_norm(const CVector& psi) const;
  /// ‖x‖; polytope balls throw NotApplicable.
  double norm(const CVector& x) const;
  /// Extreme dual functionals up to the circle action: exact lists for ℓ∞,
  /// circle grids of the given resolution for the others (seeded beyond d = 2).
  std::vector<CVector> dual_extreme_sample(std::size_t count, std::uint64_t seed) const;
  bool exact_extremes() const { return kind == BallKind::linf; }
};

struct MinRealization {
  OperatorSpace space;
  std::vector<CVector> sample;  // functionals indexing the diagonal
  bool exact = false;
};

/// Diagonal realization x ↦ diag(ψ_1(x), …, ψ_N(x)).
MinRealization min_realization(const std::vector<CVector>& functionals, bool exact, const Tolerances& tol = {});
/// Resamples up to 8 times when the sample does not separate X.
MinRealization realize_min(const BanachSpace& B, std::size_t sample_size, std::uint64_t seed,
                           const Tolerances& tol = {});

struct BanachMultiplierCheck {
  bool is_multiplier = false;
  double M_bound = 0.0;          // max |λ_ψ| over the sample
  double worst_residual = 0.0;   // ‖ψ∘T − λ_ψ ψ‖/‖ψ‖
};
BanachMultiplierCheck banach_multiplier_check(const BanachSpace& B, const MinRealization& R, const CMatrix& op,
                                              const Tolerances& tol = {});

/// Operators on X having every sampled functional as a left eigenvector.
std::vector<CMatrix> banach_multipliers(const MinRealization& R, const Tolerances& tol = {});

struct NormComparison {
  CMatrix op;
  double banach = 0.0;      // M_bound
  double envelope = 0.0;    // multiplier norm in M_l
};

struct CrossValidation {
  std::size_t ml_dim = 0, mr_dim = 0, banach_dim = 0;
  bool dims_agree = false;
  bool spans_agree = false;        // every Banach multiplier is realized in M_l and M_r
  double max_norm_gap = 0.0;
  std::vector<NormComparison> norms;
  std::vector<std::string> warnings;  // "SampledOnlyWarning: ..." for sampled realizations
  bool exact = false;
};

CrossValidation cross_validate_multipliers(const BanachSpace& B, const MinRealization& R, const Tolerances& tol = {},
                                           const EnvelopeOptions& opts = {});

struct EnvBanachCertificate {
  bool env = false;
  double min_dual_norm = 0.0;  // over the sample; bounded away from 0
};
EnvBanachCertificate env_banach_check(const BanachSpace& B, const MinRealization& R);

struct SeparationCheck {
  double min_section = 0.0;       // min over points of Σ_k |ψ(b_k)|²
  std::size_t distinct_points = 0;  // sample points modulo the circle action
};
SeparationCheck separation_check(const MinRealization& R, const Tolerances& tol = {});

}  // namespace ncshilov
