#pragma once

// Completely contractive bilinear actions Y × X → X, the canonical map
// θ: Y → M_l(X) and operator-algebra characterizations built on it.

#include <optional>
#include <string>
#include <vector>

#include "ncshilov/multiplier.hpp"

namespace ncshilov {

/// m(y_a, x_b) = Σ_c m[a][b](c) x_c.  When right is set, the action is
/// written x ∘ y and its matrix form is Σ_k x_ik ∘ y_kj.
struct BilinearAction {
  OperatorSpace Y, X;
  std::vector<std::vector<CVector>> m;
  std::optional<CVector> identity;
  /// Product on Y as a tensor over its basis; concrete products are used when
  /// absent and span(Y) is closed under them.
  std::optional<std::vector<std::vector<CVector>>> y_product;
  bool right = false;

  CVector apply(const CVector& y, const CVector& x) const;
  /// Shapes, finiteness, identity law and ‖e‖ ≤ 1; throws InvalidInput.
  void validate(const Tolerances& tol = {}) const;
};

/// The action of Y on X by matrix multiplication (x·y when right is set).
/// A 1×1 space Y acts by scalars.
BilinearAction product_action(const OperatorSpace& Y, const OperatorSpace& X, bool right = false,
                              const Tolerances& tol = {});

/// A tensor given by a bilinear rule on concrete matrices of one space.
std::vector<std::vector<CVector>> product_tensor(const OperatorSpace& A, const CMatrix& between,
                                                 const Tolerances& tol = {});

enum class CcVerdict { pass, fail, inconclusive };
const char* to_string(CcVerdict v);

struct CcResult {
  CcVerdict verdict = CcVerdict::inconclusive;
  double ratio = 0.0;  // best ‖[Σ y∘x]‖/(‖y‖‖x‖) found
  std::size_t level = 0;
  std::optional<LevelElement> witness_y, witness_x;
};

struct OplicationOptions {
  std::uint64_t seed = 42;
  std::size_t restarts = 32;
  std::optional<std::size_t> level_cap;  // default max(dim X, dim Y)
};

CcResult verify_cc(const BilinearAction& a, const Tolerances& tol = {}, const OplicationOptions& opts = {});

struct OplicationCertificate {
  std::optional<CcResult> cc;
  std::vector<CMatrix> theta;         // θ(y_a) ∈ E(X) (F(X) for right actions)
  std::vector<CMatrix> theta_action;  // coefficient matrix of θ(y_a) on X
  bool theta_unital = false;
  std::optional<bool> theta_homomorphism;  // empty when Y carries no product
  std::optional<bool> module_action;
  double homomorphism_residual = 0.0;
  double module_residual = 0.0;
  bool theta_completely_isometric = false;
  double theta_defect = 0.0;
  bool adjointable_range = false;
  std::optional<bool> theta_star_linear;  // only when span(Y) is *-closed
};

/// θ(y) is the multiplier realizing x ↦ m(y, x).  Throws ThmViolationAlarm if
/// some y has no realizing multiplier.
OplicationCertificate derive_theta(const BilinearAction& a, const TripleEnvelope& T, const MultiplierAlgebra& M,
                                   const Tolerances& tol = {}, const OplicationOptions& opts = {});
OplicationCertificate derive_theta(const BilinearAction& a, const TripleEnvelope& T, const Tolerances& tol = {},
                                   const OplicationOptions& opts = {});

/// Largest ‖m(a,m(b,c)) − m(m(a,b),c)‖ over basis triples (coefficient norm).
double associativity_residual(const OperatorSpace& A, const std::vector<std::vector<CVector>>& m);

struct BrsVerdict {
  CcResult cc;
  std::optional<OplicationCertificate> certificate;
  bool operator_algebra = false;  // θ a completely isometric homomorphism
  bool associative = false;       // read off θ
  double associativity_residual = 0.0;
};

BrsVerdict brs_certify(const OperatorSpace& A, const std::vector<std::vector<CVector>>& m, const CVector& e,
                       const Tolerances& tol = {}, const OplicationOptions& opts = {});

enum class NonvanishingCondition { kernel = 1, strictly_positive = 2, dense_range = 3 };

struct NonassocVerdict {
  NonvanishingCondition condition = NonvanishingCondition::strictly_positive;
  double condition_margin = 0.0;  // smallest singular value / eigenvalue / rank slack
  CcResult cc;
  std::string broken_at;          // empty when the chain of hypotheses holds
  bool associative = false;
  double associativity_residual = 0.0;
  bool theta_onto = false;        // θ(A) = M_l(A)
  std::optional<OplicationCertificate> certificate;
};

/// A has unit e for m; A_alt is A with a second operator space structure
/// and m is tested as a map A_alt × A → A.  Throws NotApplicable when the
/// selected condition fails for g = e.
NonassocVerdict nonassoc_brs(const OperatorSpace& A, const OperatorSpace& A_alt,
                             const std::vector<std::vector<CVector>>& m, const CVector& e,
                             NonvanishingCondition condition, const Tolerances& tol = {},
                             const OplicationOptions& opts = {});

}  // namespace ncshilov
