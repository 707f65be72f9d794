#pragma once

// Left/right multiplier algebras inside the envelope corners, multiplier
// norms, the LOB inequality, polar decomposition and Banach-Stone.

#include <optional>
#include <vector>

#include "ncshilov/envelope.hpp"

namespace ncshilov {

enum class MultiplierKind { left, right, adjointable_left, adjointable_right, imprimitivity_left };

const char* to_string(MultiplierKind k);

struct MultiplierAlgebra {
  MultiplierKind kind = MultiplierKind::left;
  /// Elements of E(X) (K×K) for left kinds, of F(X) (L×L) for right kinds.
  std::vector<CMatrix> element_basis;
  /// Matching operators on X as coefficient matrices (column k = image of basis k).
  std::vector<CMatrix> action_basis;
  bool unit_included = false;

  std::size_t dim() const { return element_basis.size(); }
  bool right_side() const { return kind == MultiplierKind::right || kind == MultiplierKind::adjointable_right; }
};

/// Coefficient matrix of x ↦ a·x (left) or x ↦ x·a (right) on X.  Left
/// actions compose as a homomorphism, right actions as an anti-homomorphism.
CMatrix multiplier_action(const TripleEnvelope& T, const CMatrix& a, bool right, const Tolerances& tol = {});

MultiplierAlgebra left_multipliers(const TripleEnvelope& T, const Tolerances& tol = {});
MultiplierAlgebra right_multipliers(const TripleEnvelope& T, const Tolerances& tol = {});
MultiplierAlgebra adjointable_left(const TripleEnvelope& T, const Tolerances& tol = {});
MultiplierAlgebra adjointable_right(const TripleEnvelope& T, const Tolerances& tol = {});
/// K_l(X); E(X) is unital here, so it coincides with M_l(X).
MultiplierAlgebra imprimitivity_left(const TripleEnvelope& T, const Tolerances& tol = {});

/// The element of M realizing op; throws NotAMultiplier if none does.
CMatrix realize(const MultiplierAlgebra& M, const CMatrix& op, const Tolerances& tol = {});

struct CbSearchOptions {
  std::uint64_t seed = 42;
  std::size_t restarts = 64;
  std::optional<std::size_t> level_cap;  // default: Smith level of X
};

struct MultiplierNormResult {
  double multiplier_norm = 0.0;
  double cb_norm_lower = 0.0;
  double cb_norm_upper = 0.0;  // min of multiplier_norm and the rank-one certificate
  bool rank_one_certificate = false;
  CMatrix realizing_element;
};

MultiplierNormResult multiplier_norm(const TripleEnvelope& T, const MultiplierAlgebra& M, const CMatrix& op,
                                     const Tolerances& tol = {}, const CbSearchOptions& opts = {});

/// Lower bound for ‖op‖_cb of a linear map on X (coefficient matrix).
double cb_norm_lower(const OperatorSpace& X, const CMatrix& op, const CbSearchOptions& opts = {});

/// Certified upper bound for ‖v ⊗ f‖_cb = ‖v‖·‖f‖ when op has rank one.  The
/// dual norm ‖f‖ = 1/min{‖x‖ : f(x) = 1} is bounded through a trace-class
/// witness annihilating ker f.
struct RankOneBound {
  double cb_upper = 0.0;
  double min_norm_upper = 0.0;  // ‖x‖ at the best feasible point
  double min_norm_lower = 0.0;  // certified by duality
  double v_norm = 0.0;
};
std::optional<RankOneBound> rank_one_cb_bound(const OperatorSpace& X, const CMatrix& op,
                                              const Tolerances& tol = {});

struct LobResult {
  bool passed = true;
  double worst = 0.0;                   // most negative scaled eigenvalue seen
  std::vector<CVector> witness;         // tuple of X coordinates on failure
  std::size_t samples_checked = 0;
};

/// Samples tuples (x_1..x_k) and checks M²[<x_i|x_j>] − [<Sx_i|Sx_j>] ≥ 0,
/// with <x|y> = J(x)*J(y) and S the left multiplier realizing op.
LobResult lob_verify(const TripleEnvelope& T, const MultiplierAlgebra& Ml, const CMatrix& op, double M_bound,
                     std::size_t sample_count, std::uint64_t seed, const Tolerances& tol = {});

struct PolarDecomposition {
  CMatrix V, absT;
};
PolarDecomposition polar_decompose(const MultiplierAlgebra& Al, const CMatrix& t, const Tolerances& tol = {});

struct UnitalAlgebra {
  OperatorSpace space;
  CVector unit;  // coordinates of the identity
};

struct BanachStoneResult {
  CMatrix u;             // T(1), so that T(a) = u·π(a)
  CMatrix u_statement;   // T(1)⁻¹, so that T(a) = u_statement⁻¹·π(a)
  CMatrix pi;            // coefficient matrix of π: A → B
  double unitary_defect = 0.0;
  double factorization_residual = 0.0;
  double homomorphism_residual = 0.0;
};

/// Factors a surjective complete isometry T: A → B between unital operator
/// algebras as T = u·π with u unitary in the envelope and π a completely
/// isometric homomorphism.  tmap maps A coordinates to B coordinates.
BanachStoneResult banach_stone(const UnitalAlgebra& A, const UnitalAlgebra& B, const CMatrix& tmap,
                               const Tolerances& tol = {}, const CbSearchOptions& opts = {});

}  // namespace ncshilov
