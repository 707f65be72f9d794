#pragma once

// Linking algebra of the natural extension of X inside M_{r+c}, the Shilov
// boundary ideal, and the triple envelope T(X) with its corner algebras.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ncshilov/isometry.hpp"
#include "ncshilov/opspace.hpp"
#include "ncshilov/staralg.hpp"

namespace ncshilov {

struct EnvelopeOptions {
  std::uint64_t seed = 42;
  std::size_t restarts = 64;
  /// Overrides the Smith level used by every complete-isometry search.
  std::optional<std::size_t> level_cap;
  GenerateOptions generate;
};

struct LinkingAlgebra {
  Eigen::Index r = 0, c = 0;
  StarAlgebra L;
  /// Block isometries are rotated so that ρ_i(p) = diag(I_{k_i}, 0).
  BlockDecomposition D;
  CMatrix p, q;
  std::vector<CMatrix> corners;  // corner_embed of the X basis
  std::vector<Eigen::Index> k, l;

  /// t_i(b): the k_i×l_i corner of ρ_i(corner(b)) for every basis vector b.
  std::vector<CMatrix> block_images(std::size_t block) const;
};

LinkingAlgebra linking_algebra(const OperatorSpace& X, const Tolerances& tol = {},
                               const EnvelopeOptions& opts = {});

/// Largest ratio ‖ρ_S(x)‖_n/‖ρ_rest(x)‖_n over the Smith range of levels,
/// where S is a set of blocks and rest its complement.  S is a boundary ideal
/// iff the ratio is ≤ 1.
struct IdealTest {
  double ratio = 0.0;
  bool boundary = false;
  std::optional<LevelElement> witness;
};
IdealTest test_ideal(const LinkingAlgebra& Lk, const std::vector<std::size_t>& blocks,
                     const Tolerances& tol = {}, const EnvelopeOptions& opts = {});

struct BoundaryResult {
  BlockIdeal ideal;
  std::vector<double> block_ratios;  // per block, against all other blocks
  bool greedy = false;
  std::vector<std::string> warnings;
};

/// Per-block inclusion, union post-check, greedy fallback.
BoundaryResult boundary_blocks(const LinkingAlgebra& Lk, const Tolerances& tol = {},
                               const EnvelopeOptions& opts = {});

/// Starting from all candidates, gives blocks back to the kept set in the
/// given order until the remaining set passes is_boundary.
BlockIdeal reduce_boundary_ideal(const std::vector<std::size_t>& candidates,
                                 const std::function<bool(const std::vector<std::size_t>&)>& is_boundary);

/// Oracle: the largest block subset whose quotient stays completely isometric.
BlockIdeal exhaustive_boundary_ideal(const LinkingAlgebra& Lk, const Tolerances& tol = {},
                                     const EnvelopeOptions& opts = {});

class TripleEnvelope {
public:
  explicit TripleEnvelope(OperatorSpace X) : source(std::move(X)) {}

  OperatorSpace source;
  LinkingAlgebra linking;
  BlockIdeal shilov_ideal;
  std::vector<std::size_t> kept;           // block indices of L kept in C*(∂X)
  std::vector<Eigen::Index> k, l;          // corner sizes of kept blocks
  std::vector<Eigen::Index> k_off, l_off;  // offsets inside E and F
  Eigen::Index K = 0, Lsize = 0;
  StarAlgebra quotient;           // C*(∂X) ⊂ M_{K+L}, corners E (top) and F (bottom)
  StarAlgebra E, F;               // ⊕M_{k_i} ⊂ M_K, ⊕M_{l_i} ⊂ M_L
  std::vector<CMatrix> J;         // K×L images of the X basis
  std::vector<CMatrix> T_basis;   // K×L matrix units spanning T(X)
  IsometryReport j_report;
  std::vector<std::string> warnings;

  std::size_t dim_T() const { return T_basis.size(); }
  /// Image in C*(∂X) of an element of L (ambient r+c).
  CMatrix represent(const CMatrix& a) const;
  CMatrix J_of(const CVector& coeffs) const;
  /// Coordinates of t ∈ J(X) over the X basis; throws InvalidInput otherwise.
  CVector J_coordinates(const CMatrix& t, const Tolerances& tol = {}) const;
  /// Minimum-norm preimages in L of elements of C*(∂X).
  std::vector<CMatrix> lift(const std::vector<CMatrix>& m) const;
  /// Element a ∈ E, F embedded in C*(∂X).
  CMatrix embed_E(const CMatrix& a) const;
  CMatrix embed_F(const CMatrix& a) const;
};

TripleEnvelope triple_envelope(const OperatorSpace& X, const Tolerances& tol = {},
                               const EnvelopeOptions& opts = {});

struct EnvCheck {
  bool left_env = false, right_env = false;
};
EnvCheck env_check(const TripleEnvelope& T, const Tolerances& tol = {});

/// Triple-product law φ(x y* z) = φ(x) φ(y)* φ(z) on basis triples.  phi maps
/// coordinates over T1 to coordinates over T2.
bool triple_iso_check(const std::vector<CMatrix>& T1, const std::vector<CMatrix>& T2, const CMatrix& phi,
                      const Tolerances& tol = {}, double* worst = nullptr);

/// Extends g_i ↦ h_i to the TROs they generate by matching odd words
/// x y* z ….  consistency is the largest mismatch between the two sides on
/// linear relations found in the source.
struct TroMap {
  std::vector<CMatrix> src, dst;  // matched bases; the map is the identity on coordinates
  double consistency = 0.0;
};
TroMap tro_promote(const std::vector<CMatrix>& src_gens, const std::vector<CMatrix>& dst_gens,
                   const Tolerances& tol = {});

}  // namespace ncshilov
