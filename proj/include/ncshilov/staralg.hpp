#pragma once

// Finite-dimensional *-subalgebras of M_N: generation, Wedderburn block
// decomposition and quotients by block ideals.

#include <cstdint>
#include <vector>

#include "ncshilov/matcore.hpp"

namespace ncshilov {

struct GenerateOptions {
  Eigen::Index max_ambient = 64;  // desk-scale guard
};

struct StarAlgebra {
  Eigen::Index ambient = 0;
  /// Orthonormal under the trace inner product.
  std::vector<CMatrix> spanning_basis;
  CMatrix unit;
  bool has_unit_of_ambient = false;

  std::size_t dim() const { return spanning_basis.size(); }
  bool contains(const CMatrix& m, const Tolerances& tol = {}) const;
  /// Coordinates w.r.t. the orthonormal spanning basis.
  CVector coordinates(const CMatrix& m) const;
};

/// Smallest *-closed, product-closed subspace of M_N containing generators.
StarAlgebra generate(Eigen::Index ambient, const std::vector<CMatrix>& generators,
                     const Tolerances& tol = {}, const GenerateOptions& opts = {});

/// Wraps a span already known to be a *-algebra (no closure is performed, but
/// the unit is computed and closure is spot-checked).
StarAlgebra algebra_from_span(Eigen::Index ambient, const std::vector<CMatrix>& family,
                              const Tolerances& tol = {});

/// One simple summand M_{n} (acting with multiplicity m inside M_N).
struct Block {
  CMatrix central_projection;  // N×N
  std::size_t block_dim = 0;   // n
  std::size_t multiplicity = 0;
  /// N×n isometry onto an irreducible subspace; ρ(a) = W* a W is a
  /// *-isomorphism of the block onto M_n.
  CMatrix isometry;
  std::vector<double> fingerprint;

  CMatrix represent(const CMatrix& a) const { return isometry.adjoint() * a * isometry; }
};

struct BlockDecomposition {
  std::vector<Block> blocks;
  std::uint64_t seed = 0;
  int attempts = 0;

  /// Direct sum of the block representations (faithful, no multiplicity).
  CMatrix represent(const CMatrix& a) const;
  Eigen::Index represented_size() const;
};

struct BlockIdeal {
  std::vector<std::size_t> block_indices;
};

/// Minimal central projections and concrete block isomorphisms, ordered by
/// descending block size, ties broken by a spectral fingerprint.
BlockDecomposition wedderburn(const StarAlgebra& A, std::uint64_t seed,
                              const Tolerances& tol = {});

/// Basis of the center (the central projections).
std::vector<CMatrix> center_basis(const BlockDecomposition& D);

struct Quotient {
  StarAlgebra algebra;             // block-diagonal in M_{Σ kept n_i}
  std::vector<std::size_t> kept;   // indices into the decomposition
  std::vector<CMatrix> isometries; // W_i of the kept blocks
  bool zero_warning = false;       // every block was killed

  /// The *-homomorphism A → B.
  CMatrix apply(const CMatrix& a) const;
  /// Matrix of q from A-coordinates to B-coordinates.
  CMatrix coefficient_map(const StarAlgebra& A) const;
};

Quotient quotient_by(const StarAlgebra& A, const BlockDecomposition& D, const BlockIdeal& I,
                     const Tolerances& tol = {});

}  // namespace ncshilov
