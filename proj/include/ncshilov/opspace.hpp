#pragma once

// Concrete finite-dimensional operator spaces X ⊂ M_{r×c} and their matrix
// levels M_n(X).

#include <string>
#include <vector>

#include "ncshilov/matcore.hpp"

namespace ncshilov {

/// An element of M_n(X): an n×n grid of coefficient vectors over the basis.
struct LevelElement {
  std::size_t n = 1;
  std::vector<CVector> blocks;  // row-major, n*n entries

  LevelElement() = default;
  LevelElement(std::size_t level, std::size_t dim);

  CVector& at(std::size_t i, std::size_t j) { return blocks[i * n + j]; }
  const CVector& at(std::size_t i, std::size_t j) const { return blocks[i * n + j]; }

  /// Flat layout ((i*n + j)*dim + k), used by the optimizers.
  CVector flatten() const;
  static LevelElement from_flat(const CVector& flat, std::size_t level, std::size_t dim);
};

class OperatorSpace {
public:
  /// Throws InvalidInput if shapes disagree, the basis is empty or dependent.
  OperatorSpace(Eigen::Index rows, Eigen::Index cols, std::vector<CMatrix> basis,
                std::string label = {}, const Tolerances& tol = {});

  /// Keeps the independent members of a spanning family (in order).
  static OperatorSpace from_spanning(Eigen::Index rows, Eigen::Index cols,
                                     const std::vector<CMatrix>& family, std::string label = {},
                                     const Tolerances& tol = {});

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<CMatrix>& basis() const { return basis_; }
  const std::string& label() const { return label_; }

  /// Σ_k coeffs[k]·basis[k].
  CMatrix element(const CVector& coeffs) const;
  /// Coefficients of a member of the span; throws InvalidInput if not a member.
  CVector coordinates(const CMatrix& m, const Tolerances& tol = {}) const;
  bool contains(const CMatrix& m, const Tolerances& tol = {}) const;

  /// The nr×nc matrix obtained by substituting basis expansions.
  CMatrix assemble(const LevelElement& x) const;

private:
  Eigen::Index rows_, cols_;
  std::vector<CMatrix> basis_;
  std::string label_;
};

/// ‖x‖_n computed concretely.
double level_norm(const OperatorSpace& X, const LevelElement& x);

/// S(X) ⊂ M_{r+c}: span of the identity, corner copies of X and their adjoints.
OperatorSpace paulsen_system(const OperatorSpace& X, const Tolerances& tol = {});

/// Places b into the 1-2 block of an (r+c)×(r+c) matrix.
CMatrix corner_embed(const CMatrix& b);

/// X ⊕∞ Y as block-diagonal matrices.
OperatorSpace direct_sum(const OperatorSpace& X, const OperatorSpace& Y);

/// C_n(X) ⊂ M_{nr×c}, basis ordered (copy i, basis k) ↦ i*dim + k.
OperatorSpace column_amplification(const OperatorSpace& X, std::size_t n);

}  // namespace ncshilov
