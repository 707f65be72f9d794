#include "ncshilov/opspace.hpp"

#include <utility>

namespace ncshilov {

LevelElement::LevelElement(std::size_t level, std::size_t dim)
    : n(level), blocks(level * level, CVector::Zero(static_cast<Eigen::Index>(dim))) {}

CVector LevelElement::flatten() const {
  if (blocks.empty()) return CVector(0);
  const Eigen::Index d = blocks.front().size();
  CVector out(static_cast<Eigen::Index>(blocks.size()) * d);
  for (std::size_t b = 0; b < blocks.size(); ++b) out.segment(static_cast<Eigen::Index>(b) * d, d) = blocks[b];
  return out;
}

LevelElement LevelElement::from_flat(const CVector& flat, std::size_t level, std::size_t dim) {
  if (static_cast<std::size_t>(flat.size()) != level * level * dim)
    throw InvalidInput("LevelElement::from_flat: size mismatch");
  LevelElement x(level, dim);
  const auto d = static_cast<Eigen::Index>(dim);
  for (std::size_t b = 0; b < level * level; ++b) x.blocks[b] = flat.segment(static_cast<Eigen::Index>(b) * d, d);
  return x;
}

OperatorSpace::OperatorSpace(Eigen::Index rows, Eigen::Index cols, std::vector<CMatrix> basis,
                             std::string label, const Tolerances& tol)
    : rows_(rows), cols_(cols), basis_(std::move(basis)), label_(std::move(label)) {
  if (rows < 1 || cols < 1) throw InvalidInput("operator space needs positive shape");
  if (basis_.empty()) throw InvalidInput("operator space basis is empty");
  SpanBuilder span(rows, cols, tol.rank_eps);
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    const CMatrix& b = basis_[k];
    if (b.rows() != rows || b.cols() != cols)
      throw InvalidInput("basis element " + std::to_string(k) + " has the wrong shape");
    require_finite(b, "operator space basis");
    const double scale = b.norm();
    if (scale == 0.0 || !span.add(b / scale))
      throw InvalidInput("basis element " + std::to_string(k) + " is linearly dependent");
  }
}

OperatorSpace OperatorSpace::from_spanning(Eigen::Index rows, Eigen::Index cols,
                                           const std::vector<CMatrix>& family, std::string label,
                                           const Tolerances& tol) {
  SpanBuilder span(rows, cols, tol.rank_eps);
  std::vector<CMatrix> kept;
  for (const auto& m : family) {
    if (m.rows() != rows || m.cols() != cols) throw InvalidInput("spanning family shape mismatch");
    const double scale = m.norm();
    if (scale > 0.0 && span.add(m / scale)) kept.push_back(m);
  }
  return OperatorSpace(rows, cols, std::move(kept), std::move(label), tol);
}

CMatrix OperatorSpace::element(const CVector& coeffs) const {
  if (static_cast<std::size_t>(coeffs.size()) != dim())
    throw InvalidInput("coefficient vector length does not match dim(X)");
  CMatrix out = CMatrix::Zero(rows_, cols_);
  for (std::size_t k = 0; k < dim(); ++k) out += coeffs(static_cast<Eigen::Index>(k)) * basis_[k];
  return out;
}

CVector OperatorSpace::coordinates(const CMatrix& m, const Tolerances& tol) const {
  const auto r = span_membership(basis_, m, tol);
  if (!r.member) throw InvalidInput("matrix is not in the operator space");
  return r.coefficients;
}

bool OperatorSpace::contains(const CMatrix& m, const Tolerances& tol) const {
  return span_membership(basis_, m, tol).member;
}

CMatrix OperatorSpace::assemble(const LevelElement& x) const {
  if (x.blocks.size() != x.n * x.n) throw InvalidInput("level element is not square");
  const auto n = static_cast<Eigen::Index>(x.n);
  CMatrix out(n * rows_, n * cols_);
  for (std::size_t i = 0; i < x.n; ++i)
    for (std::size_t j = 0; j < x.n; ++j)
      out.block(static_cast<Eigen::Index>(i) * rows_, static_cast<Eigen::Index>(j) * cols_, rows_, cols_) =
          element(x.at(i, j));
  return out;
}

double level_norm(const OperatorSpace& X, const LevelElement& x) {
  for (const auto& b : x.blocks)
    if (static_cast<std::size_t>(b.size()) != X.dim())
      throw InvalidInput("level_norm: coefficient vector length mismatch");
  return operator_norm(X.assemble(x));
}

CMatrix corner_embed(const CMatrix& b) {
  const Eigen::Index r = b.rows(), c = b.cols();
  CMatrix m = CMatrix::Zero(r + c, r + c);
  m.topRightCorner(r, c) = b;
  return m;
}

OperatorSpace paulsen_system(const OperatorSpace& X, const Tolerances& tol) {
  const Eigen::Index n = X.rows() + X.cols();
  std::vector<CMatrix> family{CMatrix::Identity(n, n)};
  for (const auto& b : X.basis()) family.push_back(corner_embed(b));
  for (const auto& b : X.basis()) family.push_back(corner_embed(b).adjoint());
  return OperatorSpace::from_spanning(n, n, family, "S(" + X.label() + ")", tol);
}

OperatorSpace direct_sum(const OperatorSpace& X, const OperatorSpace& Y) {
  const Eigen::Index r = X.rows() + Y.rows(), c = X.cols() + Y.cols();
  std::vector<CMatrix> basis;
  for (const auto& b : X.basis()) {
    CMatrix m = CMatrix::Zero(r, c);
    m.topLeftCorner(X.rows(), X.cols()) = b;
    basis.push_back(std::move(m));
  }
  for (const auto& b : Y.basis()) {
    CMatrix m = CMatrix::Zero(r, c);
    m.bottomRightCorner(Y.rows(), Y.cols()) = b;
    basis.push_back(std::move(m));
  }
  return OperatorSpace(r, c, std::move(basis), X.label() + "⊕" + Y.label());
}

OperatorSpace column_amplification(const OperatorSpace& X, std::size_t n) {
  if (n < 1) throw InvalidInput("column_amplification: n must be positive");
  const auto nn = static_cast<Eigen::Index>(n);
  std::vector<CMatrix> basis;
  for (Eigen::Index i = 0; i < nn; ++i)
    for (const auto& b : X.basis()) {
      CMatrix m = CMatrix::Zero(nn * X.rows(), X.cols());
      m.block(i * X.rows(), 0, X.rows(), X.cols()) = b;
      basis.push_back(std::move(m));
    }
  return OperatorSpace(nn * X.rows(), X.cols(), std::move(basis),
                       "C_" + std::to_string(n) + "(" + X.label() + ")");
}

}  // namespace ncshilov
