#include "ncshilov/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ncshilov {

void Tolerances::validate() const {
  if (!(rank_eps > 0.0) || !(norm_eps > 0.0) || !(gap_eps > 0.0))
    throw InvalidInput("tolerances must be strictly positive");
  if (!(rank_eps < norm_eps))
    throw InvalidInput("rank_eps must be smaller than norm_eps");
}

bool is_finite(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

void require_finite(const CMatrix& m, const char* what) {
  if (!is_finite(m)) throw InvalidInput(std::string(what) + ": non-finite entry");
}

double operator_norm(const CMatrix& m) {
  require_finite(m, "operator_norm");
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

HermEig herm_eig(const CMatrix& m, const Tolerances& tol) {
  require_finite(m, "herm_eig");
  if (m.rows() != m.cols()) throw InvalidInput("herm_eig: matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol.rank_eps * scale)
    throw NotHermitian("herm_eig: matrix is not Hermitian");
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const Eigen::Index n = h.rows();
  HermEig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  // Eigen returns ascending order.
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> cluster_spectrum(const RVector& values,
                                                                    double gap) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= values.size(); ++i) {
    if (i == values.size() || std::abs(values(i - 1) - values(i)) > gap) {
      out.emplace_back(start, i);
      start = i;
    }
  }
  return out;
}

CVector vec(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

CMatrix stack_vec(std::span<const CMatrix> basis) {
  if (basis.empty()) return CMatrix(0, 0);
  CMatrix out(basis.front().size(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = vec(basis[k]);
  return out;
}

cplx trace_inner(const CMatrix& a, const CMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum();
}

CMatrix unit_matrix(Eigen::Index rows, Eigen::Index cols, Eigen::Index i, Eigen::Index j) {
  CMatrix m = CMatrix::Zero(rows, cols);
  m(i, j) = 1.0;
  return m;
}

CMatrix null_space(const CMatrix& m, double threshold) {
  const Eigen::Index n = m.cols();
  if (n == 0) return CMatrix(0, 0);
  if (m.rows() == 0) return CMatrix::Identity(n, n);
  // Thin SVD would drop the null directions when rows < cols, so pad.
  CMatrix a = m;
  if (a.rows() < n) {
    a.conservativeResize(n, n);
    a.bottomRows(n - m.rows()).setZero();
  }
  Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double cut = threshold * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

CMatrix column_span(const CMatrix& m, double threshold) {
  if (m.cols() == 0 || m.rows() == 0) return CMatrix(m.rows(), 0);
  Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU);
  const RVector& s = svd.singularValues();
  const double cut = threshold * std::max(1.0, s(0));
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  return svd.matrixU().leftCols(rank);
}

CMatrix psd_sqrt(const CMatrix& m, const Tolerances& tol) {
  const HermEig e = herm_eig(m, tol);
  const double scale = std::max(1.0, e.values.size() ? std::abs(e.values(0)) : 0.0);
  RVector r(e.values.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (e.values(i) < -tol.norm_eps * scale)
      throw InvalidInput("psd_sqrt: matrix is not positive semidefinite");
    r(i) = std::sqrt(std::max(0.0, e.values(i)));
  }
  return e.vectors * r.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

SpanMembership span_membership(std::span<const CMatrix> basis, const CMatrix& candidate,
                               const Tolerances& tol) {
  require_finite(candidate, "span_membership");
  SpanMembership out;
  const double cand_norm = operator_norm(candidate);
  const double bound = tol.rank_eps * (1.0 + cand_norm);
  if (basis.empty()) {
    out.residual = cand_norm;
    out.member = cand_norm <= bound;
    if (out.member) out.coefficients.resize(0);
    return out;
  }
  for (const auto& b : basis)
    if (b.rows() != candidate.rows() || b.cols() != candidate.cols())
      throw InvalidInput("span_membership: shape mismatch");
  const CMatrix a = stack_vec(basis);
  const CVector rhs = vec(candidate);
  const CVector coeff = a.completeOrthogonalDecomposition().solve(rhs);
  const CMatrix resid = unvec(rhs - a * coeff, candidate.rows(), candidate.cols());
  out.residual = operator_norm(resid);
  out.member = out.residual <= bound;
  if (out.member) out.coefficients = coeff;
  return out;
}

// ---------------------------------------------------------------------------

SpanBuilder::SpanBuilder(Eigen::Index rows, Eigen::Index cols, double rank_eps)
    : rows_(rows), cols_(cols), rank_eps_(rank_eps), q_(rows * cols, 0) {}

double SpanBuilder::relative_residual(const CMatrix& m) const {
  CVector v = vec(m);
  const double n0 = v.norm();
  for (int pass = 0; pass < 2; ++pass) v -= q_ * (q_.adjoint() * v);
  return v.norm() / std::max(1.0, n0);
}

bool SpanBuilder::add(const CMatrix& m) {
  if (m.rows() != rows_ || m.cols() != cols_) throw InvalidInput("SpanBuilder: shape mismatch");
  CVector v = vec(m);
  const double n0 = v.norm();
  for (int pass = 0; pass < 2; ++pass) v -= q_ * (q_.adjoint() * v);
  const double r = v.norm();
  if (r <= rank_eps_ * std::max(1.0, n0)) return false;
  q_.conservativeResize(Eigen::NoChange, q_.cols() + 1);
  q_.col(q_.cols() - 1) = v / r;
  accepted_.push_back(m);
  return true;
}

// ---------------------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = seed ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xC2B2AE3D27D4EB4FULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// splitmix64 stream: small, fast, and identical on every platform.
Rng::Rng(std::uint64_t seed) : state_(seed) {}

std::uint64_t Rng::next_u64() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

cplx Rng::cnormal() { return {normal() / std::numbers::sqrt2, normal() / std::numbers::sqrt2}; }

CMatrix Rng::cmatrix(Eigen::Index rows, Eigen::Index cols) {
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cnormal();
  return m;
}

CVector Rng::cvector(Eigen::Index n) {
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cnormal();
  return v;
}

CMatrix Rng::unitary(Eigen::Index n) {
  const CMatrix g = cmatrix(n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

CMatrix Rng::hermitian(Eigen::Index n) {
  const CMatrix g = cmatrix(n, n);
  return 0.5 * (g + g.adjoint());
}

}  // namespace ncshilov
