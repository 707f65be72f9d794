#include "ncshilov/staralg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ncshilov {

namespace {

constexpr std::uint64_t kFingerprintSeed = 0x5eedf00dULL;
constexpr int kMaxAttempts = 9;  // first try plus 8 resamples

CMatrix support_projection(const CMatrix& positive, double rel_cut, const Tolerances& tol) {
  const HermEig e = herm_eig(positive, tol);
  const double top = e.values.size() ? e.values(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < e.values.size() && e.values(rank) > rel_cut * top) ++rank;
  const CMatrix v = e.vectors.leftCols(rank);
  return v * v.adjoint();
}

void finish_algebra(StarAlgebra& A, const Tolerances& tol) {
  const Eigen::Index N = A.ambient;
  CMatrix h = CMatrix::Zero(N, N);
  for (const auto& b : A.spanning_basis) h += b * b.adjoint();
  A.unit = A.dim() ? support_projection(h, tol.gap_eps, tol) : CMatrix::Zero(N, N);
  A.has_unit_of_ambient = A.dim() && (A.unit - CMatrix::Identity(N, N)).norm() <= 1e3 * tol.rank_eps;
  if (A.dim() && !A.contains(A.unit, Tolerances{1e-7, 1e-6, tol.gap_eps}))
    throw InconsistentNumerics("computed unit is not in the algebra");
}

}  // namespace

bool StarAlgebra::contains(const CMatrix& m, const Tolerances& tol) const {
  if (m.rows() != ambient || m.cols() != ambient) return false;
  CVector v = vec(m);
  const double n0 = v.norm();
  if (!spanning_basis.empty()) {
    const CMatrix q = stack_vec(spanning_basis);
    for (int pass = 0; pass < 2; ++pass) v -= q * (q.adjoint() * v);
  }
  return v.norm() <= tol.rank_eps * std::max(1.0, n0);
}

CVector StarAlgebra::coordinates(const CMatrix& m) const {
  CVector c(static_cast<Eigen::Index>(dim()));
  for (std::size_t j = 0; j < dim(); ++j) c(static_cast<Eigen::Index>(j)) = trace_inner(spanning_basis[j], m);
  return c;
}

StarAlgebra generate(Eigen::Index ambient, const std::vector<CMatrix>& generators,
                     const Tolerances& tol, const GenerateOptions& opts) {
  if (ambient > opts.max_ambient)
    throw InvalidInput("ambient dimension " + std::to_string(ambient) +
                       " exceeds the configured guard of " + std::to_string(opts.max_ambient));
  std::vector<CMatrix> letters;
  for (const auto& g : generators) {
    if (g.rows() != ambient || g.cols() != ambient) throw InvalidInput("generate: generator is not N×N");
    require_finite(g, "generate");
    const double s = g.norm();
    if (s == 0.0) continue;
    letters.push_back(g / s);
    letters.push_back(g.adjoint() / s);
  }
  SpanBuilder span(ambient, ambient, tol.rank_eps);
  std::vector<CMatrix> frontier;
  for (const auto& l : letters)
    if (span.add(l)) frontier.push_back(span.orthonormal().rightCols(1).reshaped(ambient, ambient));

  const auto cap = static_cast<std::size_t>(ambient * ambient);
  // Candidates are screened in batches against the span as it stood at the
  // start of the batch; only survivors go through the sequential MGS step.
  constexpr Eigen::Index kBatch = 64;
  while (!frontier.empty()) {
    std::vector<CMatrix> next;
    std::vector<CMatrix> batch;
    auto flush = [&] {
      if (batch.empty()) return;
      CMatrix c = stack_vec(batch);
      const CMatrix& q = span.orthonormal();
      CMatrix r = c - q * (q.adjoint() * c);
      for (Eigen::Index j = 0; j < r.cols(); ++j) {
        if (r.col(j).norm() <= 0.5 * tol.rank_eps * std::max(1.0, c.col(j).norm())) continue;
        if (span.add(batch[static_cast<std::size_t>(j)]))
          next.push_back(span.orthonormal().rightCols(1).reshaped(ambient, ambient));
        if (span.size() > cap) throw InconsistentNumerics("generate: dimension exceeded N²");
      }
      batch.clear();
    };
    for (const auto& w : frontier)
      for (const auto& l : letters) {
        batch.push_back(w * l);
        if (static_cast<Eigen::Index>(batch.size()) == kBatch) flush();
      }
    flush();
    frontier = std::move(next);
  }

  StarAlgebra A;
  A.ambient = ambient;
  const CMatrix& q = span.orthonormal();
  for (Eigen::Index j = 0; j < q.cols(); ++j) A.spanning_basis.push_back(unvec(q.col(j), ambient, ambient));
  finish_algebra(A, tol);
  return A;
}

StarAlgebra algebra_from_span(Eigen::Index ambient, const std::vector<CMatrix>& family,
                              const Tolerances& tol) {
  SpanBuilder span(ambient, ambient, tol.rank_eps);
  for (const auto& m : family) {
    if (m.rows() != ambient || m.cols() != ambient) throw InvalidInput("algebra_from_span: shape");
    const double s = m.norm();
    if (s > 0.0) span.add(m / s);
  }
  StarAlgebra A;
  A.ambient = ambient;
  const CMatrix& q = span.orthonormal();
  for (Eigen::Index j = 0; j < q.cols(); ++j) A.spanning_basis.push_back(unvec(q.col(j), ambient, ambient));
  for (const auto& b : A.spanning_basis) {
    if (!A.contains(b.adjoint(), Tolerances{1e-7, 1e-6, tol.gap_eps}))
      throw InvalidInput("algebra_from_span: span is not *-closed");
    for (const auto& c : A.spanning_basis)
      if (!A.contains(b * c, Tolerances{1e-7, 1e-6, tol.gap_eps}))
        throw InvalidInput("algebra_from_span: span is not product-closed");
  }
  finish_algebra(A, tol);
  return A;
}

// ---------------------------------------------------------------------------

CMatrix BlockDecomposition::represent(const CMatrix& a) const {
  const Eigen::Index n = represented_size();
  CMatrix out = CMatrix::Zero(n, n);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    const auto k = static_cast<Eigen::Index>(b.block_dim);
    out.block(off, off, k, k) = b.represent(a);
    off += k;
  }
  return out;
}

Eigen::Index BlockDecomposition::represented_size() const {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += static_cast<Eigen::Index>(b.block_dim);
  return n;
}

namespace {

struct Cluster {
  double value;
  CMatrix vectors;  // R-dim coordinates (columns)
};

// One decomposition attempt driven by a random Hermitian element of A.  In a
// generic such element every eigenprojection is a minimal projection of A, so
// the cyclic subspace of any eigenvector is irreducible.
bool try_decompose(const StarAlgebra& A, const CMatrix& range, Rng& rng, const Tolerances& tol,
                   std::vector<Block>& out) {
  const Eigen::Index N = A.ambient;
  CMatrix h = CMatrix::Zero(N, N);
  for (const auto& b : A.spanning_basis) h += rng.cnormal() * b;
  h = (0.5 * (h + h.adjoint())).eval();
  const CMatrix hr = range.adjoint() * h * range;
  const HermEig e = herm_eig(hr, Tolerances{1e-6, 1e-5, tol.gap_eps});
  const double scale = std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
  const double gap = tol.gap_eps * std::max(scale, 1e-300);
  const auto ranges = cluster_spectrum(e.values, gap);

  std::vector<Cluster> clusters;
  for (auto [first, last] : ranges) {
    Cluster c;
    c.value = e.values.segment(first, last - first).mean();
    c.vectors = e.vectors.middleCols(first, last - first);
    clusters.push_back(std::move(c));
  }

  struct Partial {
    CMatrix isometry;
    RVector spectrum;
    std::vector<std::size_t> members;
  };
  std::vector<Partial> partial;
  CMatrix cyclic(N, static_cast<Eigen::Index>(A.dim()));
  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    const Cluster& c = clusters[ci];
    bool joined = false;
    for (auto& p : partial) {
      for (Eigen::Index k = 0; k < p.spectrum.size(); ++k)
        if (std::abs(p.spectrum(k) - c.value) <= 10 * gap) {
          p.members.push_back(ci);
          joined = true;
          break;
        }
      if (joined) break;
    }
    if (joined) continue;
    const CVector xi = range * c.vectors.col(0);
    for (std::size_t j = 0; j < A.dim(); ++j) cyclic.col(static_cast<Eigen::Index>(j)) = A.spanning_basis[j] * xi;
    Partial p;
    p.isometry = column_span(cyclic, tol.gap_eps);
    const CMatrix rh = p.isometry.adjoint() * h * p.isometry;
    p.spectrum = herm_eig(0.5 * (rh + rh.adjoint())).values;
    p.members.push_back(ci);
    partial.push_back(std::move(p));
  }

  std::size_t dim_sum = 0;
  Eigen::Index rank_sum = 0;
  out.clear();
  for (const auto& p : partial) {
    const auto n = static_cast<std::size_t>(p.isometry.cols());
    if (p.members.size() != n) return false;
    const Eigen::Index m = clusters[p.members.front()].vectors.cols();
    CMatrix proj = CMatrix::Zero(N, N);
    for (auto ci : p.members) {
      if (clusters[ci].vectors.cols() != m) return false;
      const CMatrix v = range * clusters[ci].vectors;
      proj += v * v.adjoint();
    }
    Block b;
    b.central_projection = proj;
    b.block_dim = n;
    b.multiplicity = static_cast<std::size_t>(m);
    b.isometry = p.isometry;
    out.push_back(std::move(b));
    dim_sum += n * n;
    rank_sum += static_cast<Eigen::Index>(n) * m;
  }
  if (dim_sum != A.dim() || rank_sum != range.cols()) return false;
  // Central projections must lie in A and commute with it.
  // Commutation is probed with a few random elements rather than the whole basis.
  std::vector<CMatrix> probes;
  for (int k = 0; k < 3; ++k) {
    CMatrix g = CMatrix::Zero(N, N);
    for (const auto& b : A.spanning_basis) g += rng.cnormal() * b;
    probes.push_back(g / std::sqrt(static_cast<double>(A.dim())));
  }
  const CMatrix basis = stack_vec(A.spanning_basis);
  for (const auto& b : out) {
    CVector v = vec(b.central_projection);
    const double n0 = v.norm();
    for (int pass = 0; pass < 2; ++pass) v -= basis * (basis.adjoint() * v);
    if (v.norm() > 1e-7 * std::max(1.0, n0)) return false;
    for (const auto& g : probes)
      if ((b.central_projection * g - g * b.central_projection).norm() > 1e-7 * std::max(1.0, g.norm()))
        return false;
  }
  return true;
}

}  // namespace

BlockDecomposition wedderburn(const StarAlgebra& A, std::uint64_t seed, const Tolerances& tol) {
  BlockDecomposition D;
  D.seed = seed;
  if (A.dim() == 0) return D;
  const HermEig ue = herm_eig(A.unit, Tolerances{1e-6, 1e-5, tol.gap_eps});
  Eigen::Index rank = 0;
  while (rank < ue.values.size() && ue.values(rank) > 0.5) ++rank;
  const CMatrix range = ue.vectors.leftCols(rank);

  std::vector<Block> blocks;
  bool ok = false;
  for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
    Rng rng(derive_seed(seed, 0xB10C, static_cast<std::uint64_t>(attempt)));
    ok = try_decompose(A, range, rng, tol, blocks);
    D.attempts = attempt + 1;
  }
  if (!ok) throw NumericalDegeneracy("wedderburn: no generic central splitting found after resampling");

  Rng frng(kFingerprintSeed);
  CMatrix hf = CMatrix::Zero(A.ambient, A.ambient);
  for (const auto& b : A.spanning_basis) hf += frng.cnormal() * b;
  hf = (0.5 * (hf + hf.adjoint())).eval();
  for (auto& b : blocks) {
    const CMatrix r = b.represent(hf);
    const RVector ev = herm_eig(0.5 * (r + r.adjoint())).values;
    b.fingerprint.assign(ev.data(), ev.data() + ev.size());
    std::sort(b.fingerprint.begin(), b.fingerprint.end());
  }
  std::stable_sort(blocks.begin(), blocks.end(), [](const Block& x, const Block& y) {
    if (x.block_dim != y.block_dim) return x.block_dim > y.block_dim;
    return x.fingerprint < y.fingerprint;
  });
  D.blocks = std::move(blocks);
  return D;
}

std::vector<CMatrix> center_basis(const BlockDecomposition& D) {
  std::vector<CMatrix> out;
  for (const auto& b : D.blocks) out.push_back(b.central_projection);
  return out;
}

// ---------------------------------------------------------------------------

CMatrix Quotient::apply(const CMatrix& a) const {
  const Eigen::Index n = algebra.ambient;
  CMatrix out = CMatrix::Zero(n, n);
  Eigen::Index off = 0;
  for (const auto& w : isometries) {
    const Eigen::Index k = w.cols();
    out.block(off, off, k, k) = w.adjoint() * a * w;
    off += k;
  }
  return out;
}

CMatrix Quotient::coefficient_map(const StarAlgebra& A) const {
  CMatrix m(static_cast<Eigen::Index>(algebra.dim()), static_cast<Eigen::Index>(A.dim()));
  for (std::size_t j = 0; j < A.dim(); ++j)
    m.col(static_cast<Eigen::Index>(j)) = algebra.coordinates(apply(A.spanning_basis[j]));
  return m;
}

Quotient quotient_by(const StarAlgebra& A, const BlockDecomposition& D, const BlockIdeal& I,
                     const Tolerances& /*tol*/) {
  for (auto i : I.block_indices)
    if (i >= D.blocks.size()) throw InvalidInput("quotient_by: ideal refers to a missing block");
  Quotient q;
  Eigen::Index size = 0;
  for (std::size_t i = 0; i < D.blocks.size(); ++i) {
    if (std::find(I.block_indices.begin(), I.block_indices.end(), i) != I.block_indices.end()) continue;
    q.kept.push_back(i);
    q.isometries.push_back(D.blocks[i].isometry);
    size += static_cast<Eigen::Index>(D.blocks[i].block_dim);
  }
  q.zero_warning = q.kept.empty() && A.dim() > 0;
  q.algebra.ambient = size;
  Eigen::Index off = 0;
  for (const auto& w : q.isometries) {
    const Eigen::Index k = w.cols();
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index i = 0; i < k; ++i) q.algebra.spanning_basis.push_back(unit_matrix(size, size, off + i, off + j));
    off += k;
  }
  q.algebra.unit = CMatrix::Identity(size, size);
  q.algebra.has_unit_of_ambient = size > 0;

  return q;
}

}  // namespace ncshilov
