#include "ncshilov/envelope.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace ncshilov {

namespace {

bool contains_index(const std::vector<std::size_t>& v, std::size_t i) {
  return std::find(v.begin(), v.end(), i) != v.end();
}

std::vector<Eigen::Index> range_indices(Eigen::Index start, Eigen::Index count) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < count; ++i) out.push_back(start + i);
  return out;
}

}  // namespace

std::vector<CMatrix> LinkingAlgebra::block_images(std::size_t block) const {
  const Block& b = D.blocks.at(block);
  std::vector<CMatrix> out;
  for (const auto& c : corners) out.push_back((b.isometry.adjoint() * c * b.isometry).topRightCorner(k[block], l[block]));
  return out;
}

LinkingAlgebra linking_algebra(const OperatorSpace& X, const Tolerances& tol, const EnvelopeOptions& opts) {
  tol.validate();
  LinkingAlgebra Lk;
  Lk.r = X.rows();
  Lk.c = X.cols();
  const Eigen::Index N = Lk.r + Lk.c;
  for (const auto& b : X.basis()) Lk.corners.push_back(corner_embed(b));
  Lk.L = generate(N, Lk.corners, tol, opts.generate);
  Lk.D = wedderburn(Lk.L, opts.seed, tol);

  CMatrix top = CMatrix::Zero(N, N);
  top.topLeftCorner(Lk.r, Lk.r).setIdentity();
  Lk.p = top * Lk.L.unit * top;
  Lk.q = Lk.L.unit - Lk.p;
  if ((Lk.p * Lk.p - Lk.p).norm() > 1e-8 || !Lk.L.contains(Lk.p, Tolerances{1e-7, 1e-6, tol.gap_eps}))
    throw InconsistentNumerics("linking algebra: compressed diagonal projection is not a projection in L");

  for (auto& blk : Lk.D.blocks) {
    const CMatrix rp = blk.isometry.adjoint() * Lk.p * blk.isometry;
    const HermEig e = herm_eig(0.5 * (rp + rp.adjoint()), Tolerances{1e-6, 1e-5, tol.gap_eps});
    Eigen::Index k = 0;
    while (k < e.values.size() && e.values(k) > 0.5) ++k;
    for (Eigen::Index i = 0; i < e.values.size(); ++i)
      if (std::abs(e.values(i) - (i < k ? 1.0 : 0.0)) > 1e-6)
        throw InconsistentNumerics("linking algebra: block image of p is not a projection");
    const Eigen::Index n = static_cast<Eigen::Index>(blk.block_dim);
    if (k == 0 || k == n) throw InconsistentNumerics("linking algebra: block misses one corner");
    blk.isometry = (blk.isometry * e.vectors).eval();
    Lk.k.push_back(k);
    Lk.l.push_back(n - k);
  }
  return Lk;
}

IdealTest test_ideal(const LinkingAlgebra& Lk, const std::vector<std::size_t>& blocks, const Tolerances& tol,
                     const EnvelopeOptions& opts) {
  IdealTest out;
  for (auto b : blocks)
    if (b >= Lk.D.blocks.size()) throw InvalidInput("test_ideal: block index out of range");
  if (blocks.empty()) {
    out.boundary = true;
    return out;
  }
  std::vector<std::vector<CMatrix>> num, den;
  std::size_t cap = 1;
  for (std::size_t i = 0; i < Lk.D.blocks.size(); ++i) {
    if (contains_index(blocks, i)) {
      num.push_back(Lk.block_images(i));
      cap = std::max<std::size_t>(cap, static_cast<std::size_t>(std::max(Lk.k[i], Lk.l[i])));
    } else {
      den.push_back(Lk.block_images(i));
    }
  }
  if (den.empty()) {
    out.ratio = std::numeric_limits<double>::infinity();
    return out;
  }
  const std::size_t d = Lk.corners.size();
  LevelSearch search;
  search.level_cap = opts.level_cap.value_or(cap);
  search.restarts = opts.restarts;
  search.seed = derive_seed(opts.seed, 0xB0DA, blocks.front() * 1000003u + blocks.size());
  search.decisive = 1.0 + 10.0 * tol.norm_eps;
  // Adjoint starts: x = t_b^*(matrix unit), which lines up x with what block b sees.
  search.hints = [&num, d](std::size_t n) {
    std::vector<CVector> hints;
    for (const auto& imgs : num) {
      const Eigen::Index kb = imgs.front().rows(), lb = imgs.front().cols();
      if (n == 1) {
        for (Eigen::Index a = 0; a < kb; ++a)
          for (Eigen::Index c = 0; c < lb; ++c) {
            CVector x(static_cast<Eigen::Index>(d));
            for (std::size_t m = 0; m < d; ++m) x(static_cast<Eigen::Index>(m)) = std::conj(imgs[m](a, c));
            hints.push_back(x);
          }
      } else {
        LevelElement x(n, d);
        for (Eigen::Index a = 0; a < std::min<Eigen::Index>(kb, static_cast<Eigen::Index>(n)); ++a)
          for (Eigen::Index c = 0; c < std::min<Eigen::Index>(lb, static_cast<Eigen::Index>(n)); ++c)
            for (std::size_t m = 0; m < d; ++m)
              x.at(static_cast<std::size_t>(a), static_cast<std::size_t>(c))(static_cast<Eigen::Index>(m)) =
                  std::conj(imgs[m](a, c));
        hints.push_back(x.flatten());
      }
    }
    return hints;
  };
  const RatioSearchResult r = extreme_ratio(num, den, d, RatioSense::maximize, search);
  out.ratio = r.ratio;
  switch (classify_defect(r.ratio - 1.0, tol)) {
    case DefectVerdict::isometric:
      out.boundary = true;
      break;
    case DefectVerdict::not_isometric:
      out.witness = r.witness;
      break;
    case DefectVerdict::inconclusive:
      throw InconclusiveVerdict("boundary test inconclusive: norm ratio " + std::to_string(r.ratio) +
                                " is within 10·norm_eps of 1");
  }
  return out;
}

BlockIdeal reduce_boundary_ideal(const std::vector<std::size_t>& candidates,
                                 const std::function<bool(const std::vector<std::size_t>&)>& is_boundary) {
  std::vector<std::size_t> ideal = candidates;
  for (auto c : candidates) {
    if (is_boundary(ideal)) break;
    ideal.erase(std::find(ideal.begin(), ideal.end(), c));
  }
  return BlockIdeal{ideal};
}

BoundaryResult boundary_blocks(const LinkingAlgebra& Lk, const Tolerances& tol, const EnvelopeOptions& opts) {
  BoundaryResult out;
  std::vector<std::size_t> candidates;
  for (std::size_t b = 0; b < Lk.D.blocks.size(); ++b) {
    const IdealTest t = test_ideal(Lk, {b}, tol, opts);
    out.block_ratios.push_back(t.ratio);
    if (t.boundary) candidates.push_back(b);
  }
  if (candidates.size() > 1 && !test_ideal(Lk, candidates, tol, opts).boundary) {
    out.greedy = true;
    out.warnings.push_back(
        "union of individually removable blocks is not a boundary ideal; a maximal boundary ideal was found greedily");
    out.ideal = reduce_boundary_ideal(
        candidates, [&](const std::vector<std::size_t>& s) { return test_ideal(Lk, s, tol, opts).boundary; });
  } else {
    out.ideal = BlockIdeal{candidates};
  }
  return out;
}

BlockIdeal exhaustive_boundary_ideal(const LinkingAlgebra& Lk, const Tolerances& tol, const EnvelopeOptions& opts) {
  const std::size_t B = Lk.D.blocks.size();
  if (B > 12) throw InvalidInput("exhaustive_boundary_ideal: too many blocks for subset enumeration");
  for (std::size_t size = B; size > 0; --size)
    for (std::uint32_t mask = 0; mask < (1u << B); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != size) continue;
      std::vector<std::size_t> s;
      for (std::size_t i = 0; i < B; ++i)
        if (mask & (1u << i)) s.push_back(i);
      if (test_ideal(Lk, s, tol, opts).boundary) return BlockIdeal{s};
    }
  return BlockIdeal{};
}

// ---------------------------------------------------------------------------

CMatrix TripleEnvelope::represent(const CMatrix& a) const {
  CMatrix out = CMatrix::Zero(K + Lsize, K + Lsize);
  for (std::size_t m = 0; m < kept.size(); ++m) {
    const CMatrix& w = linking.D.blocks[kept[m]].isometry;
    std::vector<Eigen::Index> idx = range_indices(k_off[m], k[m]);
    for (auto i : range_indices(K + l_off[m], l[m])) idx.push_back(i);
    out(idx, idx) = w.adjoint() * a * w;
  }
  return out;
}

CMatrix TripleEnvelope::J_of(const CVector& coeffs) const {
  if (static_cast<std::size_t>(coeffs.size()) != J.size()) throw InvalidInput("J_of: coefficient length mismatch");
  CMatrix out = CMatrix::Zero(K, Lsize);
  for (std::size_t j = 0; j < J.size(); ++j) out += coeffs(static_cast<Eigen::Index>(j)) * J[j];
  return out;
}

CVector TripleEnvelope::J_coordinates(const CMatrix& t, const Tolerances& tol) const {
  const auto r = span_membership(J, t, tol);
  if (!r.member) throw InvalidInput("element is not in J(X)");
  return r.coefficients;
}

std::vector<CMatrix> TripleEnvelope::lift(const std::vector<CMatrix>& ms) const {
  const auto& basis = linking.L.spanning_basis;
  CMatrix R(static_cast<Eigen::Index>((K + Lsize) * (K + Lsize)), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) R.col(static_cast<Eigen::Index>(j)) = vec(represent(basis[j]));
  const Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(R);
  std::vector<CMatrix> out;
  for (const auto& m : ms) {
    if (m.rows() != K + Lsize || m.cols() != K + Lsize) throw InvalidInput("lift: shape mismatch");
    const CVector c = cod.solve(vec(m));
    CMatrix a = CMatrix::Zero(linking.L.ambient, linking.L.ambient);
    for (std::size_t j = 0; j < basis.size(); ++j) a += c(static_cast<Eigen::Index>(j)) * basis[j];
    out.push_back(std::move(a));
  }
  return out;
}

CMatrix TripleEnvelope::embed_E(const CMatrix& a) const {
  CMatrix out = CMatrix::Zero(K + Lsize, K + Lsize);
  out.topLeftCorner(K, K) = a;
  return out;
}

CMatrix TripleEnvelope::embed_F(const CMatrix& a) const {
  CMatrix out = CMatrix::Zero(K + Lsize, K + Lsize);
  out.bottomRightCorner(Lsize, Lsize) = a;
  return out;
}

TripleEnvelope triple_envelope(const OperatorSpace& X, const Tolerances& tol, const EnvelopeOptions& opts) {
  TripleEnvelope T(X);
  T.linking = linking_algebra(X, tol, opts);
  const BoundaryResult br = boundary_blocks(T.linking, tol, opts);
  T.shilov_ideal = br.ideal;
  T.warnings = br.warnings;
  const auto& Lk = T.linking;
  for (std::size_t i = 0; i < Lk.D.blocks.size(); ++i) {
    if (contains_index(T.shilov_ideal.block_indices, i)) continue;
    T.kept.push_back(i);
    T.k.push_back(Lk.k[i]);
    T.l.push_back(Lk.l[i]);
    T.k_off.push_back(T.K);
    T.l_off.push_back(T.Lsize);
    T.K += Lk.k[i];
    T.Lsize += Lk.l[i];
  }
  const Eigen::Index N = T.K + T.Lsize;

  T.J.assign(X.dim(), CMatrix::Zero(T.K, T.Lsize));
  for (std::size_t m = 0; m < T.kept.size(); ++m) {
    const auto imgs = Lk.block_images(T.kept[m]);
    for (std::size_t j = 0; j < X.dim(); ++j) T.J[j].block(T.k_off[m], T.l_off[m], T.k[m], T.l[m]) = imgs[j];
  }

  T.quotient.ambient = N;
  T.E.ambient = T.K;
  T.F.ambient = T.Lsize;
  for (std::size_t m = 0; m < T.kept.size(); ++m) {
    std::vector<Eigen::Index> idx = range_indices(T.k_off[m], T.k[m]);
    for (auto i : range_indices(T.K + T.l_off[m], T.l[m])) idx.push_back(i);
    for (auto b : idx)
      for (auto a : idx) T.quotient.spanning_basis.push_back(unit_matrix(N, N, a, b));
    for (Eigen::Index b = 0; b < T.k[m]; ++b)
      for (Eigen::Index a = 0; a < T.k[m]; ++a)
        T.E.spanning_basis.push_back(unit_matrix(T.K, T.K, T.k_off[m] + a, T.k_off[m] + b));
    for (Eigen::Index b = 0; b < T.l[m]; ++b)
      for (Eigen::Index a = 0; a < T.l[m]; ++a)
        T.F.spanning_basis.push_back(unit_matrix(T.Lsize, T.Lsize, T.l_off[m] + a, T.l_off[m] + b));
    for (Eigen::Index b = 0; b < T.l[m]; ++b)
      for (Eigen::Index a = 0; a < T.k[m]; ++a)
        T.T_basis.push_back(unit_matrix(T.K, T.Lsize, T.k_off[m] + a, T.l_off[m] + b));
  }
  T.quotient.unit = CMatrix::Identity(N, N);
  T.E.unit = CMatrix::Identity(T.K, T.K);
  T.F.unit = CMatrix::Identity(T.Lsize, T.Lsize);
  T.quotient.has_unit_of_ambient = T.E.has_unit_of_ambient = T.F.has_unit_of_ambient = true;

  // With nothing removed the quotient map is a *-isomorphism, so a light
  // numerical confirmation is enough.
  const std::size_t cap = opts.level_cap.value_or(smith_level(X.basis()));
  T.j_report = complete_isometry_defect(X, T.J, cap, derive_seed(opts.seed, 0x1), tol,
                                        T.shilov_ideal.block_indices.empty() ? 8 : opts.restarts);
  if (!T.j_report.is_complete_isometry)
    throw InconsistentNumerics("envelope embedding J failed the complete isometry check (defect " +
                               std::to_string(T.j_report.defect) + ")");
  return T;
}

EnvCheck env_check(const TripleEnvelope& T, const Tolerances& tol) {
  EnvCheck out{true, true};
  for (const auto& t : T.T_basis) {
    const double s = std::max(1.0, t.norm());
    if ((T.E.unit * t - t).norm() > tol.rank_eps * s) out.left_env = false;
    if ((t * T.F.unit - t).norm() > tol.rank_eps * s) out.right_env = false;
  }
  return out;
}

bool triple_iso_check(const std::vector<CMatrix>& T1, const std::vector<CMatrix>& T2, const CMatrix& phi,
                      const Tolerances& tol, double* worst) {
  const auto d = static_cast<Eigen::Index>(T1.size());
  if (d == 0 || static_cast<Eigen::Index>(T2.size()) != d || phi.rows() != d || phi.cols() != d)
    throw InvalidInput("triple_iso_check: phi must be a square map between equal-dimensional spans");
  const CMatrix S1 = stack_vec(T1), S2 = stack_vec(T2);
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod1(S1);
  cod1.setThreshold(tol.rank_eps);
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod2(S2);
  cod2.setThreshold(tol.rank_eps);
  Eigen::FullPivLU<CMatrix> lu(phi);
  lu.setThreshold(tol.rank_eps);
  if (cod1.rank() != d || cod2.rank() != d || lu.rank() != d)
    throw InvalidInput("triple_iso_check: phi is not a bijection between the spans");

  std::vector<CMatrix> img;
  for (Eigen::Index i = 0; i < d; ++i) {
    CMatrix m = CMatrix::Zero(T2.front().rows(), T2.front().cols());
    for (Eigen::Index j = 0; j < d; ++j) m += phi(j, i) * T2[static_cast<std::size_t>(j)];
    img.push_back(std::move(m));
  }
  double err = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const CMatrix xy = T1[static_cast<std::size_t>(i)] * T1[static_cast<std::size_t>(j)].adjoint();
      const CMatrix fxy = img[static_cast<std::size_t>(i)] * img[static_cast<std::size_t>(j)].adjoint();
      for (Eigen::Index k = 0; k < d; ++k) {
        const CMatrix prod = xy * T1[static_cast<std::size_t>(k)];
        const CVector c = cod1.solve(vec(prod));
        const double scale = 1.0 + T1[static_cast<std::size_t>(i)].norm() * T1[static_cast<std::size_t>(j)].norm() *
                                       T1[static_cast<std::size_t>(k)].norm();
        if ((S1 * c - vec(prod)).norm() > 10.0 * tol.rank_eps * scale) {
          if (worst) *worst = std::numeric_limits<double>::infinity();
          return false;  // T1 is not closed under the triple product
        }
        const CVector lhs = S2 * (phi * c);
        const CVector rhs = vec(fxy * img[static_cast<std::size_t>(k)]);
        err = std::max(err, (lhs - rhs).norm() / scale);
      }
    }
  if (worst) *worst = err;
  return err <= tol.norm_eps;
}

TroMap tro_promote(const std::vector<CMatrix>& src_gens, const std::vector<CMatrix>& dst_gens,
                   const Tolerances& tol) {
  if (src_gens.empty() || src_gens.size() != dst_gens.size())
    throw InvalidInput("tro_promote: generator lists must be nonempty and of equal length");
  const Eigen::Index r = src_gens.front().rows(), c = src_gens.front().cols();
  SpanBuilder span(r, c, tol.rank_eps);
  TroMap out;
  std::vector<std::pair<CMatrix, CMatrix>> rejected, frontier;
  // bound: size of the factors of s; words below rank_eps·bound count as zero.
  auto offer = [&](const CMatrix& s, const CMatrix& d, double bound, std::vector<std::pair<CMatrix, CMatrix>>& next) {
    const double scale = s.norm();
    if (scale <= tol.rank_eps * bound || scale == 0.0) {
      rejected.emplace_back(CMatrix::Zero(r, c), bound > 0.0 ? CMatrix(d / bound) : d);
      return;
    }
    if (span.add(s / scale)) {
      out.src.push_back(s / scale);
      out.dst.push_back(d / scale);
      next.emplace_back(s / scale, d / scale);
    } else {
      rejected.emplace_back(s / scale, d / scale);
    }
  };
  for (std::size_t i = 0; i < src_gens.size(); ++i) offer(src_gens[i], dst_gens[i], 0.0, frontier);
  struct Letter {
    CMatrix s, d;
    double bound;
  };
  std::vector<Letter> letters;
  for (std::size_t a = 0; a < src_gens.size(); ++a)
    for (std::size_t b = 0; b < src_gens.size(); ++b)
      letters.push_back({src_gens[a].adjoint() * src_gens[b], dst_gens[a].adjoint() * dst_gens[b],
                         src_gens[a].norm() * src_gens[b].norm()});
  while (!frontier.empty()) {
    std::vector<std::pair<CMatrix, CMatrix>> next;
    for (const auto& [ws, wd] : frontier)
      for (const auto& L : letters) offer(ws * L.s, wd * L.d, L.bound, next);
    frontier = std::move(next);
  }
  const CMatrix S = stack_vec(out.src), Dm = stack_vec(out.dst);
  const Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(S);
  for (const auto& [s, d] : rejected) {
    const CVector co = cod.solve(vec(s));
    out.consistency = std::max(out.consistency, (Dm * co - vec(d)).norm() / (1.0 + d.norm()));
  }
  return out;
}

}  // namespace ncshilov
