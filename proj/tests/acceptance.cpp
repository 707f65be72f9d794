// Acceptance report: one PASS/FAIL line per criterion, tolerances fixed below.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "ncshilov/gallery.hpp"
#include "ncshilov/minspace.hpp"
#include "ncshilov/oplication.hpp"

using namespace ncshilov;

namespace {

constexpr double kSpanTol = 1e-8;
constexpr double kGapMin = 1e-4;
constexpr double kRuntime1 = 10.0;      // seconds
constexpr double kAnomalyTol = 1e-6;
constexpr double kTripleTol = 1e-6;
constexpr double kRuntime4 = 120.0;     // seconds
constexpr double kUniqueTol = 1e-9;
constexpr double kAssocTol = 1e-8;
constexpr double kProductTol = 1e-8;
constexpr std::size_t kLobTuples = 200;
constexpr double kLobFactor = 0.9;
constexpr double kStoneTol = 1e-8;
constexpr std::size_t kMinSample = 64;
constexpr double kMinNormTol = 1e-3;

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) note << "; ";
      else note.str("");
      pass = false;
      note << what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CMatrix concrete_action(const OperatorSpace& X, const CMatrix& c, bool right = false) {
  const auto d = static_cast<Eigen::Index>(X.dim());
  CMatrix out(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const CMatrix& b = X.basis()[static_cast<std::size_t>(k)];
    out.col(k) = X.coordinates(right ? CMatrix(b * c) : CMatrix(c * b));
  }
  return out;
}

bool same_span(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b) {
  const Tolerances tol{kSpanTol, 1e-6, 1e-7};
  if (column_span(stack_vec(a), kSpanTol).cols() != column_span(stack_vec(b), kSpanTol).cols()) return false;
  for (const auto& m : a)
    if (!span_membership(b, m, tol).member) return false;
  for (const auto& m : b)
    if (!span_membership(a, m, tol).member) return false;
  return true;
}

std::vector<CMatrix> left_actions_of_basis(const OperatorSpace& A, bool right = false) {
  std::vector<CMatrix> out;
  for (const auto& a : A.basis()) out.push_back(concrete_action(A, a, right));
  return out;
}

CMatrix diag2(cplx a, cplx b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

void c1(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto X = gallery::ex4_4();
  const auto T = triple_envelope(X);
  const auto& Lk = T.linking;
  o.require(Lk.D.blocks.size() == 1 && Lk.D.blocks[0].block_dim == 6, "linking algebra is not M_6");
  o.require(Lk.L.dim() == 36, "linking algebra dim " + std::to_string(Lk.L.dim()));
  o.require(T.shilov_ideal.block_indices.empty(), "Shilov ideal not empty");
  o.require(T.dim_T() == 9, "T(X) dim " + std::to_string(T.dim_T()));
  const auto Ml = left_multipliers(T);
  o.require(Ml.dim() == 3, "M_l dim " + std::to_string(Ml.dim()));
  const std::vector<CMatrix> A{CMatrix::Identity(3, 3), unit_matrix(3, 3, 0, 1), unit_matrix(3, 3, 0, 2)};
  std::vector<CMatrix> concrete, embedded, pulled;
  for (const auto& a : A) concrete.push_back(concrete_action(X, a));
  for (const auto& a : Ml.element_basis) embedded.push_back(T.embed_E(a));
  for (const auto& m : T.lift(embedded)) pulled.push_back(m.topLeftCorner(3, 3));
  o.require(same_span(Ml.action_basis, concrete), "M_l actions differ from A");
  o.require(same_span(pulled, A), "M_l elements differ from A");
  const auto r = multiplier_norm(T, Ml, concrete_action(X, A[1]));
  const double gap = r.multiplier_norm - r.cb_norm_upper;
  o.require(gap > kGapMin, "multiplier norm minus cb upper bound is " + std::to_string(gap));
  const double t = seconds_since(t0);
  o.require(t < kRuntime1, "runtime " + std::to_string(t) + " s");
  if (o.pass)
    o.note << "M_6, ideal {}, dim T 9, M_l = A; ‖e12‖_Ml = " << r.multiplier_norm << ", cb ∈ [" << r.cb_norm_lower
           << ", " << r.cb_norm_upper << "], gap " << gap << "; " << t << " s";
}

void c2(Outcome& o) {
  const auto X = gallery::ex6_9_n2();
  const auto T = triple_envelope(X);
  o.require(T.linking.D.blocks.size() == 1 && T.linking.D.blocks[0].block_dim == 4, "linking algebra is not M_4");
  o.require(T.kept.size() == 1 && T.k[0] + T.l[0] == 4, "C*(∂X) is not a single block of size 4");
  const auto Ml = left_multipliers(T), Al = adjointable_left(T);
  const auto Mr = right_multipliers(T), Br = adjointable_right(T);
  o.require(Ml.dim() == 2 && Al.dim() == 2 && Mr.dim() == 2 && Br.dim() == 1,
            "dims " + std::to_string(Ml.dim()) + "/" + std::to_string(Al.dim()) + "/" + std::to_string(Mr.dim()) +
                "/" + std::to_string(Br.dim()));
  const CMatrix P = gallery::ex6_9_P(), Pinv = P.inverse();
  std::vector<CMatrix> d2l, conj;
  for (const auto& d : {diag2(1, 0), diag2(0, 1)}) {
    d2l.push_back(concrete_action(X, d));
    conj.push_back(concrete_action(X, Pinv * d * P, true));
  }
  o.require(same_span(Ml.action_basis, d2l), "M_l is not D_2");
  o.require(same_span(Al.action_basis, d2l), "A_l is not D_2");
  o.require(same_span(Mr.action_basis, conj), "M_r is not P^-1 D_2 P");
  o.require(same_span(Br.action_basis, {CMatrix::Identity(2, 2)}), "B_r is not the scalars");
  const double n = multiplier_norm(T, Ml, conj[0]).multiplier_norm;
  o.require(std::abs(n - 1.0) <= kAnomalyTol, "anomaly norm " + std::to_string(n));
  if (o.pass)
    o.note << "one block of size 4; dims 2/2/2/1; right mult by P^-1 diag(1,0) P has multiplier norm " << n
           << " (‖P^-1 diag(1,0) P‖ = " << operator_norm(Pinv * diag2(1, 0) * P) << ")";
}

void c3(Outcome& o) {
  for (const auto& A : {gallery::d2(), gallery::t2(), gallery::m2()}) {
    const auto T = triple_envelope(A);
    const auto Ml = left_multipliers(T), Mr = right_multipliers(T);
    const std::string tag = A.label();
    o.require(Ml.dim() == A.dim() && Mr.dim() == A.dim(), tag + ": multiplier dims differ from dim A");
    o.require(same_span(Ml.action_basis, left_actions_of_basis(A)), tag + ": M_l differs from A");
    o.require(same_span(Mr.action_basis, left_actions_of_basis(A, true)), tag + ": M_r differs from A");
  }
  const auto T = triple_envelope(gallery::t2());
  o.require(T.dim_T() == 4 && T.K == 2 && T.Lsize == 2, "T(T_2) is not M_2");
  auto a = T.shilov_ideal.block_indices, b = exhaustive_boundary_ideal(T.linking).block_indices;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  o.require(a == b, "T_2 boundary ideal differs from the exhaustive oracle");
  if (o.pass) o.note << "M_l = M_r = A for D_2, T_2, M_2 (dims 2, 3, 4); T(T_2) ≅ M_2, oracle agrees";
}

std::vector<CMatrix> block_sum(const TripleEnvelope& TX, const TripleEnvelope& TY) {
  std::vector<CMatrix> out;
  for (const auto& j : TX.J) {
    CMatrix m = CMatrix::Zero(TX.K + TY.K, TX.Lsize + TY.Lsize);
    m.topLeftCorner(TX.K, TX.Lsize) = j;
    out.push_back(m);
  }
  for (const auto& j : TY.J) {
    CMatrix m = CMatrix::Zero(TX.K + TY.K, TX.Lsize + TY.Lsize);
    m.bottomRightCorner(TY.K, TY.Lsize) = j;
    out.push_back(m);
  }
  return out;
}

std::vector<CMatrix> column_pair(const TripleEnvelope& TX) {
  std::vector<CMatrix> out;
  for (Eigen::Index i = 0; i < 2; ++i)
    for (const auto& j : TX.J) {
      CMatrix m = CMatrix::Zero(2 * TX.K, TX.Lsize);
      m.block(i * TX.K, 0, TX.K, TX.Lsize) = j;
      out.push_back(m);
    }
  return out;
}

bool iso(const std::vector<CMatrix>& gens_src, const std::vector<CMatrix>& gens_dst, double& worst,
         std::size_t& dim) {
  const auto m = tro_promote(gens_src, gens_dst);
  dim = m.src.size();
  const auto d = static_cast<Eigen::Index>(m.src.size());
  double w = 0.0;
  Tolerances tol;
  tol.norm_eps = kTripleTol;
  const bool ok = m.consistency <= kTripleTol && triple_iso_check(m.src, m.dst, CMatrix::Identity(d, d), tol, &w);
  worst = std::max({worst, w, m.consistency});
  return ok;
}

void c4(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto X = gallery::random_space(derive_seed(4000, s)), Y = gallery::random_space(derive_seed(4001, s));
    const auto TX = triple_envelope(X), TY = triple_envelope(Y);
    std::size_t dim = 0;
    const auto TS = triple_envelope(direct_sum(X, Y));
    o.require(iso(TS.J, block_sum(TX, TY), worst, dim) && dim == TS.dim_T() && dim == TX.dim_T() + TY.dim_T(),
              "seed " + std::to_string(s) + ": T(X ⊕ Y) vs T(X) ⊕ T(Y)");
    const auto TC = triple_envelope(column_amplification(X, 2));
    o.require(iso(TC.J, column_pair(TX), worst, dim) && dim == TC.dim_T() && dim == 2 * TX.dim_T(),
              "seed " + std::to_string(s) + ": T(C_2(X)) vs C_2(T(X))");
  }
  const double t = seconds_since(t0);
  o.require(t < kRuntime4, "runtime " + std::to_string(t) + " s");
  if (o.pass) o.note << "5 seeds, worst triple-product residual " << worst << "; " << t << " s";
}

void c5(Outcome& o) {
  {
    const auto X = gallery::t2();
    const auto a = product_action(X, X);
    const auto T = triple_envelope(X);
    const auto c = derive_theta(a, T);
    o.require(c.theta_unital && c.theta_homomorphism && *c.theta_homomorphism && *c.module_action,
              "T_2: θ flags");
    o.require(c.theta_completely_isometric, "T_2: θ not completely isometric");
    auto Ml = left_multipliers(T);
    std::reverse(Ml.element_basis.begin(), Ml.element_basis.end());
    std::reverse(Ml.action_basis.begin(), Ml.action_basis.end());
    const auto c2 = derive_theta(a, T, Ml);
    double diff = 0.0;
    for (std::size_t s = 0; s < c.theta.size(); ++s) diff = std::max(diff, (c.theta[s] - c2.theta[s]).norm());
    o.require(diff <= kUniqueTol, "T_2: θ not unique, " + std::to_string(diff));
  }
  {
    const auto a = product_action(gallery::m2(), gallery::c2_column());
    const auto c = derive_theta(a, triple_envelope(gallery::c2_column()));
    o.require(c.theta_unital && c.theta_homomorphism && *c.theta_homomorphism == *c.module_action,
              "M_2 on C_2: θ flags");
    o.require(c.adjointable_range && c.theta_star_linear && *c.theta_star_linear, "M_2 on C_2: θ not *-linear into A_l");
  }
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const auto X = gallery::random_space(derive_seed(5000, s));
    const auto T = triple_envelope(X);
    const auto c = derive_theta(product_action(gallery::scalars(), X), T);
    o.require(c.theta_unital && (c.theta[0] - CMatrix::Identity(T.K, T.K)).norm() <= kUniqueTol,
              "scalars on random X: θ is not the unit embedding");
  }
  double assoc = 0.0;
  for (const auto& A : {gallery::t2(), gallery::m2()}) {
    const auto I = CMatrix::Identity(A.rows(), A.cols());
    const auto v = brs_certify(A, product_tensor(A, I), A.coordinates(I));
    o.require(v.operator_algebra, A.label() + ": BRS not certified");
    assoc = std::max(assoc, v.associativity_residual);
  }
  {
    const auto A = gallery::m2();
    Rng rng(derive_seed(5100, 0));
    const CMatrix s = rng.unitary(2);
    const auto v = nonassoc_brs(A, A, product_tensor(A, s), A.coordinates(s.adjoint()),
                                NonvanishingCondition::kernel);
    o.require(v.associative, "M_2 with a unitary twist: not associative");
    assoc = std::max(assoc, v.associativity_residual);
  }
  o.require(assoc <= kAssocTol, "associativity residual " + std::to_string(assoc));
  if (o.pass) o.note << "θ flags certified on T_2, M_2 on C_2, ℂ on 3 random X; associativity residual " << assoc;
}

void c6(Outcome& o) {
  double worst = 0.0;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const auto X = gallery::random_space(derive_seed(6000, s));
    const auto M1 = left_multipliers(triple_envelope(X));
    const auto T2 = triple_envelope(column_amplification(X, 2));
    const auto M2 = left_multipliers(T2);
    o.require(M2.dim() == 4 * M1.dim(), "seed " + std::to_string(s) + ": dims " + std::to_string(M2.dim()) + " vs 4·" +
                                           std::to_string(M1.dim()));
    Rng rng(derive_seed(6100, s));
    const auto d = static_cast<Eigen::Index>(M2.dim());
    const CVector ca = rng.cvector(d), cb = rng.cvector(d);
    CMatrix a = CMatrix::Zero(T2.K, T2.K), b = a;
    for (Eigen::Index k = 0; k < d; ++k) {
      a += ca(k) * M2.element_basis[static_cast<std::size_t>(k)];
      b += cb(k) * M2.element_basis[static_cast<std::size_t>(k)];
    }
    const CMatrix lhs = multiplier_action(T2, a * b, false);
    const CMatrix rhs = multiplier_action(T2, a, false) * multiplier_action(T2, b, false);
    worst = std::max(worst, (lhs - rhs).norm() / std::max(1.0, rhs.norm()));
  }
  o.require(worst <= kProductTol, "product residual " + std::to_string(worst));
  if (o.pass) o.note << "3 seeds, dim M_l(C_2(X)) = 4 dim M_l(X), product residual " << worst;
}

void c7(Outcome& o) {
  std::size_t checked = 0;
  for (const auto& X : {gallery::ex4_4(), gallery::t2()}) {
    const auto T = triple_envelope(X);
    const auto Ml = left_multipliers(T);
    std::vector<CMatrix> ops = Ml.action_basis;
    Rng rng(derive_seed(7000, X.dim()));
    CMatrix mix = CMatrix::Zero(static_cast<Eigen::Index>(X.dim()), static_cast<Eigen::Index>(X.dim()));
    for (const auto& a : Ml.action_basis) mix += rng.cnormal() * a;
    ops.push_back(mix);
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const double m = multiplier_norm(T, Ml, ops[i]).multiplier_norm;
      const auto seed = derive_seed(7100, X.dim(), i);
      const auto hi = lob_verify(T, Ml, ops[i], m, kLobTuples, seed);
      const auto lo = lob_verify(T, Ml, ops[i], kLobFactor * m, kLobTuples, seed);
      const std::string tag = X.label() + " multiplier " + std::to_string(i);
      o.require(hi.passed, tag + ": fails at M");
      o.require(!lo.passed && !lo.witness.empty(), tag + ": no witness at 0.9 M");
      ++checked;
    }
  }
  if (o.pass) o.note << checked << " multipliers: pass at M, witness at 0.9 M over " << kLobTuples << " tuples";
}

void c8(Outcome& o) {
  double worst = 0.0, worst_unitary = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(derive_seed(8000, s));
    for (const auto& A : {gallery::m2(), gallery::d2()}) {
      const bool full = A.dim() == 4;
      const CMatrix u0 = full ? rng.unitary(2) : diag2(std::polar(1.0, rng.uniform() * 6.283), std::polar(1.0, rng.uniform() * 6.283));
      CMatrix v = full ? rng.unitary(2) : CMatrix(CMatrix::Identity(2, 2));
      if (!full && s % 2 == 1) v << 0, 1, 1, 0;
      const auto d = static_cast<Eigen::Index>(A.dim());
      CMatrix tmap(d, d);
      for (Eigen::Index k = 0; k < d; ++k)
        tmap.col(k) = A.coordinates(u0 * v * A.basis()[static_cast<std::size_t>(k)] * v.adjoint());
      const UnitalAlgebra U{A, A.coordinates(CMatrix::Identity(2, 2))};
      const auto r = banach_stone(U, U, tmap);
      double res = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const CMatrix lhs = A.element(tmap.col(k));
        const CMatrix rhs = r.u * A.element(r.pi.col(k));
        res = std::max(res, (lhs - rhs).norm());
      }
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
          const CMatrix pa = A.element(r.pi.col(a)), pb = A.element(r.pi.col(b));
          const CMatrix ab = A.basis()[static_cast<std::size_t>(a)] * A.basis()[static_cast<std::size_t>(b)];
          res = std::max(res, (A.element(r.pi * A.coordinates(ab)) - pa * pb).norm());
        }
      worst = std::max(worst, res);
      worst_unitary = std::max(worst_unitary, (r.u.adjoint() * r.u - CMatrix::Identity(2, 2)).norm());
    }
  }
  o.require(worst <= kStoneTol, "factorization residual " + std::to_string(worst));
  o.require(worst_unitary <= kStoneTol, "unitary defect " + std::to_string(worst_unitary));
  if (o.pass) o.note << "20 maps, factorization residual " << worst << ", unitary defect " << worst_unitary;
}

void c9(Outcome& o) {
  const BanachSpace linf{2, BallKind::linf, {}}, l1{2, BallKind::l1, {}};
  const auto Rinf = realize_min(linf, 2, 1);
  const auto r = cross_validate_multipliers(linf, Rinf);
  std::vector<CMatrix> d2ops{diag2(1, 0), diag2(0, 1)};
  const auto T = triple_envelope(Rinf.space);
  o.require(r.ml_dim == 2 && r.mr_dim == 2 && r.banach_dim == 2 && r.spans_agree, "ℓ∞_2: sides are not D_2");
  o.require(same_span(left_multipliers(T).action_basis, d2ops), "ℓ∞_2: M_l is not D_2");
  o.require(same_span(banach_multipliers(Rinf), d2ops), "ℓ∞_2: Banach multipliers are not D_2");
  const auto R1 = realize_min(l1, kMinSample, 1);
  const auto s = cross_validate_multipliers(l1, R1);
  o.require(s.ml_dim == 1 && s.mr_dim == 1 && s.banach_dim == 1, "ℓ1_2: dims " + std::to_string(s.ml_dim) + "/" +
                                                                     std::to_string(s.banach_dim));
  o.require(s.max_norm_gap <= kMinNormTol, "ℓ1_2: norm gap " + std::to_string(s.max_norm_gap));
  if (o.pass) o.note << "ℓ∞_2: D_2 on both sides, gap " << r.max_norm_gap << "; ℓ1_2 at " << kMinSample
                     << " points: dim 1, gap " << s.max_norm_gap;
}

void c10(Outcome& o) {
  std::vector<OperatorSpace> fixtures{gallery::ex4_4(),     gallery::ex6_9_n2(),   gallery::scalars(),
                                      gallery::d2(),        gallery::t2(),         gallery::m2(),
                                      gallery::c2_column(), gallery::twin_scalar(), gallery::diag_pair(),
                                      gallery::d2_with_average(), gallery::d3_unit_basis()};
  for (std::uint64_t s = 1; s <= 6; ++s) fixtures.push_back(gallery::random_space(derive_seed(10000, s)));
  std::size_t compared = 0;
  for (const auto& X : fixtures) {
    const auto Lk = linking_algebra(X);
    if (Lk.D.blocks.size() > 4) continue;
    auto a = boundary_blocks(Lk).ideal.block_indices, b = exhaustive_boundary_ideal(Lk).block_indices;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    o.require(a == b, (X.label().empty() ? std::string("fixture") : X.label()) + ": per-block ideal differs");
    ++compared;
  }
  if (o.pass) o.note << compared << " fixtures agree with the exhaustive search";
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<void(Outcome&)>>> criteria{
      {1, c1}, {2, c2}, {3, c3}, {4, c4}, {5, c5}, {6, c6}, {7, c7}, {8, c8}, {9, c9}, {10, c10}};
  int failed = 0;
  for (const auto& [n, f] : criteria) {
    Outcome o;
    try {
      f(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %2d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.note.str().c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
