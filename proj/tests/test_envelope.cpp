#include <doctest.h>

#include <algorithm>

#include "ncshilov/envelope.hpp"
#include "ncshilov/gallery.hpp"

using namespace ncshilov;

namespace {

std::vector<CMatrix> corners_of(const std::vector<CMatrix>& ts) {
  std::vector<CMatrix> out;
  for (const auto& t : ts) out.push_back(corner_embed(t));
  return out;
}

}  // namespace

TEST_CASE("linking_algebra examples") {
  auto Lk = linking_algebra(gallery::scalars());
  CHECK(Lk.L.dim() == 4);
  CHECK(Lk.D.blocks.size() == 1);

  Lk = linking_algebra(gallery::ex4_4());
  CHECK(Lk.L.dim() == 36);
  REQUIRE(Lk.D.blocks.size() == 1);
  CHECK(Lk.D.blocks[0].block_dim == 6);
  CHECK(Lk.k[0] == 3);
  CHECK(Lk.l[0] == 3);

  const OperatorSpace e11(2, 2, {unit_matrix(2, 2, 0, 0)});
  Lk = linking_algebra(e11);
  std::size_t sum = 0;
  for (const auto& b : Lk.D.blocks) sum += b.block_dim * b.block_dim;
  CHECK(sum == Lk.L.dim());
  CHECK((Lk.p + Lk.q - Lk.L.unit).norm() < 1e-10);
  for (const auto& c : Lk.corners) CHECK((Lk.p * c * Lk.q - c).norm() < 1e-10);
}

TEST_CASE("boundary_blocks on fixtures") {
  CHECK(boundary_blocks(linking_algebra(gallery::ex4_4())).ideal.block_indices.empty());
  CHECK(boundary_blocks(linking_algebra(gallery::d2())).ideal.block_indices.empty());
  CHECK(boundary_blocks(linking_algebra(gallery::twin_scalar())).ideal.block_indices.empty());

  const auto Lp = linking_algebra(gallery::diag_pair());
  REQUIRE(Lp.D.blocks.size() == 2);
  const auto bp = boundary_blocks(Lp);
  REQUIRE(bp.ideal.block_indices.size() == 1);
  // The removed block is the one carrying the 1/2 copy.
  CHECK(operator_norm(Lp.block_images(bp.ideal.block_indices[0])[0]) == doctest::Approx(0.5));

  const auto La = linking_algebra(gallery::d2_with_average());
  REQUIRE(La.D.blocks.size() == 3);
  const auto ba = boundary_blocks(La);
  REQUIRE(ba.ideal.block_indices.size() == 1);
  const auto imgs = La.block_images(ba.ideal.block_indices[0]);
  CHECK(std::abs(imgs[0](0, 0)) == doctest::Approx(0.5));
  CHECK(std::abs(imgs[1](0, 0)) == doctest::Approx(0.5));
}

TEST_CASE("boundary_blocks agrees with the exhaustive oracle") {
  for (const auto& X : {gallery::diag_pair(), gallery::d2_with_average(), gallery::d2(), gallery::t2()}) {
    const auto Lk = linking_algebra(X);
    auto a = boundary_blocks(Lk).ideal.block_indices;
    auto b = exhaustive_boundary_ideal(Lk).block_indices;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("reduce_boundary_ideal returns blocks in order until the predicate holds") {
  auto subset_of_12 = [](const std::vector<std::size_t>& s) {
    return std::all_of(s.begin(), s.end(), [](std::size_t i) { return i == 1 || i == 2; });
  };
  CHECK(reduce_boundary_ideal({0, 1, 2}, subset_of_12).block_indices == std::vector<std::size_t>{1, 2});
  auto small = [](const std::vector<std::size_t>& s) { return s.size() <= 1; };
  CHECK(reduce_boundary_ideal({0, 1, 2}, small).block_indices == std::vector<std::size_t>{2});
  CHECK(reduce_boundary_ideal({}, small).block_indices.empty());
}

TEST_CASE("triple_envelope examples") {
  auto T = triple_envelope(gallery::ex4_4());
  CHECK(T.shilov_ideal.block_indices.empty());
  CHECK(T.dim_T() == 9);
  CHECK(T.E.dim() == 9);
  CHECK(T.F.dim() == 9);
  CHECK(T.j_report.is_complete_isometry);

  T = triple_envelope(gallery::t2());
  CHECK(T.dim_T() == 4);
  CHECK(T.quotient.dim() == 16);
  CHECK(T.quotient.ambient == 4);

  T = triple_envelope(gallery::m2());
  CHECK(T.dim_T() == 4);

  T = triple_envelope(gallery::diag_pair());
  CHECK(T.dim_T() == 1);
  CHECK(T.shilov_ideal.block_indices.size() == 1);
}

TEST_CASE("envelope invariants") {
  for (const auto& X : {gallery::ex4_4(), gallery::t2(), gallery::ex6_9_n2(), gallery::d2_with_average(),
                        gallery::random_space(11), gallery::random_space(12)}) {
    const auto T = triple_envelope(X);
    // re-generation from J(X) does not grow the quotient
    const auto G = generate(T.K + T.Lsize, corners_of(T.J));
    CHECK(G.dim() == T.quotient.dim());
    // T·T*·T ⊂ T
    for (const auto& a : T.T_basis)
      for (const auto& b : T.T_basis)
        for (const auto& c : T.T_basis) CHECK(span_membership(T.T_basis, a * b.adjoint() * c).member);
    const auto env = env_check(T);
    CHECK(env.left_env);
    CHECK(env.right_env);
  }
}

TEST_CASE("represent and lift are inverse on an empty Shilov ideal") {
  const auto T = triple_envelope(gallery::ex4_4());
  const CMatrix e12 = unit_matrix(3, 3, 0, 1);
  CMatrix a = CMatrix::Zero(6, 6);
  a.topLeftCorner(3, 3) = e12;
  const CMatrix img = T.represent(a);
  const auto back = T.lift({img});
  CHECK((back[0] - a).norm() < 1e-9);
  // J agrees with represent on corners
  for (std::size_t j = 0; j < T.J.size(); ++j)
    CHECK((T.represent(T.linking.corners[j]).topRightCorner(T.K, T.Lsize) - T.J[j]).norm() < 1e-10);
}

TEST_CASE("triple_iso_check examples") {
  const auto M = gallery::m2().basis();
  const CMatrix id = CMatrix::Identity(4, 4);
  CHECK(triple_iso_check(M, M, id));

  Rng rng(4);
  const CMatrix u = rng.unitary(2), v = rng.unitary(2);
  std::vector<CMatrix> img;
  for (const auto& m : M) img.push_back(u * m * v);
  CHECK(triple_iso_check(M, img, id));

  std::vector<CMatrix> tr;
  for (const auto& m : M) tr.push_back(m.transpose());
  CHECK_FALSE(triple_iso_check(M, tr, id));

  CHECK_THROWS_AS(triple_iso_check(M, M, CMatrix::Zero(4, 4)), InvalidInput);
}

TEST_CASE("tro_promote reproduces the identity and detects inconsistency") {
  const auto T = triple_envelope(gallery::ex4_4());
  const auto m = tro_promote(T.J, T.J);
  CHECK(m.src.size() == 9);
  CHECK(m.consistency < 1e-10);

  // Sending a TRO generator set to one with different relations is inconsistent.
  const auto M = gallery::m2().basis();
  std::vector<CMatrix> tr;
  for (const auto& x : M) tr.push_back(x.transpose());
  CHECK(tro_promote(M, tr).consistency > 1e-3);
}

TEST_CASE("direct sums and column amplification of envelopes") {
  const auto X = gallery::random_space(21), Y = gallery::random_space(22);
  const auto TX = triple_envelope(X), TY = triple_envelope(Y);
  const auto TS = triple_envelope(direct_sum(X, Y));
  std::vector<CMatrix> dst;
  for (const auto& j : TX.J) {
    CMatrix m = CMatrix::Zero(TX.K + TY.K, TX.Lsize + TY.Lsize);
    m.topLeftCorner(TX.K, TX.Lsize) = j;
    dst.push_back(m);
  }
  for (const auto& j : TY.J) {
    CMatrix m = CMatrix::Zero(TX.K + TY.K, TX.Lsize + TY.Lsize);
    m.bottomRightCorner(TY.K, TY.Lsize) = j;
    dst.push_back(m);
  }
  const auto m = tro_promote(TS.J, dst);
  CHECK(m.src.size() == TS.dim_T());
  CHECK(m.src.size() == TX.dim_T() + TY.dim_T());
  CHECK(m.consistency < 1e-8);
  CHECK(triple_iso_check(m.src, m.dst, CMatrix::Identity(static_cast<Eigen::Index>(m.src.size()),
                                                            static_cast<Eigen::Index>(m.src.size()))));
}

TEST_CASE("column amplification of an envelope") {
  for (std::uint64_t seed : {21u, 23u, 24u}) {
    const auto X = gallery::random_space(seed);
    const auto TX = triple_envelope(X);
    const auto TC = triple_envelope(column_amplification(X, 2));
    std::vector<CMatrix> dst;
    for (Eigen::Index i = 0; i < 2; ++i)
      for (const auto& j : TX.J) {
        CMatrix m = CMatrix::Zero(2 * TX.K, TX.Lsize);
        m.block(i * TX.K, 0, TX.K, TX.Lsize) = j;
        dst.push_back(m);
      }
    // Cross letters vanish exactly on one side and only to rounding on the other.
    const auto m = tro_promote(TC.J, dst);
    CHECK(m.src.size() == 2 * TX.dim_T());
    CHECK(m.consistency < 1e-8);
  }
}

TEST_CASE("envelope of the envelope is itself") {
  const auto T = triple_envelope(gallery::ex6_9_n2());
  const OperatorSpace G(T.K, T.Lsize, T.T_basis);
  const auto TG = triple_envelope(G);
  CHECK(TG.dim_T() == T.dim_T());
  CHECK(TG.shilov_ideal.block_indices.empty());
}
