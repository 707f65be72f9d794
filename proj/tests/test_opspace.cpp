#include <doctest.h>

#include <cmath>

#include "ncshilov/gallery.hpp"
#include "ncshilov/opspace.hpp"

using namespace ncshilov;

namespace {

LevelElement random_level(Rng& rng, std::size_t n, std::size_t dim) {
  LevelElement x(n, dim);
  for (auto& b : x.blocks) b = rng.cvector(static_cast<Eigen::Index>(dim));
  return x;
}

// diag(x, y) as an element of M_{m+n}(X ⊕ Y) over the direct-sum basis.
LevelElement diagonal_sum(const LevelElement& x, std::size_t dx, const LevelElement& y, std::size_t dy) {
  const std::size_t n = x.n + y.n;
  LevelElement z(n, dx + dy);
  for (std::size_t i = 0; i < x.n; ++i)
    for (std::size_t j = 0; j < x.n; ++j) z.at(i, j).head(static_cast<Eigen::Index>(dx)) = x.at(i, j);
  for (std::size_t i = 0; i < y.n; ++i)
    for (std::size_t j = 0; j < y.n; ++j)
      z.at(x.n + i, x.n + j).tail(static_cast<Eigen::Index>(dy)) = y.at(i, j);
  return z;
}

}  // namespace

TEST_CASE("level_norm examples") {
  const auto c = gallery::scalars();
  LevelElement x(1, 1);
  x.at(0, 0)(0) = 5.0;
  CHECK(level_norm(c, x) == doctest::Approx(5.0));

  LevelElement id(2, 1);
  id.at(0, 0)(0) = 1.0;
  id.at(1, 1)(0) = 1.0;
  CHECK(level_norm(c, id) == doctest::Approx(1.0));

  // Row of the two basis rows of R_2 = span{e12, e13} ⊂ M_{1×3}.
  const OperatorSpace r2(1, 3, {unit_matrix(1, 3, 0, 1), unit_matrix(1, 3, 0, 2)}, "R_2");
  LevelElement row(2, 2);
  row.at(0, 0) << 1.0, 0.0;
  row.at(0, 1) << 0.0, 1.0;
  CHECK(level_norm(r2, row) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("level_norm rejects mismatched coefficient vectors") {
  LevelElement x(1, 2);
  CHECK_THROWS_AS(level_norm(gallery::scalars(), x), InvalidInput);
}

TEST_CASE("operator space construction rejects dependent bases") {
  CHECK_THROWS_AS(OperatorSpace(2, 2, {CMatrix::Identity(2, 2), 3.0 * CMatrix::Identity(2, 2)}), InvalidInput);
  CHECK_THROWS_AS(OperatorSpace(2, 2, {}), InvalidInput);
  CHECK_THROWS_AS(OperatorSpace(2, 2, {CMatrix::Identity(3, 3)}), InvalidInput);
}

TEST_CASE("paulsen_system") {
  const auto s = paulsen_system(gallery::scalars());
  CHECK(s.dim() == 3);
  CHECK(s.rows() == 2);

  const OperatorSpace two(1, 1, {2.0 * CMatrix::Identity(1, 1)});
  const auto s2 = paulsen_system(two);
  for (const auto& b : s2.basis()) CHECK(s.contains(b));
  for (const auto& b : s.basis()) CHECK(s2.contains(b));

  const auto st = paulsen_system(gallery::t2());
  CHECK(st.rows() == 4);
  CHECK(st.dim() == 7);
  CHECK(st.contains(CMatrix::Identity(4, 4)));
  for (const auto& b : st.basis()) CHECK(st.contains(b.adjoint()));
}

TEST_CASE("direct_sum and column_amplification shapes") {
  const auto cc = direct_sum(gallery::scalars(), gallery::scalars());
  CHECK(cc.dim() == 2);
  CHECK(cc.rows() == 2);
  CHECK(cc.contains(CMatrix::Identity(2, 2)));

  const auto tc = direct_sum(gallery::t2(), gallery::scalars());
  CHECK(tc.dim() == 4);
  CHECK(tc.rows() == 3);
  CHECK(tc.cols() == 3);

  const auto t = gallery::t2();
  const auto t1 = column_amplification(t, 1);
  CHECK(t1.dim() == t.dim());
  for (std::size_t k = 0; k < t.dim(); ++k) CHECK((t1.basis()[k] - t.basis()[k]).norm() == 0.0);

  const auto c3 = column_amplification(gallery::scalars(), 3);
  CHECK(c3.dim() == 3);
  CHECK(c3.rows() == 3);
  CHECK(c3.cols() == 1);

  const auto ct = column_amplification(t, 2);
  CHECK(ct.dim() == 6);
  CHECK(ct.rows() == 4);
  CHECK(ct.cols() == 2);
}

TEST_CASE("Ruan axioms spot checks") {
  Rng rng(2024);
  for (int t = 0; t < 15; ++t) {
    const auto X = gallery::random_space(100 + static_cast<std::uint64_t>(t));
    const auto Y = gallery::random_space(200 + static_cast<std::uint64_t>(t));
    const std::size_t m = 1 + t % 3, n = 1 + (t + 1) % 3;
    const auto x = random_level(rng, m, X.dim());
    const auto y = random_level(rng, n, X.dim());
    // ‖x ⊕ y‖ = max(‖x‖, ‖y‖) inside the same space
    LevelElement z(m + n, X.dim());
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) z.at(i, j) = x.at(i, j);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) z.at(m + i, m + j) = y.at(i, j);
    CHECK(std::abs(level_norm(X, z) - std::max(level_norm(X, x), level_norm(X, y))) <= 1e-10 * level_norm(X, z));

    // ‖αxβ‖ ≤ ‖α‖‖x‖‖β‖ with scalar matrices α, β
    const CMatrix alpha = rng.cmatrix(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    const CMatrix beta = rng.cmatrix(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    LevelElement axb(m, X.dim());
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
          for (std::size_t l = 0; l < m; ++l)
            axb.at(i, j) += alpha(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * x.at(k, l) *
                            beta(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j));
    CHECK(level_norm(X, axb) <= operator_norm(alpha) * level_norm(X, x) * operator_norm(beta) * (1 + 1e-12));

    // direct sums of spaces: ‖diag(x, y)‖ = max
    const auto S = direct_sum(X, Y);
    const auto yy = random_level(rng, n, Y.dim());
    const auto d = diagonal_sum(x, X.dim(), yy, Y.dim());
    CHECK(std::abs(level_norm(S, d) - std::max(level_norm(X, x), level_norm(Y, yy))) <= 1e-10 * level_norm(S, d));
  }
}
