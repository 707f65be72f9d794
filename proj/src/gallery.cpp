#include "ncshilov/gallery.hpp"

#include <algorithm>

namespace ncshilov::gallery {

CMatrix ex4_4_P() {
  const CMatrix q = 2.0 * CMatrix::Identity(3, 3) + CMatrix::Ones(3, 3);
  return psd_sqrt(q);
}

OperatorSpace ex4_4() {
  const CMatrix p = ex4_4_P();
  return OperatorSpace(3, 3, {p, unit_matrix(3, 3, 0, 1) * p, unit_matrix(3, 3, 0, 2) * p}, "ex4_4");
}

CMatrix ex6_9_P() {
  CMatrix q(2, 2);
  q << 2.0, 1.0, 1.0, 2.0;
  return psd_sqrt(q);
}

OperatorSpace ex6_9_n2() {
  const CMatrix p = ex6_9_P();
  return OperatorSpace(2, 2, {unit_matrix(2, 2, 0, 0) * p, unit_matrix(2, 2, 1, 1) * p}, "ex6_9_n2");
}

OperatorSpace scalars() { return OperatorSpace(1, 1, {CMatrix::Identity(1, 1)}, "C"); }

OperatorSpace d2() {
  return OperatorSpace(2, 2, {unit_matrix(2, 2, 0, 0), unit_matrix(2, 2, 1, 1)}, "D_2");
}

OperatorSpace t2() {
  return OperatorSpace(2, 2, {unit_matrix(2, 2, 0, 0), unit_matrix(2, 2, 0, 1), unit_matrix(2, 2, 1, 1)},
                       "T_2");
}

OperatorSpace m2() {
  return OperatorSpace(2, 2,
                       {unit_matrix(2, 2, 0, 0), unit_matrix(2, 2, 0, 1), unit_matrix(2, 2, 1, 0),
                        unit_matrix(2, 2, 1, 1)},
                       "M_2");
}

OperatorSpace c2_column() {
  return OperatorSpace(2, 1, {unit_matrix(2, 1, 0, 0), unit_matrix(2, 1, 1, 0)}, "C_2");
}

OperatorSpace twin_scalar() {
  CMatrix x = CMatrix::Zero(3, 3);
  x(0, 1) = 1.0;
  x(2, 2) = 1.0;
  return OperatorSpace(3, 3, {x}, "twin_scalar");
}

OperatorSpace diag_pair() {
  CMatrix x = CMatrix::Zero(2, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 0.5;
  return OperatorSpace(2, 2, {x}, "diag_pair");
}

OperatorSpace d2_with_average() {
  CMatrix a = CMatrix::Zero(3, 3), b = CMatrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(2, 2) = 0.5;
  b(1, 1) = 1.0;
  b(2, 2) = 0.5;
  return OperatorSpace(3, 3, {a, b}, "d2_with_average");
}

OperatorSpace random_space(std::uint64_t seed, Eigen::Index max_side, std::size_t max_dim) {
  Rng rng(derive_seed(seed, 0x5BACE));
  const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(max_side));
  const Eigen::Index c = 1 + static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(max_side));
  const auto cap = std::min<std::size_t>(max_dim, static_cast<std::size_t>(r * c));
  const std::size_t d = 1 + static_cast<std::size_t>(rng.next_u64() % cap);
  std::vector<CMatrix> basis;
  for (std::size_t k = 0; k < d; ++k) basis.push_back(rng.cmatrix(r, c));
  return OperatorSpace(r, c, std::move(basis), "random_" + std::to_string(seed));
}

ProductTensor twisted_d2_product(double c) {
  Eigen::Matrix2cd S;
  S << 1.0 + c, -c, -c, 1.0 + c;  // columns are S(e1), S(e2)
  const Eigen::Matrix2cd Sinv = S.inverse();
  ProductTensor m(2, std::vector<CVector>(2));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m[a][b] = Sinv * CVector(S.col(a).cwiseProduct(S.col(b)));
  return m;
}

OperatorSpace d3_unit_basis() {
  return OperatorSpace(3, 3, {CMatrix::Identity(3, 3), unit_matrix(3, 3, 0, 0), unit_matrix(3, 3, 1, 1)},
                       "D_3");
}

ProductTensor nonassociative_d3_product(double eps) {
  ProductTensor m(3, std::vector<CVector>(3, CVector::Zero(3)));
  for (int a = 0; a < 3; ++a) {
    m[0][a](a) = 1.0;
    m[a][0](a) = 1.0;
  }
  m[1][1](2) = eps;
  m[2][2](1) = eps;
  return m;
}

}  // namespace ncshilov::gallery
