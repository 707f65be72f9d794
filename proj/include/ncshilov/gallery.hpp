#pragma once

// Named concrete operator spaces used as fixtures by the CLI and the tests.

#include <cstdint>
#include <vector>

#include "ncshilov/opspace.hpp"

namespace ncshilov::gallery {

/// Q = 2I_3 + ones(3), P = Q^{1/2}.
CMatrix ex4_4_P();
/// (ℂI_3 + span{e12, e13})·P ⊂ M_3, basis {P, e12·P, e13·P}.
OperatorSpace ex4_4();

/// P = (2I_2 + σ_x)^{1/2}, so P² = [[2,1],[1,2]].
CMatrix ex6_9_P();
/// D_2·P ⊂ M_2, basis {e11·P, e22·P}.
OperatorSpace ex6_9_n2();

OperatorSpace scalars();
OperatorSpace d2();
OperatorSpace t2();
OperatorSpace m2();
/// Column space C_2 ⊂ M_{2×1}.
OperatorSpace c2_column();

/// ℂ realized twice, as e12 ⊕ [1] inside M_3.
OperatorSpace twin_scalar();
/// span{diag(1, 1/2)}: the 1/2 summand is redundant.
OperatorSpace diag_pair();
/// ℓ∞_2 with an extra averaging coordinate: (x1, x2, (x1+x2)/2).
OperatorSpace d2_with_average();

/// Bilinear rules as tensors over a basis: m[a][b] = coordinates of m(b_a, b_b).
using ProductTensor = std::vector<std::vector<CVector>>;

/// D_2 with the product pulled back through the similarity S(e1) = diag(1+c, -c),
/// S(e2) = diag(-c, 1+c); the unit is unchanged.
ProductTensor twisted_d2_product(double c);

/// D_3 with basis {1, e11, e22}: f·f = eps·g, g·g = eps·f, f·g = g·f = 0 for
/// f = e11, g = e22, and 1 a two-sided unit.  Not associative.
OperatorSpace d3_unit_basis();
ProductTensor nonassociative_d3_product(double eps);

/// Random space with ambient sides in [1, max_side] and dim in [1, max_dim].
OperatorSpace random_space(std::uint64_t seed, Eigen::Index max_side = 3, std::size_t max_dim = 3);

}  // namespace ncshilov::gallery
