#include "ncshilov/multiplier.hpp"

#include <algorithm>
#include <cmath>

namespace ncshilov {

namespace {

constexpr double kConvexStages[] = {8.0, 64.0, 512.0, 4096.0};

bool is_right(MultiplierKind k) { return k == MultiplierKind::right || k == MultiplierKind::adjointable_right; }

void check_closure(const std::vector<CMatrix>& basis, const char* what, bool star, const Tolerances& tol) {
  const Tolerances loose{std::max(tol.rank_eps, 1e-8), std::max(tol.norm_eps, 1e-7), tol.gap_eps};
  for (const auto& a : basis) {
    if (star && !span_membership(basis, a.adjoint(), loose).member)
      throw InconsistentNumerics(std::string(what) + ": solution space is not closed under adjoints");
    for (const auto& b : basis)
      if (!span_membership(basis, a * b, loose).member)
        throw InconsistentNumerics(std::string(what) + ": solution space is not closed under products");
  }
}

MultiplierAlgebra finish(const TripleEnvelope& T, MultiplierKind kind, std::vector<CMatrix> elements,
                         const Tolerances& tol) {
  MultiplierAlgebra M;
  M.kind = kind;
  M.element_basis = std::move(elements);
  const bool right = is_right(kind);
  for (const auto& a : M.element_basis) M.action_basis.push_back(multiplier_action(T, a, right, tol));
  const Eigen::Index n = right ? T.Lsize : T.K;
  M.unit_included = !M.element_basis.empty() &&
                    span_membership(M.element_basis, CMatrix::Identity(n, n), tol).member;
  return M;
}

// Elements a of the corner algebra with a·J(X) ⊂ J(X) (left) or J(X)·a ⊂ J(X).
std::vector<CMatrix> solve_multipliers(const TripleEnvelope& T, bool right, const Tolerances& tol) {
  const StarAlgebra& C = right ? T.F : T.E;
  const CMatrix Q = column_span(stack_vec(T.J), tol.rank_eps);
  const Eigen::Index block = T.K * T.Lsize;
  const auto d = static_cast<Eigen::Index>(T.J.size());
  CMatrix sys(block * d, static_cast<Eigen::Index>(C.dim()));
  for (std::size_t s = 0; s < C.dim(); ++s)
    for (Eigen::Index k = 0; k < d; ++k) {
      const CMatrix& j = T.J[static_cast<std::size_t>(k)];
      CVector v = vec(right ? CMatrix(j * C.spanning_basis[s]) : CMatrix(C.spanning_basis[s] * j));
      v -= Q * (Q.adjoint() * v);
      sys.col(static_cast<Eigen::Index>(s)).segment(k * block, block) = v;
    }
  const CMatrix null = null_space(sys, tol.rank_eps);
  std::vector<CMatrix> out;
  for (Eigen::Index c = 0; c < null.cols(); ++c) {
    CMatrix a = CMatrix::Zero(C.ambient, C.ambient);
    for (std::size_t s = 0; s < C.dim(); ++s) a += null(static_cast<Eigen::Index>(s), c) * C.spanning_basis[s];
    out.push_back(std::move(a));
  }
  return out;
}

// S ∩ S* for a subspace S given by a trace-orthonormal basis.
std::vector<CMatrix> star_part(const std::vector<CMatrix>& S, const Tolerances& tol) {
  if (S.empty()) return {};
  std::vector<CMatrix> adj;
  for (const auto& a : S) adj.push_back(a.adjoint());
  const CMatrix A = stack_vec(S), B = stack_vec(adj);
  CMatrix sys(A.rows(), A.cols() + B.cols());
  sys << A, -B;
  const CMatrix null = null_space(sys, tol.rank_eps);
  const CMatrix coeffs = null.topRows(A.cols());
  const CMatrix span = column_span(A * coeffs, tol.rank_eps);
  std::vector<CMatrix> out;
  for (Eigen::Index c = 0; c < span.cols(); ++c) out.push_back(unvec(span.col(c), S.front().rows(), S.front().cols()));
  return out;
}

}  // namespace

const char* to_string(MultiplierKind k) {
  switch (k) {
    case MultiplierKind::left: return "left";
    case MultiplierKind::right: return "right";
    case MultiplierKind::adjointable_left: return "adjointable_left";
    case MultiplierKind::adjointable_right: return "adjointable_right";
    case MultiplierKind::imprimitivity_left: return "imprimitivity_left";
  }
  return "unknown";
}

CMatrix multiplier_action(const TripleEnvelope& T, const CMatrix& a, bool right, const Tolerances& tol) {
  const auto d = static_cast<Eigen::Index>(T.J.size());
  CMatrix out(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const CMatrix& j = T.J[static_cast<std::size_t>(k)];
    const auto r = span_membership(T.J, right ? CMatrix(j * a) : CMatrix(a * j), tol);
    if (!r.member) throw NotAMultiplier("element does not map J(X) into itself");
    out.col(k) = r.coefficients;
  }
  return out;
}

MultiplierAlgebra left_multipliers(const TripleEnvelope& T, const Tolerances& tol) {
  auto basis = solve_multipliers(T, false, tol);
  check_closure(basis, "left multipliers", false, tol);
  return finish(T, MultiplierKind::left, std::move(basis), tol);
}

MultiplierAlgebra right_multipliers(const TripleEnvelope& T, const Tolerances& tol) {
  auto basis = solve_multipliers(T, true, tol);
  check_closure(basis, "right multipliers", false, tol);
  return finish(T, MultiplierKind::right, std::move(basis), tol);
}

MultiplierAlgebra adjointable_left(const TripleEnvelope& T, const Tolerances& tol) {
  auto basis = star_part(solve_multipliers(T, false, tol), tol);
  check_closure(basis, "adjointable left multipliers", true, tol);
  return finish(T, MultiplierKind::adjointable_left, std::move(basis), tol);
}

MultiplierAlgebra adjointable_right(const TripleEnvelope& T, const Tolerances& tol) {
  auto basis = star_part(solve_multipliers(T, true, tol), tol);
  check_closure(basis, "adjointable right multipliers", true, tol);
  return finish(T, MultiplierKind::adjointable_right, std::move(basis), tol);
}

MultiplierAlgebra imprimitivity_left(const TripleEnvelope& T, const Tolerances& tol) {
  MultiplierAlgebra M = left_multipliers(T, tol);
  M.kind = MultiplierKind::imprimitivity_left;
  return M;
}

CMatrix realize(const MultiplierAlgebra& M, const CMatrix& op, const Tolerances& tol) {
  if (M.dim() == 0) throw NotAMultiplier("multiplier algebra is empty");
  if (op.rows() != M.action_basis.front().rows() || op.cols() != op.rows())
    throw InvalidInput("realize: operator has the wrong shape");
  const auto r = span_membership(M.action_basis, op, tol);
  if (!r.member) throw NotAMultiplier("operator is not in the action of the multiplier algebra");
  CMatrix a = CMatrix::Zero(M.element_basis.front().rows(), M.element_basis.front().cols());
  for (std::size_t s = 0; s < M.dim(); ++s) a += r.coefficients(static_cast<Eigen::Index>(s)) * M.element_basis[s];
  return a;
}

double cb_norm_lower(const OperatorSpace& X, const CMatrix& op, const CbSearchOptions& opts) {
  const auto d = static_cast<Eigen::Index>(X.dim());
  if (op.rows() != d || op.cols() != d) throw InvalidInput("cb_norm_lower: operator has the wrong shape");
  if (op.norm() == 0.0) return 0.0;
  std::vector<CMatrix> images;
  for (Eigen::Index k = 0; k < d; ++k) images.push_back(X.element(op.col(k)));
  LevelSearch search;
  search.level_cap = opts.level_cap.value_or(smith_level(X.basis()));
  search.restarts = opts.restarts;
  search.seed = derive_seed(opts.seed, 0xCB);
  search.hints = [d](std::size_t n) {
    std::vector<CVector> h;
    if (n == 1)
      for (Eigen::Index k = 0; k < d; ++k) h.push_back(CVector::Unit(d, k));
    return h;
  };
  return extreme_ratio(split_blocks(images), split_blocks(X.basis()), X.dim(), RatioSense::maximize, search).ratio;
}

std::optional<RankOneBound> rank_one_cb_bound(const OperatorSpace& X, const CMatrix& op, const Tolerances& tol) {
  const auto d = static_cast<Eigen::Index>(X.dim());
  if (op.rows() != d || op.cols() != d) throw InvalidInput("rank_one_cb_bound: operator has the wrong shape");
  RankOneBound out;
  Eigen::JacobiSVD<CMatrix> svd(op, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector s = svd.singularValues();
  if (s(0) == 0.0) return out;
  if (d > 1 && s(1) > tol.rank_eps * s(0)) return std::nullopt;
  const CVector v = s(0) * svd.matrixU().col(0);
  const CVector w = svd.matrixV().col(0);  // f(x) = w* x and f(w) = 1
  out.v_norm = operator_norm(X.element(v));
  const CMatrix x0 = X.element(w);
  if (d == 1) {
    out.min_norm_upper = out.min_norm_lower = operator_norm(x0);
    out.cb_upper = out.v_norm / out.min_norm_lower;
    return out;
  }
  const CMatrix N = svd.matrixV().rightCols(d - 1);
  std::vector<CMatrix> dirs;
  for (Eigen::Index j = 0; j < N.cols(); ++j) dirs.push_back(X.element(N.col(j)));
  const CMatrix Dm = stack_vec(dirs);
  auto at = [&](const CVector& y) {
    CMatrix m = x0;
    for (Eigen::Index j = 0; j < y.size(); ++j) m += y(j) * dirs[static_cast<std::size_t>(j)];
    return m;
  };

  // Smoothed minimization of ‖x0 + Σ y_j dir_j‖ (convex in y).
  CVector y = CVector::Zero(d - 1);
  std::vector<CMatrix> g;
  for (double p : kConvexStages) {
    double t = 1.0;
    double val = schatten_parts({at(y)}, p, nullptr, &g);
    for (int it = 0; it < 400; ++it) {
      const CVector grad = Dm.adjoint() * vec(g[0]);
      const double gn = grad.norm();
      if (!(gn > 1e-15)) break;
      bool moved = false;
      for (int half = 0; half < 40; ++half, t *= 0.5) {
        const CVector trial = y - t * grad;
        std::vector<CMatrix> gt;
        const double vt = schatten_parts({at(trial)}, p, nullptr, &gt);
        if (vt < val) {
          moved = val - vt > 1e-15 * (1.0 + std::abs(val));
          y = trial;
          val = vt;
          g = std::move(gt);
          break;
        }
      }
      if (!moved) break;
      t = std::min(1e3, 2.0 * t);
    }
  }
  out.min_norm_upper = operator_norm(at(y));
  // Dual certificate: the smoothed subgradient, projected onto the annihilator
  // of the feasible directions, bounds the minimum from below.
  const CMatrix Q = column_span(Dm, tol.rank_eps);
  CVector W = vec(g[0]);
  W -= Q * (Q.adjoint() * W);
  const CMatrix Wm = unvec(W, x0.rows(), x0.cols());
  const double trace_norm = Eigen::JacobiSVD<CMatrix>(Wm).singularValues().sum();
  out.min_norm_lower = trace_norm > 0.0 ? std::abs(trace_inner(Wm, x0)) / trace_norm : 0.0;
  if (out.min_norm_lower > out.min_norm_upper * (1.0 + 1e-9))
    throw InconsistentNumerics("rank-one certificate exceeds the attained value");
  out.cb_upper = out.min_norm_lower > 0.0 ? out.v_norm / out.min_norm_lower : std::numeric_limits<double>::infinity();
  return out;
}

MultiplierNormResult multiplier_norm(const TripleEnvelope& T, const MultiplierAlgebra& M, const CMatrix& op,
                                     const Tolerances& tol, const CbSearchOptions& opts) {
  MultiplierNormResult out;
  out.realizing_element = realize(M, op, tol);
  out.multiplier_norm = operator_norm(out.realizing_element);
  out.cb_norm_lower = cb_norm_lower(T.source, op, opts);
  out.cb_norm_upper = out.multiplier_norm;
  if (const auto r1 = rank_one_cb_bound(T.source, op, tol)) {
    out.rank_one_certificate = true;
    out.cb_norm_upper = std::min(out.cb_norm_upper, r1->cb_upper);
  }
  if (out.cb_norm_lower > out.cb_norm_upper + tol.norm_eps * std::max(1.0, out.cb_norm_upper))
    throw InconsistentNumerics("cb norm lower bound exceeds the upper bound");
  return out;
}

LobResult lob_verify(const TripleEnvelope& T, const MultiplierAlgebra& Ml, const CMatrix& op, double M_bound,
                     std::size_t sample_count, std::uint64_t seed, const Tolerances& tol) {
  if (Ml.right_side()) throw InvalidInput("lob_verify expects a left multiplier algebra");
  const CMatrix a = realize(Ml, op, tol);
  const CMatrix aa = a.adjoint() * a;
  const std::size_t d = T.J.size();
  Rng rng(derive_seed(seed, 0x10B));
  LobResult out;
  for (std::size_t s = 0; s < sample_count; ++s) {
    const std::size_t k = 1 + s % d;
    std::vector<CVector> tuple;
    CMatrix C(T.K, static_cast<Eigen::Index>(k) * T.Lsize);
    for (std::size_t i = 0; i < k; ++i) {
      tuple.push_back(rng.cvector(static_cast<Eigen::Index>(d)));
      C.middleCols(static_cast<Eigen::Index>(i) * T.Lsize, T.Lsize) = T.J_of(tuple.back());
    }
    const CMatrix G = C.adjoint() * C;
    CMatrix H = M_bound * M_bound * G - C.adjoint() * aa * C;
    H = (0.5 * (H + H.adjoint())).eval();
    const double scale = std::max(1.0, M_bound * M_bound * operator_norm(G));
    const double lam = Eigen::SelfAdjointEigenSolver<CMatrix>(H, Eigen::EigenvaluesOnly).eigenvalues()(0) / scale;
    ++out.samples_checked;
    out.worst = std::min(out.worst, lam);
    if (lam < -tol.norm_eps) {
      out.passed = false;
      out.witness = std::move(tuple);
      break;
    }
  }
  return out;
}

PolarDecomposition polar_decompose(const MultiplierAlgebra& Al, const CMatrix& t, const Tolerances& tol) {
  if (Al.kind != MultiplierKind::adjointable_left && Al.kind != MultiplierKind::adjointable_right)
    throw InvalidInput("polar_decompose expects an adjointable multiplier algebra");
  if (!span_membership(Al.element_basis, t, tol).member) throw InvalidInput("polar_decompose: element is not in the algebra");
  Eigen::JacobiSVD<CMatrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector s = svd.singularValues();
  const double cut = tol.rank_eps * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  PolarDecomposition out;
  const CMatrix U = svd.matrixU().leftCols(r), W = svd.matrixV().leftCols(r);
  out.V = U * W.adjoint();
  out.absT = W * s.head(r).asDiagonal() * W.adjoint();
  const Tolerances loose{std::max(tol.rank_eps, 1e-8), tol.norm_eps, tol.gap_eps};
  const double scale = std::max(1.0, t.norm());
  if ((out.V * out.absT - t).norm() > 1e-8 * scale ||
      (out.V.adjoint() * out.V - W * W.adjoint()).norm() > 1e-8 ||
      !span_membership(Al.element_basis, out.V, loose).member ||
      !span_membership(Al.element_basis, out.absT, loose).member)
    throw InconsistentNumerics("polar decomposition left the algebra or failed to reconstruct");
  return out;
}

namespace {

void check_unital_algebra(const UnitalAlgebra& U, const char* name, const Tolerances& tol) {
  const OperatorSpace& X = U.space;
  if (static_cast<std::size_t>(U.unit.size()) != X.dim()) throw InvalidInput(std::string(name) + ": unit has the wrong length");
  if (X.rows() != X.cols()) throw InvalidInput(std::string(name) + ": an operator algebra must consist of square matrices");
  const CMatrix e = X.element(U.unit);
  const Tolerances loose{std::max(tol.rank_eps, 1e-8), tol.norm_eps, tol.gap_eps};
  for (const auto& a : X.basis()) {
    const double s = std::max(1.0, a.norm());
    if ((e * a - a).norm() > 1e-8 * s || (a * e - a).norm() > 1e-8 * s)
      throw InvalidInput(std::string(name) + ": supplied unit does not act as an identity");
    for (const auto& b : X.basis())
      if (!span_membership(X.basis(), a * b, loose).member)
        throw InvalidInput(std::string(name) + ": span is not closed under products");
  }
}

}  // namespace

BanachStoneResult banach_stone(const UnitalAlgebra& A, const UnitalAlgebra& B, const CMatrix& tmap,
                               const Tolerances& tol, const CbSearchOptions& opts) {
  check_unital_algebra(A, "A", tol);
  check_unital_algebra(B, "B", tol);
  const auto dA = static_cast<Eigen::Index>(A.space.dim()), dB = static_cast<Eigen::Index>(B.space.dim());
  if (tmap.rows() != dB || tmap.cols() != dA || dA != dB) throw InvalidInput("banach_stone: map must be a square coefficient matrix");
  Eigen::FullPivLU<CMatrix> lu(tmap);
  if (!lu.isInvertible()) throw InvalidInput("banach_stone: map is not bijective");
  const CMatrix tinv = lu.inverse();

  std::vector<CMatrix> fwd, back;
  for (Eigen::Index k = 0; k < dA; ++k) fwd.push_back(B.space.element(tmap.col(k)));
  for (Eigen::Index k = 0; k < dB; ++k) back.push_back(A.space.element(tinv.col(k)));
  const auto capA = opts.level_cap.value_or(smith_level(A.space.basis()));
  const auto capB = opts.level_cap.value_or(smith_level(B.space.basis()));
  if (!complete_isometry_defect(A.space, fwd, capA, derive_seed(opts.seed, 0xB5, 1), tol, opts.restarts).is_complete_isometry ||
      !complete_isometry_defect(B.space, back, capB, derive_seed(opts.seed, 0xB5, 2), tol, opts.restarts).is_complete_isometry)
    throw NotIsometric("banach_stone: map is not a complete isometry");

  EnvelopeOptions eo;
  eo.seed = opts.seed;
  eo.restarts = opts.restarts;
  eo.level_cap = opts.level_cap;
  const TripleEnvelope TB = triple_envelope(B.space, tol, eo);
  if (TB.K != TB.Lsize) throw StructureViolation("banach_stone: envelope of B is not square");
  const CMatrix I = CMatrix::Identity(TB.K, TB.K);
  const CMatrix w = TB.J_of(B.unit);
  if (operator_norm(w.adjoint() * w - I) > tol.norm_eps || operator_norm(w * w.adjoint() - I) > tol.norm_eps)
    throw StructureViolation("banach_stone: unit of B is not unitary in its envelope");
  const CVector u_coords = tmap * A.unit;
  const CMatrix ut = TB.J_of(u_coords) * w.adjoint();
  BanachStoneResult out;
  out.unitary_defect = std::max(operator_norm(ut.adjoint() * ut - I), operator_norm(ut * ut.adjoint() - I));
  if (out.unitary_defect > tol.norm_eps)
    throw StructureViolation("banach_stone: T(1) is not unitary; the range is not an operator algebra image");

  out.pi = CMatrix(dB, dA);
  try {
    for (Eigen::Index k = 0; k < dA; ++k) out.pi.col(k) = TB.J_coordinates(ut.adjoint() * TB.J_of(tmap.col(k)), tol);
    out.u_statement = B.space.element(TB.J_coordinates(ut.adjoint() * w, tol));
  } catch (const InvalidInput&) {
    throw StructureViolation("banach_stone: u⁻¹·T(a) left the range of B");
  }
  out.u = B.space.element(u_coords);

  for (Eigen::Index k = 0; k < dA; ++k)
    out.factorization_residual =
        std::max(out.factorization_residual,
                 operator_norm(fwd[static_cast<std::size_t>(k)] - out.u * B.space.element(out.pi.col(k))));
  for (Eigen::Index i = 0; i < dA; ++i)
    for (Eigen::Index j = 0; j < dA; ++j) {
      const CVector c = A.space.coordinates(A.space.basis()[static_cast<std::size_t>(i)] *
                                            A.space.basis()[static_cast<std::size_t>(j)]);
      const CMatrix lhs = B.space.element(out.pi * c);
      const CMatrix rhs = B.space.element(out.pi.col(i)) * B.space.element(out.pi.col(j));
      out.homomorphism_residual = std::max(out.homomorphism_residual, operator_norm(lhs - rhs));
    }
  out.homomorphism_residual = std::max(
      out.homomorphism_residual, operator_norm(B.space.element(out.pi * A.unit) - B.space.element(B.unit)));
  return out;
}

}  // namespace ncshilov
