#include "ncshilov/oplication.hpp"

#include <algorithm>
#include <cmath>

namespace ncshilov {

namespace {

// Σ_k u_ik ∘ v_kj over the ratio ‖·‖_n/(‖u‖_n‖v‖_n), u in U and v in V.
class BilinearObjective : public Objective {
public:
  BilinearObjective(const OperatorSpace& U, const OperatorSpace& V, const std::vector<CMatrix>& B, Eigen::Index rows,
                    Eigen::Index cols, std::size_t n)
      : n_(static_cast<Eigen::Index>(n)),
        dU_(static_cast<Eigen::Index>(U.dim())),
        dV_(static_cast<Eigen::Index>(V.dim())),
        rows_(rows),
        cols_(cols),
        umap_(amplify(split_blocks(U.basis()), n)),
        vmap_(amplify(split_blocks(V.basis()), n)),
        B_(B),
        Bvec_(stack_vec(B)) {}

  Eigen::Index size() const override { return n_ * n_ * (dU_ + dV_); }

  void normalize(CVector& z) const override {
    const Eigen::Index nu = n_ * n_ * dU_;
    z.head(nu).normalize();
    z.tail(size() - nu).normalize();
  }

  double evaluate(const CVector& z, double p, CVector* grad, double* exact) const override {
    const Eigen::Index nu = n_ * n_ * dU_, nv = n_ * n_ * dV_;
    const CVector u = z.head(nu), v = z.tail(nv);
    auto uc = [&](Eigen::Index i, Eigen::Index k, Eigen::Index s) { return u((i * n_ + k) * dU_ + s); };
    auto vc = [&](Eigen::Index k, Eigen::Index j, Eigen::Index t) { return v((k * n_ + j) * dV_ + t); };
    CMatrix Z = CMatrix::Zero(n_ * rows_, n_ * cols_);
    for (Eigen::Index i = 0; i < n_; ++i)
      for (Eigen::Index j = 0; j < n_; ++j) {
        CVector w = CVector::Zero(dU_ * dV_);
        for (Eigen::Index k = 0; k < n_; ++k)
          for (Eigen::Index s = 0; s < dU_; ++s)
            for (Eigen::Index t = 0; t < dV_; ++t) w(s * dV_ + t) += uc(i, k, s) * vc(k, j, t);
        Z.block(i * rows_, j * cols_, rows_, cols_) = unvec(Bvec_ * w, rows_, cols_);
      }
    const SchattenTerm tu = schatten_term(umap_, u, p, grad != nullptr);
    const SchattenTerm tv = schatten_term(vmap_, v, p, grad != nullptr);
    std::vector<CMatrix> g;
    double zn = 0.0;
    const double lz = schatten_parts({Z}, p, &zn, grad ? &g : nullptr);
    if (exact) *exact = tu.exact > 0.0 && tv.exact > 0.0 ? zn / (tu.exact * tv.exact) : 0.0;
    if (grad) {
      CVector gu = CVector::Zero(nu), gv = CVector::Zero(nv);
      for (Eigen::Index i = 0; i < n_; ++i)
        for (Eigen::Index j = 0; j < n_; ++j) {
          const CVector c = Bvec_.adjoint() * vec(g[0].block(i * rows_, j * cols_, rows_, cols_));
          for (Eigen::Index k = 0; k < n_; ++k)
            for (Eigen::Index s = 0; s < dU_; ++s)
              for (Eigen::Index t = 0; t < dV_; ++t) {
                const cplx cst = c(s * dV_ + t);
                gu((i * n_ + k) * dU_ + s) += std::conj(vc(k, j, t)) * cst;
                gv((k * n_ + j) * dV_ + t) += std::conj(uc(i, k, s)) * cst;
              }
        }
      grad->resize(size());
      grad->head(nu) = gu - tu.grad;
      grad->tail(nv) = gv - tv.grad;
    }
    if (!(zn > 0.0)) return -std::numeric_limits<double>::infinity();
    return lz - tu.log_value - tv.log_value;
  }

private:
  Eigen::Index n_, dU_, dV_, rows_, cols_;
  NormMap umap_, vmap_;
  std::vector<CMatrix> B_;
  CMatrix Bvec_;
};

CMatrix op_of(const BilinearAction& a, const CVector& y) {
  const auto d = static_cast<Eigen::Index>(a.X.dim());
  CMatrix out(d, d);
  for (Eigen::Index b = 0; b < d; ++b) out.col(b) = a.apply(y, CVector::Unit(d, b));
  return out;
}

CVector basis_vec(std::size_t d, std::size_t i) {
  return CVector::Unit(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(i));
}

std::optional<std::vector<std::vector<CVector>>> concrete_product(const OperatorSpace& Y, const Tolerances& tol) {
  if (Y.rows() != Y.cols()) return std::nullopt;
  std::vector<std::vector<CVector>> out(Y.dim());
  for (std::size_t a = 0; a < Y.dim(); ++a)
    for (std::size_t b = 0; b < Y.dim(); ++b) {
      const auto r = span_membership(Y.basis(), Y.basis()[a] * Y.basis()[b], tol);
      if (!r.member) return std::nullopt;
      out[a].push_back(r.coefficients);
    }
  return out;
}

double rel(const CMatrix& diff, const CMatrix& ref) { return diff.norm() / std::max(1.0, ref.norm()); }

}  // namespace

const char* to_string(CcVerdict v) {
  switch (v) {
    case CcVerdict::pass: return "pass";
    case CcVerdict::fail: return "fail";
    case CcVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

CVector BilinearAction::apply(const CVector& y, const CVector& x) const {
  CVector out = CVector::Zero(static_cast<Eigen::Index>(X.dim()));
  for (std::size_t a = 0; a < m.size(); ++a)
    for (std::size_t b = 0; b < m[a].size(); ++b)
      out += y(static_cast<Eigen::Index>(a)) * x(static_cast<Eigen::Index>(b)) * m[a][b];
  return out;
}

void BilinearAction::validate(const Tolerances& tol) const {
  if (Y.dim() == 0 || X.dim() == 0) throw InvalidInput("bilinear action on an empty space");
  if (m.size() != Y.dim()) throw InvalidInput("action tensor: first index must run over the Y basis");
  for (const auto& row : m) {
    if (row.size() != X.dim()) throw InvalidInput("action tensor: second index must run over the X basis");
    for (const auto& v : row) {
      if (static_cast<std::size_t>(v.size()) != X.dim()) throw InvalidInput("action tensor: values must be X coordinates");
      require_finite(v, "action tensor");
    }
  }
  if (y_product) {
    if (y_product->size() != Y.dim()) throw InvalidInput("Y product tensor has the wrong shape");
    for (const auto& row : *y_product) {
      if (row.size() != Y.dim()) throw InvalidInput("Y product tensor has the wrong shape");
      for (const auto& v : row)
        if (static_cast<std::size_t>(v.size()) != Y.dim()) throw InvalidInput("Y product tensor has the wrong shape");
    }
  }
  if (identity) {
    if (static_cast<std::size_t>(identity->size()) != Y.dim()) throw InvalidInput("identity has the wrong length");
    const auto d = static_cast<Eigen::Index>(X.dim());
    if ((op_of(*this, *identity) - CMatrix::Identity(d, d)).norm() > tol.rank_eps * 1e3)
      throw InvalidInput("identity does not act as the identity");
    if (operator_norm(Y.element(*identity)) > 1.0 + tol.rank_eps * 1e3) throw InvalidInput("identity has norm above 1");
  }
}

BilinearAction product_action(const OperatorSpace& Y, const OperatorSpace& X, bool right, const Tolerances& tol) {
  BilinearAction a{Y, X, {}, std::nullopt, std::nullopt, right};
  for (const auto& y : Y.basis()) {
    std::vector<CVector> row;
    for (const auto& x : X.basis()) {
      const bool scalar = y.rows() == 1 && y.cols() == 1;
      if (!scalar && (right ? (x.cols() != y.rows()) : (y.cols() != x.rows())))
        throw InvalidInput("product_action: shapes do not compose");
      const CMatrix p = scalar ? CMatrix(y(0, 0) * x) : right ? CMatrix(x * y) : CMatrix(y * x);
      const auto r = span_membership(X.basis(), p, tol);
      if (!r.member) throw InvalidInput("product_action: products leave X");
      row.push_back(r.coefficients);
    }
    a.m.push_back(std::move(row));
  }
  if (Y.rows() == Y.cols()) {
    const auto r = span_membership(Y.basis(), CMatrix::Identity(Y.rows(), Y.cols()), tol);
    if (r.member) a.identity = r.coefficients;
  }
  return a;
}

std::vector<std::vector<CVector>> product_tensor(const OperatorSpace& A, const CMatrix& between, const Tolerances& tol) {
  std::vector<std::vector<CVector>> out(A.dim());
  for (std::size_t a = 0; a < A.dim(); ++a)
    for (const auto& b : A.basis()) {
      const auto r = span_membership(A.basis(), A.basis()[a] * between * b, tol);
      if (!r.member) throw InvalidInput("product_tensor: products leave the space");
      out[a].push_back(r.coefficients);
    }
  return out;
}

CcResult verify_cc(const BilinearAction& a, const Tolerances& tol, const OplicationOptions& opts) {
  a.validate(tol);
  const OperatorSpace& U = a.right ? a.X : a.Y;
  const OperatorSpace& V = a.right ? a.Y : a.X;
  std::vector<CMatrix> B;
  for (std::size_t s = 0; s < U.dim(); ++s)
    for (std::size_t t = 0; t < V.dim(); ++t)
      B.push_back(a.right ? a.X.element(a.m[t][s]) : a.X.element(a.m[s][t]));
  const std::size_t cap = opts.level_cap.value_or(std::max(a.X.dim(), a.Y.dim()));
  if (cap < 1) throw InvalidInput("level_cap must be at least 1");
  CcResult out;
  for (std::size_t n = 1; n <= cap; ++n) {
    BilinearObjective f(U, V, B, a.X.rows(), a.X.cols(), n);
    std::vector<CVector> hints;
    if (n == 1)
      for (std::size_t s = 0; s < U.dim(); ++s)
        for (std::size_t t = 0; t < V.dim(); ++t) {
          CVector z(f.size());
          z << basis_vec(U.dim(), s), basis_vec(V.dim(), t);
          hints.push_back(std::move(z));
        }
    SearchOptions so;
    so.restarts = opts.restarts;
    so.seed = derive_seed(opts.seed, 0xCC, n);
    so.stop_above = 1.0 + 10.0 * tol.norm_eps;
    const SearchResult r = maximize(f, hints, so);
    if (r.point.size() && r.value > out.ratio) {
      out.ratio = r.value;
      out.level = n;
      const auto nu = static_cast<Eigen::Index>(n * n * U.dim());
      auto u = LevelElement::from_flat(r.point.head(nu), n, U.dim());
      auto v = LevelElement::from_flat(r.point.tail(r.point.size() - nu), n, V.dim());
      out.witness_y = a.right ? v : u;
      out.witness_x = a.right ? u : v;
    }
    if (r.stopped_early) break;
  }
  const double excess = out.ratio - 1.0;
  if (excess <= tol.norm_eps) {
    out.verdict = CcVerdict::pass;
    out.witness_x.reset();
    out.witness_y.reset();
  } else {
    out.verdict = excess > 10.0 * tol.norm_eps ? CcVerdict::fail : CcVerdict::inconclusive;
  }
  return out;
}

OplicationCertificate derive_theta(const BilinearAction& a, const TripleEnvelope& T, const MultiplierAlgebra& M,
                                   const Tolerances& tol, const OplicationOptions& opts) {
  a.validate(tol);
  if (M.right_side() != a.right) throw InvalidInput("derive_theta: multiplier algebra is on the wrong side");
  OplicationCertificate out;
  const std::size_t dY = a.Y.dim();
  for (std::size_t s = 0; s < dY; ++s) {
    const CMatrix op = op_of(a, basis_vec(dY, s));
    try {
      out.theta.push_back(realize(M, op, tol));
    } catch (const NotAMultiplier&) {
      throw ThmViolationAlarm("derive_theta: y_" + std::to_string(s) + " acts by a non-multiplier");
    }
    out.theta_action.push_back(op);
  }
  const Eigen::Index side = out.theta.front().rows();
  auto theta_of = [&](const CVector& y) {
    CMatrix t = CMatrix::Zero(side, side);
    for (std::size_t s = 0; s < dY; ++s) t += y(static_cast<Eigen::Index>(s)) * out.theta[s];
    return t;
  };
  auto action_of = [&](const CVector& y) { return op_of(a, y); };

  if (a.identity)
    out.theta_unital = (theta_of(*a.identity) - CMatrix::Identity(side, side)).norm() <= tol.norm_eps;

  const auto prod = a.y_product ? a.y_product : concrete_product(a.Y, tol);
  if (prod) {
    for (std::size_t s = 0; s < dY; ++s)
      for (std::size_t t = 0; t < dY; ++t) {
        const CVector& st = (*prod)[s][t];
        const CMatrix tt = out.theta[s] * out.theta[t];
        out.homomorphism_residual = std::max(out.homomorphism_residual, rel(theta_of(st) - tt, tt));
        const CMatrix composed = a.right ? CMatrix(out.theta_action[t] * out.theta_action[s])
                                         : CMatrix(out.theta_action[s] * out.theta_action[t]);
        out.module_residual = std::max(out.module_residual, rel(action_of(st) - composed, composed));
      }
    out.theta_homomorphism = out.homomorphism_residual <= tol.norm_eps;
    out.module_action = out.module_residual <= tol.norm_eps;
    if (*out.theta_homomorphism != *out.module_action)
      throw ThmViolationAlarm("derive_theta: homomorphism and module-action tests disagree");
  }

  const auto rep = complete_isometry_defect(a.Y, out.theta, opts.level_cap.value_or(smith_level(a.Y.basis())),
                                            derive_seed(opts.seed, 0x7E7A), tol, opts.restarts);
  out.theta_completely_isometric = rep.is_complete_isometry;
  out.theta_defect = rep.defect;

  out.adjointable_range = true;
  for (const auto& t : out.theta) {
    try {
      multiplier_action(T, t.adjoint(), a.right, tol);
    } catch (const NotAMultiplier&) {
      out.adjointable_range = false;
    }
  }

  bool star_closed = a.Y.rows() == a.Y.cols();
  std::vector<CVector> adj;
  for (const auto& y : a.Y.basis()) {
    if (!star_closed) break;
    const auto r = span_membership(a.Y.basis(), y.adjoint(), tol);
    if (!r.member) star_closed = false;
    else adj.push_back(r.coefficients);
  }
  if (star_closed) {
    double worst = 0.0;
    for (std::size_t s = 0; s < dY; ++s) worst = std::max(worst, rel(theta_of(adj[s]) - out.theta[s].adjoint(), out.theta[s]));
    out.theta_star_linear = worst <= tol.norm_eps;
  }
  return out;
}

OplicationCertificate derive_theta(const BilinearAction& a, const TripleEnvelope& T, const Tolerances& tol,
                                   const OplicationOptions& opts) {
  return derive_theta(a, T, a.right ? right_multipliers(T, tol) : left_multipliers(T, tol), tol, opts);
}

double associativity_residual(const OperatorSpace& A, const std::vector<std::vector<CVector>>& m) {
  const std::size_t d = A.dim();
  auto mul = [&](const CVector& x, const CVector& y) {
    CVector out = CVector::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        out += x(static_cast<Eigen::Index>(a)) * y(static_cast<Eigen::Index>(b)) * m[a][b];
    return out;
  };
  double worst = 0.0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t c = 0; c < d; ++c) {
        const CVector ea = basis_vec(d, a), eb = basis_vec(d, b), ec = basis_vec(d, c);
        worst = std::max(worst, (mul(ea, mul(eb, ec)) - mul(mul(ea, eb), ec)).norm());
      }
  return worst;
}

BrsVerdict brs_certify(const OperatorSpace& A, const std::vector<std::vector<CVector>>& m, const CVector& e,
                       const Tolerances& tol, const OplicationOptions& opts) {
  BilinearAction act{A, A, m, e, m, false};
  act.validate(tol);
  const auto d = static_cast<Eigen::Index>(A.dim());
  CMatrix right_unit(d, d);
  for (Eigen::Index b = 0; b < d; ++b) right_unit.col(b) = act.apply(CVector::Unit(d, b), e);
  if ((right_unit - CMatrix::Identity(d, d)).norm() > tol.rank_eps * 1e3)
    throw InvalidInput("brs_certify: e is not a right identity");
  BrsVerdict out;
  out.associativity_residual = associativity_residual(A, m);
  out.cc = verify_cc(act, tol, opts);
  if (out.cc.verdict != CcVerdict::pass) return out;
  EnvelopeOptions eo;
  eo.seed = opts.seed;
  const TripleEnvelope T = triple_envelope(A, tol, eo);
  out.certificate = derive_theta(act, T, tol, opts);
  out.associative = out.certificate->theta_homomorphism.value_or(false);
  out.operator_algebra = out.associative && out.certificate->theta_completely_isometric;
  return out;
}

NonassocVerdict nonassoc_brs(const OperatorSpace& A, const OperatorSpace& A_alt,
                             const std::vector<std::vector<CVector>>& m, const CVector& e,
                             NonvanishingCondition condition, const Tolerances& tol, const OplicationOptions& opts) {
  if (A_alt.dim() != A.dim()) throw InvalidInput("nonassoc_brs: the two structures must share a dimension");
  BilinearAction act{A_alt, A, m, e, m, false};
  act.validate(tol);
  const auto d = static_cast<Eigen::Index>(A.dim());
  for (Eigen::Index b = 0; b < d; ++b)
    if ((act.apply(CVector::Unit(d, b), e) - CVector::Unit(d, b)).norm() > tol.rank_eps * 1e3)
      throw InvalidInput("nonassoc_brs: e is not a right identity");
  if (std::abs(operator_norm(A_alt.element(e)) - operator_norm(A.element(e))) > tol.norm_eps)
    throw InvalidInput("nonassoc_brs: the two structures disagree on the norm of e");

  NonassocVerdict out;
  out.condition = condition;
  out.associativity_residual = associativity_residual(A, m);
  EnvelopeOptions eo;
  eo.seed = opts.seed;
  const TripleEnvelope T = triple_envelope(A, tol, eo);
  const MultiplierAlgebra Ml = left_multipliers(T, tol);
  const CMatrix Jg = T.J_of(e);
  switch (condition) {
    case NonvanishingCondition::kernel: {
      std::vector<CMatrix> prods;
      for (const auto& a : Ml.element_basis) prods.push_back(a * Jg);
      const RVector s = Eigen::JacobiSVD<CMatrix>(stack_vec(prods)).singularValues();
      out.condition_margin = s.size() ? s(s.size() - 1) : 0.0;
      if (static_cast<std::size_t>(s.size()) < Ml.dim() || out.condition_margin <= tol.rank_eps * std::max(1.0, s(0)))
        throw NotApplicable("condition (1) fails: some nonzero left multiplier annihilates e");
      break;
    }
    case NonvanishingCondition::strictly_positive: {
      const CMatrix P = Jg * Jg.adjoint();
      out.condition_margin = Eigen::SelfAdjointEigenSolver<CMatrix>(P, Eigen::EigenvaluesOnly).eigenvalues()(0);
      if (out.condition_margin <= tol.norm_eps)
        throw NotApplicable("condition (2) fails: J(e)J(e)* is not strictly positive");
      break;
    }
    case NonvanishingCondition::dense_range: {
      const MultiplierAlgebra Mr = right_multipliers(T, tol);
      std::vector<CMatrix> prods;
      for (const auto& b : Mr.element_basis) prods.push_back(Jg * b);
      const auto rank = prods.empty() ? 0 : column_span(stack_vec(prods), tol.rank_eps).cols();
      out.condition_margin = static_cast<double>(rank) - static_cast<double>(A.dim());
      if (rank < d) throw NotApplicable("condition (3) fails: e·M_r(A) does not span A");
      break;
    }
  }

  out.cc = verify_cc(act, tol, opts);
  if (out.cc.verdict != CcVerdict::pass) {
    out.broken_at = out.cc.verdict == CcVerdict::fail ? "cc" : "cc_inconclusive";
    return out;
  }
  out.certificate = derive_theta(act, T, Ml, tol, opts);
  out.associative = out.certificate->theta_homomorphism.value_or(false);
  out.theta_onto = column_span(stack_vec(out.certificate->theta), tol.rank_eps).cols() ==
                   static_cast<Eigen::Index>(Ml.dim());
  if (!out.associative || out.associativity_residual > tol.norm_eps)
    throw ThmViolationAlarm("nonassoc_brs: hypotheses hold but the product is not associative");
  return out;
}

}  // namespace ncshilov
