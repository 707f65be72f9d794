#include "ncshilov/minspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ncshilov {

namespace {

cplx phase(double t) { return std::polar(1.0, 2.0 * std::numbers::pi * t); }

// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace

const char* to_string(BallKind k) {
  switch (k) {
    case BallKind::l1: return "l1";
    case BallKind::linf: return "linf";
    case BallKind::l2: return "l2";
    case BallKind::polytope: return "polytope";
  }
  return "unknown";
}

void BanachSpace::validate() const {
  if (dim == 0) throw InvalidInput("Banach space of dimension 0");
  if (kind != BallKind::polytope) return;
  if (vertices.empty()) throw InvalidInput("polytope ball without vertices");
  CMatrix V(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(vertices.size()));
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (static_cast<std::size_t>(vertices[i].size()) != dim) throw InvalidInput("polytope vertex has the wrong length");
    require_finite(vertices[i], "polytope vertex");
    V.col(static_cast<Eigen::Index>(i)) = vertices[i];
  }
  if (column_span(V, 1e-9).cols() != static_cast<Eigen::Index>(dim))
    throw InvalidInput("polytope vertices do not span the space");
}

double BanachSpace::dual_norm(const CVector& psi) const {
  switch (kind) {
    case BallKind::linf: return psi.cwiseAbs().sum();
    case BallKind::l1: return psi.cwiseAbs().maxCoeff();
    case BallKind::l2: return psi.norm();
    case BallKind::polytope: {
      double m = 0.0;
      for (const auto& v : vertices) m = std::max(m, std::abs(psi.cwiseProduct(v).sum()));
      return m;
    }
  }
  return 0.0;
}

double BanachSpace::norm(const CVector& x) const {
  switch (kind) {
    case BallKind::linf: return x.cwiseAbs().maxCoeff();
    case BallKind::l1: return x.cwiseAbs().sum();
    case BallKind::l2: return x.norm();
    case BallKind::polytope: throw NotApplicable("polytope norms are only available through the dual sample");
  }
  return 0.0;
}

std::vector<CVector> BanachSpace::dual_extreme_sample(std::size_t count, std::uint64_t seed) const {
  validate();
  const auto d = static_cast<Eigen::Index>(dim);
  std::vector<CVector> out;
  Rng rng(seed);
  switch (kind) {
    case BallKind::linf:
      for (Eigen::Index i = 0; i < d; ++i) out.push_back(CVector::Unit(d, i));
      break;
    case BallKind::l1:
      // (1, ω_2, …, ω_d): the torus of extreme points of the ℓ∞ dual ball.
      for (std::size_t j = 0; j < count; ++j) {
        CVector psi = CVector::Ones(d);
        if (d == 2) psi(1) = phase(static_cast<double>(j) / static_cast<double>(count));
        else
          for (Eigen::Index i = 1; i < d; ++i) psi(i) = phase(rng.uniform());
        out.push_back(psi);
      }
      break;
    case BallKind::l2:
      for (Eigen::Index i = 0; i < d && out.size() < count; ++i) out.push_back(CVector::Unit(d, i));
      while (out.size() < count) out.push_back(rng.cvector(d).normalized());
      break;
    case BallKind::polytope: {
      // Functionals of modulus one on d independent vertices and at most one elsewhere.
      const auto subs = subsets(vertices.size(), dim);
      const std::size_t per = d == 1 ? 1 : std::max<std::size_t>(1, count / std::max<std::size_t>(1, subs.size()));
      for (const auto& s : subs) {
        CMatrix V(d, d);
        for (Eigen::Index i = 0; i < d; ++i) V.col(i) = vertices[s[static_cast<std::size_t>(i)]];
        Eigen::FullPivLU<CMatrix> lu(V.transpose());
        if (lu.rank() < d) continue;
        for (std::size_t j = 0; j < per; ++j) {
          CVector w = CVector::Ones(d);
          if (d == 2) w(1) = phase(static_cast<double>(j) / static_cast<double>(per));
          else
            for (Eigen::Index i = 1; i < d; ++i) w(i) = phase(rng.uniform());
          const CVector psi = lu.solve(w);
          if (dual_norm(psi) <= 1.0 + 1e-12) out.push_back(psi);
        }
      }
      break;
    }
  }
  return out;
}

MinRealization min_realization(const std::vector<CVector>& functionals, bool exact, const Tolerances& tol) {
  if (functionals.empty()) throw InvalidInput("min_realization: empty sample");
  const auto d = functionals.front().size();
  const auto N = static_cast<Eigen::Index>(functionals.size());
  CMatrix Psi(N, d);
  for (Eigen::Index j = 0; j < N; ++j) {
    if (functionals[static_cast<std::size_t>(j)].size() != d) throw InvalidInput("min_realization: ragged sample");
    Psi.row(j) = functionals[static_cast<std::size_t>(j)].transpose();
  }
  if (column_span(Psi, tol.rank_eps).cols() < d) throw NumericalDegeneracy("min_realization: sample does not separate X");
  std::vector<CMatrix> basis;
  for (Eigen::Index k = 0; k < d; ++k) basis.push_back(Psi.col(k).asDiagonal().toDenseMatrix());
  return MinRealization{OperatorSpace(N, N, basis, "MIN"), functionals, exact};
}

MinRealization realize_min(const BanachSpace& B, std::size_t sample_size, std::uint64_t seed, const Tolerances& tol) {
  B.validate();
  if (sample_size < B.dim) throw InvalidInput("realize_min: sample_size below the dimension");
  for (std::uint64_t attempt = 0; attempt < 8; ++attempt) {
    const auto sample = B.dual_extreme_sample(sample_size, derive_seed(seed, 0x3117, attempt));
    try {
      return min_realization(sample, B.exact_extremes(), tol);
    } catch (const NumericalDegeneracy&) {
      if (B.kind == BallKind::linf) throw;
    }
  }
  throw NumericalDegeneracy("realize_min: no separating sample after 8 attempts");
}

BanachMultiplierCheck banach_multiplier_check(const BanachSpace& B, const MinRealization& R, const CMatrix& op,
                                              const Tolerances& tol) {
  const auto d = static_cast<Eigen::Index>(B.dim);
  if (op.rows() != d || op.cols() != d) throw InvalidInput("banach_multiplier_check: operator has the wrong shape");
  BanachMultiplierCheck out;
  for (const auto& psi : R.sample) {
    const CVector row = op.transpose() * psi;  // ψ∘T as values on e_k
    const cplx lam = psi.dot(row) / psi.squaredNorm();
    out.worst_residual = std::max(out.worst_residual, (row - lam * psi).norm() / psi.norm());
    out.M_bound = std::max(out.M_bound, std::abs(lam));
  }
  out.is_multiplier = out.worst_residual <= tol.norm_eps;
  return out;
}

std::vector<CMatrix> banach_multipliers(const MinRealization& R, const Tolerances& tol) {
  const auto d = static_cast<Eigen::Index>(R.space.dim());
  const auto N = static_cast<Eigen::Index>(R.sample.size());
  // Unknowns: vec(T) then λ_j; equations Tᵀψ_j − λ_j ψ_j = 0.
  CMatrix sys = CMatrix::Zero(N * d, d * d + N);
  for (Eigen::Index j = 0; j < N; ++j) {
    const CVector& psi = R.sample[static_cast<std::size_t>(j)];
    const double s = psi.norm();
    for (Eigen::Index k = 0; k < d; ++k) {
      // (Tᵀψ)_k = Σ_i T(i,k) ψ_i; vec index of T(i,k) is k*d + i.
      for (Eigen::Index i = 0; i < d; ++i) sys(j * d + k, k * d + i) = psi(i) / s;
      sys(j * d + k, d * d + j) = -psi(k) / s;
    }
  }
  const CMatrix null = null_space(sys, tol.rank_eps);
  const CMatrix span = column_span(null.topRows(d * d), tol.rank_eps);
  std::vector<CMatrix> out;
  for (Eigen::Index c = 0; c < span.cols(); ++c) out.push_back(unvec(span.col(c), d, d));
  return out;
}

CrossValidation cross_validate_multipliers(const BanachSpace& B, const MinRealization& R, const Tolerances& tol,
                                           const EnvelopeOptions& opts) {
  if (R.space.dim() != B.dim) throw InvalidInput("cross_validate: realization does not match the space");
  CrossValidation out;
  out.exact = R.exact;
  if (!R.exact)
    out.warnings.push_back("SampledOnlyWarning: realization uses " + std::to_string(R.sample.size()) +
                           " sampled functionals; the comparison bounds the exact multiplier algebra");
  EnvelopeOptions eo = opts;
  eo.generate.max_ambient = std::max(eo.generate.max_ambient, 2 * R.space.rows());
  const TripleEnvelope T = triple_envelope(R.space, tol, eo);
  for (const auto& w : T.warnings) out.warnings.push_back(w);
  const MultiplierAlgebra Ml = left_multipliers(T, tol), Mr = right_multipliers(T, tol);
  const auto banach = banach_multipliers(R, tol);
  out.ml_dim = Ml.dim();
  out.mr_dim = Mr.dim();
  out.banach_dim = banach.size();
  out.dims_agree = out.ml_dim == out.banach_dim && out.mr_dim == out.banach_dim;
  out.spans_agree = out.dims_agree;
  for (const auto& op : banach) {
    NormComparison c{op, banach_multiplier_check(B, R, op, tol).M_bound, 0.0};
    try {
      c.envelope = multiplier_norm(T, Ml, op, tol, CbSearchOptions{eo.seed, 8, 1}).multiplier_norm;
      realize(Mr, op, tol);
    } catch (const NotAMultiplier&) {
      out.spans_agree = false;
      c.envelope = std::numeric_limits<double>::quiet_NaN();
    }
    out.max_norm_gap = std::max(out.max_norm_gap, std::abs(c.banach - c.envelope));
    out.norms.push_back(std::move(c));
  }
  if (std::isnan(out.max_norm_gap)) out.max_norm_gap = std::numeric_limits<double>::infinity();
  return out;
}

EnvBanachCertificate env_banach_check(const BanachSpace& B, const MinRealization& R) {
  EnvBanachCertificate out;
  out.min_dual_norm = std::numeric_limits<double>::infinity();
  for (const auto& psi : R.sample) out.min_dual_norm = std::min(out.min_dual_norm, B.dual_norm(psi));
  out.env = !R.sample.empty() && out.min_dual_norm > 0.0;
  return out;
}

SeparationCheck separation_check(const MinRealization& R, const Tolerances& tol) {
  SeparationCheck out;
  out.min_section = std::numeric_limits<double>::infinity();
  std::vector<CVector> reps;
  for (const auto& psi : R.sample) {
    out.min_section = std::min(out.min_section, psi.squaredNorm());
    const CVector u = psi.normalized();
    bool seen = false;
    for (const auto& r : reps)
      if (std::abs(std::abs(r.dot(u)) - 1.0) <= tol.rank_eps) seen = true;
    if (!seen) reps.push_back(u);
  }
  out.distinct_points = reps.size();
  return out;
}

}  // namespace ncshilov
