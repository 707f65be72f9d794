#pragma once

// Dense complex linear algebra substrate shared by every other module.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ncshilov {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Errors.  Every failure raised by the library derives from Error so the CLI
// can map families of failures onto exit codes.

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
  using Error::Error;
};

class NotHermitian : public Error {
public:
  using Error::Error;
};

/// Base for failures that indicate the numerics (not the input) went wrong.
class NumericsAlarm : public Error {
public:
  using Error::Error;
};

class NumericalDegeneracy : public NumericsAlarm {
public:
  using NumericsAlarm::NumericsAlarm;
};

class InconsistentNumerics : public NumericsAlarm {
public:
  using NumericsAlarm::NumericsAlarm;
};

class InconclusiveVerdict : public NumericsAlarm {
public:
  using NumericsAlarm::NumericsAlarm;
};

class ThmViolationAlarm : public NumericsAlarm {
public:
  using NumericsAlarm::NumericsAlarm;
};

class NotAMultiplier : public Error {
public:
  using Error::Error;
};

class NotIsometric : public Error {
public:
  using Error::Error;
};

class StructureViolation : public Error {
public:
  using Error::Error;
};

class NotApplicable : public Error {
public:
  using Error::Error;
};

// ---------------------------------------------------------------------------

/// Thresholds for every numerical verdict in the toolkit.
struct Tolerances {
  double rank_eps = 1e-9;  ///< span / rank decisions
  double norm_eps = 1e-6;  ///< optimization-based verdicts
  double gap_eps = 1e-7;   ///< eigenvalue clustering

  /// Throws InvalidInput unless all are positive and rank_eps < norm_eps.
  void validate() const;
};

/// Checks every entry is finite; throws InvalidInput otherwise.
void require_finite(const CMatrix& m, const char* what);

bool is_finite(const CMatrix& m);

/// Largest singular value.
double operator_norm(const CMatrix& m);

struct HermEig {
  RVector values;   // descending
  CMatrix vectors;  // unitary, columns match values
};

/// Spectral decomposition of a Hermitian matrix, eigenvalues descending.
HermEig herm_eig(const CMatrix& m, const Tolerances& tol = {});

/// Groups consecutive (descending) eigenvalues closer than gap.
/// Returns index ranges [first, last) into the eigenvalue list.
std::vector<std::pair<Eigen::Index, Eigen::Index>> cluster_spectrum(const RVector& values,
                                                                    double gap);

struct SpanMembership {
  bool member = false;
  CVector coefficients;  // empty unless member
  double residual = 0.0;
};

/// Least-squares test of candidate ∈ span(basis).
SpanMembership span_membership(std::span<const CMatrix> basis, const CMatrix& candidate,
                               const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Helpers used across modules.

/// Column-major flattening.
CVector vec(const CMatrix& m);
CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols);

/// Columns are vec(basis[i]).
CMatrix stack_vec(std::span<const CMatrix> basis);

/// Trace inner product <a, b> = tr(a* b).
cplx trace_inner(const CMatrix& a, const CMatrix& b);

CMatrix unit_matrix(Eigen::Index rows, Eigen::Index cols, Eigen::Index i, Eigen::Index j);

/// Orthonormal basis (columns) of the null space of m, singular values below
/// threshold·max(1, σ_max) count as zero.
CMatrix null_space(const CMatrix& m, double threshold);

/// Orthonormal basis (columns) of the column span of m.
CMatrix column_span(const CMatrix& m, double threshold);

/// Unique positive square root of a positive semidefinite Hermitian matrix.
CMatrix psd_sqrt(const CMatrix& m, const Tolerances& tol = {});

/// Incremental modified Gram-Schmidt under the trace inner product.
/// Keeps the original (unnormalized) members that were accepted. A member is
/// rejected when its residual is below rank_eps·max(1, ‖m‖_F), so callers
/// should feed candidates at unit scale.
class SpanBuilder {
public:
  SpanBuilder(Eigen::Index rows, Eigen::Index cols, double rank_eps);

  /// Adds m if it is independent of the current span; returns whether it was.
  bool add(const CMatrix& m);
  /// Distance of m from the current span relative to max(1, ‖m‖_F).
  double relative_residual(const CMatrix& m) const;

  std::size_t size() const { return accepted_.size(); }
  const std::vector<CMatrix>& accepted() const { return accepted_; }
  /// Orthonormal basis (columns are vec of the orthonormalized members).
  const CMatrix& orthonormal() const { return q_; }

private:
  Eigen::Index rows_, cols_;
  double rank_eps_;
  CMatrix q_;
  std::vector<CMatrix> accepted_;
};

/// Seeded Gaussian helpers (determinism across runs on one platform).
class Rng {
public:
  explicit Rng(std::uint64_t seed);
  double normal();
  double uniform();
  cplx cnormal();
  CMatrix cmatrix(Eigen::Index rows, Eigen::Index cols);
  CVector cvector(Eigen::Index n);
  CMatrix unitary(Eigen::Index n);
  CMatrix hermitian(Eigen::Index n);
  std::uint64_t next_u64();

private:
  std::uint64_t state_;
};

/// Stable sub-seed derivation (splitmix64 of a combination).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace ncshilov
