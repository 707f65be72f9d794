#pragma once

// Multistart search for extreme norm ratios over matrix levels, and the
// complete-isometry test built on top of it.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "ncshilov/matcore.hpp"
#include "ncshilov/opspace.hpp"

namespace ncshilov {

/// A linear map z ↦ M(z) with vec(M(z)) = phi·z.
struct LinearPart {
  CMatrix phi;
  Eigen::Index rows = 0, cols = 0;
};

/// Several parts acting on the same variable; the norm is the max over parts.
using NormMap = std::vector<LinearPart>;

/// Level-n amplification of x ↦ Σ_k x_k B_k; variable layout ((i*n + j)*d + k).
LinearPart amplify(const std::vector<CMatrix>& images, std::size_t n);
NormMap amplify(const std::vector<std::vector<CMatrix>>& parts, std::size_t n);

double map_norm(const NormMap& m, const CVector& z);

/// Smoothed objective for the optimizer.  evaluate returns the smoothed log
/// value (Schatten-p surrogate) and writes the ascent direction and the exact
/// value (p = ∞) of the quantity being maximized.
class Objective {
public:
  virtual ~Objective() = default;
  virtual Eigen::Index size() const = 0;
  virtual double evaluate(const CVector& z, double p, CVector* grad, double* exact) const = 0;
  virtual void normalize(CVector& z) const { z.normalize(); }
};

/// Accumulates the Schatten-p surrogate of a NormMap and its gradient.
struct SchattenTerm {
  double log_value = 0.0;  // log S_p
  double exact = 0.0;      // σ_max over parts
  CVector grad;            // d log S_p (ascent direction in z)
};
SchattenTerm schatten_term(const NormMap& m, const CVector& z, double p, bool want_grad);
/// Same for a list of explicit matrices M_j, returning per-matrix gradient
/// factors G_j (so d log S_p = Re Σ <G_j, dM_j>).
double schatten_parts(const std::vector<CMatrix>& mats, double p, double* exact,
                      std::vector<CMatrix>* g);

/// ‖num(z)‖/‖den(z)‖, or its inverse when minimizing.
class RatioObjective : public Objective {
public:
  RatioObjective(NormMap num, NormMap den, bool minimize);
  Eigen::Index size() const override { return size_; }
  double evaluate(const CVector& z, double p, CVector* grad, double* exact) const override;

private:
  NormMap num_, den_;
  bool minimize_;
  Eigen::Index size_;
};

struct SearchOptions {
  std::size_t restarts = 64;
  std::uint64_t seed = 0;
  int iterations = 20;  // per continuation stage
  /// Stop as soon as the exact value exceeds this.
  std::optional<double> stop_above;
};

struct SearchResult {
  double value = -std::numeric_limits<double>::infinity();
  CVector point;
  std::size_t start = 0;  // index into hints followed by random starts
  bool stopped_early = false;
  std::size_t evaluations = 0;
};

/// Continuation ascent (p = 8 … 4096) with Armijo backtracking from each
/// hint and from seeded random starts; reduces by (value, start index).
SearchResult maximize(const Objective& f, const std::vector<CVector>& hints, const SearchOptions& opt);

enum class RatioSense { minimize, maximize };

struct LevelSearch {
  std::size_t level_cap = 1;
  std::size_t restarts = 64;
  std::uint64_t seed = 0;
  /// Stop once the ratio passes this value (below it when minimizing).
  std::optional<double> decisive;
  /// Extra starting points per level (flat level layout).
  std::function<std::vector<CVector>(std::size_t level)> hints;
};

struct RatioSearchResult {
  double ratio = 0.0;
  LevelElement witness;
  std::size_t level = 0;
  std::size_t levels_checked = 0;
  bool decisive = false;
};

/// Extreme value of ‖num_n(x)‖/‖den_n(x)‖ over levels 1..cap where both maps
/// are given by basis images (each a list of parts).
RatioSearchResult extreme_ratio(const std::vector<std::vector<CMatrix>>& num,
                                const std::vector<std::vector<CMatrix>>& den, std::size_t dim,
                                RatioSense sense, const LevelSearch& search);

/// Dense level-1 search over the unit sphere of ℂ^d (d ≤ 3), global phase fixed.
double level1_grid_ratio(const std::vector<std::vector<CMatrix>>& num,
                         const std::vector<std::vector<CMatrix>>& den, std::size_t dim,
                         RatioSense sense, int resolution, CVector* argbest = nullptr);

enum class DefectVerdict { isometric, not_isometric, inconclusive };

/// isometric if defect ≤ norm_eps, not isometric if above 10·norm_eps.
DefectVerdict classify_defect(double defect, const Tolerances& tol);

struct IsometryReport {
  bool is_complete_isometry = false;
  double defect = 0.0;  // 1 − min ratio found
  std::optional<LevelElement> witness;
  std::size_t levels_checked = 0;
  std::size_t witness_level = 0;
  std::optional<double> grid_defect;  // level-1 oracle, small dims only
};

/// Splits a family of equally shaped matrices into the blocks of their joint
/// row/column support (a permuted block-diagonal form).  Norms at every level
/// are the max over the returned parts.
std::vector<std::vector<CMatrix>> split_blocks(const std::vector<CMatrix>& family);

/// Level at which a cb norm of a map INTO span(family) is attained: the
/// largest side of any support block (Smith's lemma).
std::size_t smith_level(const std::vector<CMatrix>& family);

/// Tests whether φ: X → M_{r'×c'} (basis k ↦ images[k]) is completely
/// isometric, assuming it is contractive.  level_cap = smith_level(X.basis())
/// already decides the question exactly.  Throws InconclusiveVerdict when the
/// best defect falls strictly between norm_eps and 10·norm_eps.
IsometryReport complete_isometry_defect(const OperatorSpace& X, const std::vector<CMatrix>& images,
                                        std::size_t level_cap, std::uint64_t seed,
                                        const Tolerances& tol = {}, std::size_t restarts = 64);

}  // namespace ncshilov
