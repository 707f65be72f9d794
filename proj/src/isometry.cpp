#include "ncshilov/isometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ncshilov {

namespace {

constexpr double kStages[] = {8.0, 64.0, 512.0, 4096.0, 1e6};

}  // namespace

LinearPart amplify(const std::vector<CMatrix>& images, std::size_t n) {
  LinearPart part;
  const auto d = static_cast<Eigen::Index>(images.size());
  const auto nn = static_cast<Eigen::Index>(n);
  const Eigen::Index R = d ? images.front().rows() : 0, C = d ? images.front().cols() : 0;
  part.rows = nn * R;
  part.cols = nn * C;
  part.phi = CMatrix::Zero(part.rows * part.cols, nn * nn * d);
  for (Eigen::Index i = 0; i < nn; ++i)
    for (Eigen::Index j = 0; j < nn; ++j)
      for (Eigen::Index k = 0; k < d; ++k) {
        const CMatrix& b = images[static_cast<std::size_t>(k)];
        const Eigen::Index col = (i * nn + j) * d + k;
        for (Eigen::Index c = 0; c < C; ++c) part.phi.col(col).segment((j * C + c) * part.rows + i * R, R) = b.col(c);
      }
  return part;
}

NormMap amplify(const std::vector<std::vector<CMatrix>>& parts, std::size_t n) {
  NormMap m;
  for (const auto& p : parts) m.push_back(amplify(p, n));
  return m;
}

double map_norm(const NormMap& m, const CVector& z) {
  double best = 0.0;
  for (const auto& p : m) best = std::max(best, operator_norm(unvec(p.phi * z, p.rows, p.cols)));
  return best;
}

double schatten_parts(const std::vector<CMatrix>& mats, double p, double* exact, std::vector<CMatrix>* g) {
  struct Spec {
    RVector sigma;
    CMatrix vectors;
    bool left;  // eigenvectors of M M* (else of M* M)
  };
  std::vector<Spec> specs;
  specs.reserve(mats.size());
  double top = 0.0;
  for (const auto& m : mats) {
    Spec s;
    s.left = m.rows() <= m.cols();
    const CMatrix h = s.left ? CMatrix(m * m.adjoint()) : CMatrix(m.adjoint() * m);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    s.sigma = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    if (g) s.vectors = es.eigenvectors();
    if (s.sigma.size()) top = std::max(top, s.sigma.maxCoeff());
    specs.push_back(std::move(s));
  }
  if (exact) *exact = top;
  if (g) {
    g->clear();
    for (const auto& m : mats) g->push_back(CMatrix::Zero(m.rows(), m.cols()));
  }
  if (top == 0.0) return -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (const auto& s : specs)
    for (Eigen::Index i = 0; i < s.sigma.size(); ++i) sum += std::pow(s.sigma(i) / top, p);
  if (g) {
    for (std::size_t j = 0; j < mats.size(); ++j) {
      const Spec& s = specs[j];
      RVector c(s.sigma.size());
      for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = std::pow(s.sigma(i) / top, p - 2.0) / (top * top * sum);
      const CMatrix proj = s.vectors * c.asDiagonal() * s.vectors.adjoint();
      (*g)[j] = s.left ? CMatrix(proj * mats[j]) : CMatrix(mats[j] * proj);
    }
  }
  return std::log(top) + std::log(sum) / p;
}

SchattenTerm schatten_term(const NormMap& m, const CVector& z, double p, bool want_grad) {
  std::vector<CMatrix> mats;
  mats.reserve(m.size());
  for (const auto& part : m) mats.push_back(unvec(part.phi * z, part.rows, part.cols));
  SchattenTerm t;
  std::vector<CMatrix> g;
  t.log_value = schatten_parts(mats, p, &t.exact, want_grad ? &g : nullptr);
  if (want_grad) {
    t.grad = CVector::Zero(z.size());
    for (std::size_t j = 0; j < m.size(); ++j) t.grad += m[j].phi.adjoint() * vec(g[j]);
  }
  return t;
}

RatioObjective::RatioObjective(NormMap num, NormMap den, bool minimize)
    : num_(std::move(num)), den_(std::move(den)), minimize_(minimize) {
  if (den_.empty()) throw InvalidInput("ratio objective needs a denominator");
  size_ = den_.front().phi.cols();
  for (const auto& p : num_)
    if (p.phi.cols() != size_) throw InvalidInput("ratio objective: variable size mismatch");
}

double RatioObjective::evaluate(const CVector& z, double p, CVector* grad, double* exact) const {
  const SchattenTerm a = schatten_term(num_, z, p, grad != nullptr);
  const SchattenTerm b = schatten_term(den_, z, p, grad != nullptr);
  const double inf = std::numeric_limits<double>::infinity();
  if (minimize_) {
    if (exact) *exact = a.exact > 0.0 ? b.exact / a.exact : inf;
    if (grad) *grad = b.grad - a.grad;
    return a.exact > 0.0 ? b.log_value - a.log_value : inf;
  }
  if (exact) *exact = b.exact > 0.0 ? a.exact / b.exact : 0.0;
  if (grad) *grad = a.grad - b.grad;
  return a.exact > 0.0 ? a.log_value - b.log_value : -inf;
}

SearchResult maximize(const Objective& f, const std::vector<CVector>& hints, const SearchOptions& opt) {
  SearchResult best;
  const Eigen::Index n = f.size();
  Rng rng(opt.seed);
  const std::size_t total = hints.size() + opt.restarts;
  for (std::size_t start = 0; start < total; ++start) {
    CVector z = start < hints.size() ? hints[start] : rng.cvector(n);
    if (z.size() != n) throw InvalidInput("maximize: hint has the wrong size");
    if (z.norm() == 0.0) continue;
    f.normalize(z);
    auto record = [&](double exact, const CVector& at) {
      ++best.evaluations;
      if (exact > best.value) {
        best.value = exact;
        best.point = at;
        best.start = start;
      }
      return opt.stop_above && exact > *opt.stop_above;
    };
    for (double p : kStages) {
      CVector g;
      double exact = 0.0;
      double val = f.evaluate(z, p, &g, &exact);
      if (record(exact, z)) {
        best.stopped_early = true;
        return best;
      }
      if (std::isinf(val)) break;
      double t = 0.5;
      for (int it = 0; it < opt.iterations; ++it) {
        const double gn = g.norm();
        if (!(gn > 1e-14)) break;
        const CVector d = g / gn;
        bool moved = false;
        for (int half = 0; half < 30; ++half, t *= 0.5) {
          CVector trial = z + t * d;
          f.normalize(trial);
          CVector gt;
          double et = 0.0;
          const double vt = f.evaluate(trial, p, &gt, &et);
          if (record(et, trial)) {
            best.stopped_early = true;
            return best;
          }
          if (vt > val) {
            const double gain = vt - val;
            z = std::move(trial);
            g = std::move(gt);
            val = vt;
            moved = gain > 1e-14 * (1.0 + std::abs(val));
            break;
          }
        }
        if (!moved) break;
        t = std::min(1.0, 2.0 * t);
      }
    }
  }
  return best;
}

RatioSearchResult extreme_ratio(const std::vector<std::vector<CMatrix>>& num,
                                const std::vector<std::vector<CMatrix>>& den, std::size_t dim,
                                RatioSense sense, const LevelSearch& search) {
  if (search.level_cap < 1) throw InvalidInput("level_cap must be at least 1");
  if (dim == 0) throw InvalidInput("extreme_ratio: empty space");
  const bool minimize = sense == RatioSense::minimize;
  RatioSearchResult out;
  out.ratio = minimize ? std::numeric_limits<double>::infinity() : -1.0;
  for (std::size_t n = 1; n <= search.level_cap; ++n) {
    const NormMap D = amplify(den, n);
    RatioObjective f(amplify(num, n), D, minimize);
    SearchOptions opt;
    opt.restarts = search.restarts;
    opt.seed = derive_seed(search.seed, 0x1e7e1, n);
    if (search.decisive) opt.stop_above = minimize ? 1.0 / *search.decisive : *search.decisive;
    const auto hints = search.hints ? search.hints(n) : std::vector<CVector>{};
    const SearchResult r = maximize(f, hints, opt);
    out.levels_checked = n;
    if (r.point.size() == 0) continue;
    const double ratio = minimize ? (std::isinf(r.value) ? 0.0 : 1.0 / r.value) : r.value;
    if (minimize ? ratio < out.ratio : ratio > out.ratio) {
      out.ratio = ratio;
      out.level = n;
      out.witness = LevelElement::from_flat(r.point / map_norm(D, r.point), n, dim);
    }
    if (r.stopped_early) {
      out.decisive = true;
      break;
    }
  }
  return out;
}

double level1_grid_ratio(const std::vector<std::vector<CMatrix>>& num,
                         const std::vector<std::vector<CMatrix>>& den, std::size_t dim,
                         RatioSense sense, int resolution, CVector* argbest) {
  if (dim < 1 || dim > 3) throw InvalidInput("level1_grid_ratio: dimension must be 1, 2 or 3");
  const NormMap N = amplify(num, 1), D = amplify(den, 1);
  const bool minimize = sense == RatioSense::minimize;
  double best = minimize ? std::numeric_limits<double>::infinity() : -1.0;
  const double half_pi = std::acos(0.0), two_pi = 4.0 * half_pi;
  auto consider = [&](const CVector& z) {
    const double d = map_norm(D, z);
    if (d == 0.0) return;
    const double r = map_norm(N, z) / d;
    if (minimize ? r < best : r > best) {
      best = r;
      if (argbest) *argbest = z;
    }
  };
  const int res = std::max(2, resolution);
  CVector z(static_cast<Eigen::Index>(dim));
  if (dim == 1) {
    z(0) = 1.0;
    consider(z);
  } else if (dim == 2) {
    for (int a = 0; a <= res; ++a)
      for (int f = 0; f < res; ++f) {
        const double t = half_pi * a / res, ph = two_pi * f / res;
        z(0) = std::cos(t);
        z(1) = std::sin(t) * std::polar(1.0, ph);
        consider(z);
      }
  } else {
    for (int a = 0; a <= res; ++a)
      for (int b = 0; b <= res; ++b)
        for (int f1 = 0; f1 < res; ++f1)
          for (int f2 = 0; f2 < res; ++f2) {
            const double s = half_pi * a / res, t = half_pi * b / res;
            z(0) = std::cos(s);
            z(1) = std::sin(s) * std::cos(t) * std::polar(1.0, two_pi * f1 / res);
            z(2) = std::sin(s) * std::sin(t) * std::polar(1.0, two_pi * f2 / res);
            consider(z);
          }
  }
  return best;
}

DefectVerdict classify_defect(double defect, const Tolerances& tol) {
  if (defect <= tol.norm_eps) return DefectVerdict::isometric;
  if (defect > 10.0 * tol.norm_eps) return DefectVerdict::not_isometric;
  return DefectVerdict::inconclusive;
}

std::vector<std::vector<CMatrix>> split_blocks(const std::vector<CMatrix>& family) {
  if (family.empty()) return {};
  const Eigen::Index R = family.front().rows(), C = family.front().cols();
  double scale = 0.0;
  for (const auto& m : family) {
    if (m.rows() != R || m.cols() != C) throw InvalidInput("split_blocks: shape mismatch");
    scale = std::max(scale, m.cwiseAbs().maxCoeff());
  }
  // Union-find over rows 0..R-1 and columns R..R+C-1.
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(R + C));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  std::vector<bool> used(static_cast<std::size_t>(R + C), false);
  const double cut = 1e-14 * scale;
  for (Eigen::Index a = 0; a < R; ++a)
    for (Eigen::Index b = 0; b < C; ++b) {
      bool nz = false;
      for (const auto& m : family)
        if (std::abs(m(a, b)) > cut) {
          nz = true;
          break;
        }
      if (!nz) continue;
      used[static_cast<std::size_t>(a)] = used[static_cast<std::size_t>(R + b)] = true;
      parent[static_cast<std::size_t>(find(a))] = find(R + b);
    }
  std::vector<Eigen::Index> roots;
  for (Eigen::Index x = 0; x < R + C; ++x)
    if (used[static_cast<std::size_t>(x)] && std::find(roots.begin(), roots.end(), find(x)) == roots.end())
      roots.push_back(find(x));
  std::vector<std::vector<CMatrix>> parts;
  for (auto root : roots) {
    std::vector<Eigen::Index> rows, cols;
    for (Eigen::Index a = 0; a < R; ++a)
      if (used[static_cast<std::size_t>(a)] && find(a) == root) rows.push_back(a);
    for (Eigen::Index b = 0; b < C; ++b)
      if (used[static_cast<std::size_t>(R + b)] && find(R + b) == root) cols.push_back(b);
    std::vector<CMatrix> part;
    for (const auto& m : family) part.push_back(m(rows, cols));
    parts.push_back(std::move(part));
  }
  return parts;
}

std::size_t smith_level(const std::vector<CMatrix>& family) {
  std::size_t level = 1;
  for (const auto& part : split_blocks(family))
    level = std::max(level, static_cast<std::size_t>(std::max(part.front().rows(), part.front().cols())));
  return level;
}

IsometryReport complete_isometry_defect(const OperatorSpace& X, const std::vector<CMatrix>& images,
                                        std::size_t level_cap, std::uint64_t seed, const Tolerances& tol,
                                        std::size_t restarts) {
  if (level_cap < 1) throw InvalidInput("complete_isometry_defect: level_cap must be at least 1");
  if (images.size() != X.dim()) throw InvalidInput("complete_isometry_defect: one image per basis vector expected");
  for (const auto& m : images) {
    if (m.rows() != images.front().rows() || m.cols() != images.front().cols())
      throw InvalidInput("complete_isometry_defect: images differ in shape");
    require_finite(m, "complete_isometry_defect");
  }
  const auto num = split_blocks(images);
  const auto den = split_blocks(X.basis());
  const std::size_t d = X.dim();

  LevelSearch search;
  search.level_cap = level_cap;
  search.restarts = restarts;
  search.seed = seed;
  search.decisive = 1.0 - 10.0 * tol.norm_eps;
  search.hints = [d](std::size_t n) {
    std::vector<CVector> h;
    if (n == 1)
      for (std::size_t k = 0; k < d; ++k) h.push_back(CVector::Unit(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k)));
    return h;
  };
  const RatioSearchResult r = extreme_ratio(num, den, d, RatioSense::minimize, search);

  IsometryReport rep;
  rep.defect = 1.0 - r.ratio;
  rep.levels_checked = r.levels_checked;
  rep.witness_level = r.level;
  std::optional<LevelElement> witness = r.witness;
  if (d <= 3) {
    CVector arg;
    const double g = level1_grid_ratio(num, den, d, RatioSense::minimize, d == 3 ? 10 : 48, &arg);
    rep.grid_defect = 1.0 - g;
    if (*rep.grid_defect > rep.defect) {
      rep.defect = *rep.grid_defect;
      rep.witness_level = 1;
      witness = LevelElement::from_flat(arg / map_norm(amplify(den, 1), arg), 1, d);
    }
  }
  switch (classify_defect(rep.defect, tol)) {
    case DefectVerdict::isometric:
      rep.is_complete_isometry = true;
      break;
    case DefectVerdict::not_isometric:
      rep.witness = witness;
      break;
    case DefectVerdict::inconclusive:
      throw InconclusiveVerdict("complete isometry test inconclusive: defect " + std::to_string(rep.defect) +
                                " lies between norm_eps and 10·norm_eps");
  }
  return rep;
}

}  // namespace ncshilov
