#include "ncshilov/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ncshilov/gallery.hpp"
#include "ncshilov/minspace.hpp"
#include "ncshilov/oplication.hpp"

namespace ncshilov {

namespace {

std::string sub(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string sub(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

const json& need(const json& obj, const char* key, const std::string& ptr) {
  if (!obj.is_object()) throw SchemaError(ptr.empty() ? "/" : ptr, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(sub(ptr, key), "required field is missing");
  return *it;
}

const json* maybe(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

std::size_t count_from_json(const json& j, const std::string& ptr) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw SchemaError(ptr, "expected a non-negative integer");
  return j.get<std::size_t>();
}

double real_from_json(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw SchemaError(ptr, "expected a number");
  return j.get<double>();
}

bool bool_from_json(const json& j, const std::string& ptr) {
  if (!j.is_boolean()) throw SchemaError(ptr, "expected true or false");
  return j.get<bool>();
}

std::vector<std::vector<CVector>> tensor_from_json(const json& j, std::size_t d1, std::size_t d2, std::size_t d3,
                                                   const std::string& ptr) {
  if (!j.is_array() || j.size() != d1) throw SchemaError(ptr, "expected an array of length " + std::to_string(d1));
  std::vector<std::vector<CVector>> out(d1);
  for (std::size_t a = 0; a < d1; ++a) {
    const auto pa = sub(ptr, a);
    if (!j[a].is_array() || j[a].size() != d2) throw SchemaError(pa, "expected an array of length " + std::to_string(d2));
    for (std::size_t b = 0; b < d2; ++b) {
      CVector v = vector_from_json(j[a][b], sub(pa, b));
      if (static_cast<std::size_t>(v.size()) != d3)
        throw SchemaError(sub(pa, b), "expected a vector of length " + std::to_string(d3));
      out[a].push_back(std::move(v));
    }
  }
  return out;
}

json tensor_to_json(const std::vector<std::vector<CVector>>& m) {
  json out = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& v : row) r.push_back(to_json(v));
    out.push_back(std::move(r));
  }
  return out;
}

json tolerances_json(const Tolerances& t) {
  return {{"rank_eps", t.rank_eps}, {"norm_eps", t.norm_eps}, {"gap_eps", t.gap_eps}};
}

std::string structure_of(const TripleEnvelope& T) {
  std::string s;
  for (std::size_t i = 0; i < T.k.size(); ++i) {
    if (!s.empty()) s += " ⊕ ";
    s += T.k[i] == T.l[i] ? "M_" + std::to_string(T.k[i])
                          : "M_{" + std::to_string(T.k[i]) + "×" + std::to_string(T.l[i]) + "}";
  }
  return s.empty() ? "0" : s;
}

json envelope_json(const TripleEnvelope& T) {
  json blocks = json::array();
  for (std::size_t i = 0; i < T.linking.D.blocks.size(); ++i) {
    const auto& b = T.linking.D.blocks[i];
    blocks.push_back({{"size", b.block_dim}, {"multiplicity", b.multiplicity}, {"k", T.linking.k[i]},
                      {"l", T.linking.l[i]}});
  }
  json kept_sizes = json::array();
  for (std::size_t i = 0; i < T.k.size(); ++i) kept_sizes.push_back(T.k[i] + T.l[i]);
  json out;
  out["space"] = space_to_json(T.source);
  out["linking_algebra"] = {{"ambient", T.linking.L.ambient}, {"dim", T.linking.L.dim()}, {"blocks", blocks}};
  out["shilov_ideal"] = T.shilov_ideal.block_indices;
  out["kept_blocks"] = T.kept;
  out["c_star_boundary"] = {{"ambient", T.K + T.Lsize}, {"dim", T.quotient.dim()}, {"block_sizes", kept_sizes}};
  out["triple_envelope"] = {{"K", T.K}, {"L", T.Lsize}, {"dim", T.dim_T()}, {"structure", structure_of(T)}};
  out["corners"] = {{"E_dim", T.E.dim()}, {"F_dim", T.F.dim()}};
  out["J_defect"] = T.j_report.defect;
  const auto env = env_check(T);
  out["left_env"] = env.left_env;
  out["right_env"] = env.right_env;
  out["warnings"] = T.warnings;
  return out;
}

json algebra_json(const MultiplierAlgebra& M) {
  json basis = json::array(), action = json::array();
  for (const auto& a : M.element_basis) basis.push_back(to_json(a));
  for (const auto& a : M.action_basis) action.push_back(to_json(a));
  return {{"kind", to_string(M.kind)}, {"dim", M.dim()}, {"unit_included", M.unit_included},
          {"basis", basis}, {"action_basis", action}};
}

json level_json(const LevelElement& x) {
  json blocks = json::array();
  for (const auto& b : x.blocks) blocks.push_back(to_json(b));
  return {{"level", x.n}, {"coefficients", blocks}};
}

json cc_json(const CcResult& c) {
  json out{{"verdict", to_string(c.verdict)}, {"ratio", c.ratio}, {"level", c.level}};
  if (c.witness_y) out["witness_y"] = level_json(*c.witness_y);
  if (c.witness_x) out["witness_x"] = level_json(*c.witness_x);
  return out;
}

json certificate_json(const OplicationCertificate& c) {
  json theta = json::array();
  for (const auto& t : c.theta) theta.push_back(to_json(t));
  json out{{"theta", theta},
           {"unital", c.theta_unital},
           {"completely_isometric", c.theta_completely_isometric},
           {"isometry_defect", c.theta_defect},
           {"adjointable_range", c.adjointable_range},
           {"homomorphism_residual", c.homomorphism_residual},
           {"module_residual", c.module_residual}};
  out["homomorphism"] = c.theta_homomorphism ? json(*c.theta_homomorphism) : json(nullptr);
  out["module_action"] = c.module_action ? json(*c.module_action) : json(nullptr);
  out["star_linear"] = c.theta_star_linear ? json(*c.theta_star_linear) : json(nullptr);
  return out;
}

EnvelopeOptions envelope_options(const ProblemFile& p) {
  EnvelopeOptions eo;
  eo.seed = p.seed;
  eo.level_cap = p.level_cap;
  return eo;
}

CMatrix op_from_json(const OperatorSpace& X, const json& j, const std::string& ptr, bool& right) {
  right = false;
  if (const json* s = maybe(j, "side")) {
    if (!s->is_string() || (*s != "left" && *s != "right")) throw SchemaError(sub(ptr, "side"), "expected \"left\" or \"right\"");
    right = *s == "right";
  }
  const auto d = static_cast<Eigen::Index>(X.dim());
  if (const json* c = maybe(j, "coefficients")) {
    CMatrix op = matrix_from_json(*c, sub(ptr, "coefficients"));
    if (op.rows() != d || op.cols() != d) throw SchemaError(sub(ptr, "coefficients"), "expected a dim×dim matrix");
    return op;
  }
  const json& mb = need(j, "multiply_by", ptr);
  const CMatrix c = matrix_from_json(mb, sub(ptr, "multiply_by"));
  CMatrix op(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const CMatrix& b = X.basis()[static_cast<std::size_t>(k)];
    const bool fits = right ? (b.cols() == c.rows() && c.cols() == b.cols()) : (c.cols() == b.rows() && c.rows() == b.rows());
    if (!fits) throw SchemaError(sub(ptr, "multiply_by"), "shape does not compose with the space");
    const CMatrix prod = right ? CMatrix(b * c) : CMatrix(c * b);
    if (!X.contains(prod)) throw SchemaError(sub(ptr, "multiply_by"), "multiplication does not preserve the space");
    op.col(k) = X.coordinates(prod);
  }
  return op;
}

json run_envelope(const ProblemFile& p) {
  const auto X = space_from_json(need(p.payload, "space", "/payload"), "/payload/space");
  return envelope_json(triple_envelope(X, p.tol, envelope_options(p)));
}

json run_multipliers(const ProblemFile& p) {
  const auto X = space_from_json(need(p.payload, "space", "/payload"), "/payload/space");
  const auto T = triple_envelope(X, p.tol, envelope_options(p));
  const auto Ml = left_multipliers(T, p.tol), Mr = right_multipliers(T, p.tol);
  const auto Al = adjointable_left(T, p.tol), Ar = adjointable_right(T, p.tol);
  json out;
  out["envelope"] = envelope_json(T);
  out["left"] = algebra_json(Ml);
  out["right"] = algebra_json(Mr);
  out["adjointable_left"] = algebra_json(Al);
  out["adjointable_right"] = algebra_json(Ar);
  json ops = json::array();
  if (const json* list = maybe(p.payload, "ops")) {
    if (!list->is_array()) throw SchemaError("/payload/ops", "expected an array");
    CbSearchOptions cb{p.seed, 64, p.level_cap};
    for (std::size_t i = 0; i < list->size(); ++i) {
      const auto ptr = sub("/payload/ops", i);
      bool right = false;
      const CMatrix op = op_from_json(X, (*list)[i], ptr, right);
      json entry;
      if (const json* n = maybe((*list)[i], "name")) entry["name"] = *n;
      entry["coefficients"] = to_json(op);
      double upper = std::numeric_limits<double>::infinity();
      bool any = false;
      for (const auto* M : {&Ml, &Mr}) {
        const char* key = M == &Ml ? "left" : "right";
        try {
          const CMatrix a = realize(*M, op, p.tol);
          const double n = operator_norm(a);
          entry[key] = {{"multiplier_norm", n}, {"realizing_element", to_json(a)}};
          upper = std::min(upper, n);
          any = true;
        } catch (const NotAMultiplier&) {
          entry[key] = nullptr;
        }
      }
      if (!any) throw NotAMultiplier(ptr + ": operator is neither a left nor a right multiplier");
      const double lower = cb_norm_lower(X, op, cb);
      const auto r1 = rank_one_cb_bound(X, op, p.tol);
      if (r1) {
        upper = std::min(upper, r1->cb_upper);
        entry["rank_one"] = {{"cb_upper", r1->cb_upper},
                             {"v_norm", r1->v_norm},
                             {"min_norm_lower", r1->min_norm_lower},
                             {"min_norm_upper", r1->min_norm_upper}};
      }
      if (lower > upper + p.tol.norm_eps * std::max(1.0, upper))
        throw InconsistentNumerics(ptr + ": cb norm lower bound exceeds the upper bound");
      entry["cb_norm_lower"] = lower;
      entry["cb_norm_upper"] = upper;
      if (!entry["left"].is_null()) {
        const double gap = entry["left"]["multiplier_norm"].get<double>() - upper;
        entry["left_gap"] = gap;
        entry["left_exceeds_cb"] = gap > 10.0 * p.tol.norm_eps;
      }
      ops.push_back(std::move(entry));
    }
  }
  out["ops"] = ops;
  return out;
}

json run_brs(const ProblemFile& p) {
  const auto A = space_from_json(need(p.payload, "space", "/payload"), "/payload/space");
  const auto d = A.dim();
  std::vector<std::vector<CVector>> m;
  if (const json* t = maybe(p.payload, "product")) m = tensor_from_json(*t, d, d, d, "/payload/product");
  else {
    if (A.rows() != A.cols()) throw SchemaError("/payload/product", "required for non-square spaces");
    try {
      m = product_tensor(A, CMatrix::Identity(A.cols(), A.cols()), p.tol);
    } catch (const InvalidInput& e) {
      throw SchemaError("/payload/space", e.what());
    }
  }
  CVector e;
  if (const json* u = maybe(p.payload, "unit")) {
    e = vector_from_json(*u, "/payload/unit");
    if (static_cast<std::size_t>(e.size()) != d) throw SchemaError("/payload/unit", "expected dim coordinates");
  } else {
    if (A.rows() != A.cols() || !A.contains(CMatrix::Identity(A.rows(), A.cols())))
      throw SchemaError("/payload/unit", "required when the identity is not in the space");
    e = A.coordinates(CMatrix::Identity(A.rows(), A.cols()));
  }
  OplicationOptions oo{p.seed, 32, p.level_cap};
  const auto v = brs_certify(A, m, e, p.tol, oo);
  json out;
  out["space"] = space_to_json(A);
  out["product"] = tensor_to_json(m);
  out["cc"] = cc_json(v.cc);
  out["associativity_residual"] = v.associativity_residual;
  out["associative"] = v.associative;
  out["certified_operator_algebra"] = v.operator_algebra;
  if (v.operator_algebra) out["verdict"] = "certified operator algebra";
  else if (v.cc.verdict != CcVerdict::pass) out["verdict"] = std::string("not certified: cc ") + to_string(v.cc.verdict);
  else out["verdict"] = "not certified: θ is not a completely isometric homomorphism";
  if (v.certificate) out["theta"] = certificate_json(*v.certificate);
  return out;
}

json run_oplication(const ProblemFile& p) {
  const auto Y = space_from_json(need(p.payload, "Y", "/payload"), "/payload/Y");
  const auto X = space_from_json(need(p.payload, "X", "/payload"), "/payload/X");
  bool right = false;
  if (const json* r = maybe(p.payload, "right")) right = bool_from_json(*r, "/payload/right");
  auto make = [&]() -> BilinearAction {
    if (const json* t = maybe(p.payload, "m"))
      return BilinearAction{Y, X, tensor_from_json(*t, Y.dim(), X.dim(), X.dim(), "/payload/m"), std::nullopt,
                            std::nullopt, right};
    try {
      return product_action(Y, X, right, p.tol);
    } catch (const InvalidInput& e) {
      throw SchemaError("/payload/m", std::string("required: ") + e.what());
    }
  };
  BilinearAction a = make();
  if (const json* e = maybe(p.payload, "e")) a.identity = vector_from_json(*e, "/payload/e");
  try {
    a.validate(p.tol);
  } catch (const InvalidInput& e) {
    throw SchemaError("/payload", e.what());
  }
  OplicationOptions oo{p.seed, 32, p.level_cap};
  json out;
  out["Y"] = space_to_json(Y);
  out["X"] = space_to_json(X);
  out["right"] = right;
  const auto cc = verify_cc(a, p.tol, oo);
  out["cc"] = cc_json(cc);
  if (cc.verdict == CcVerdict::pass) {
    const auto T = triple_envelope(X, p.tol, envelope_options(p));
    auto cert = derive_theta(a, T, p.tol, oo);
    out["theta"] = certificate_json(cert);
  } else {
    out["theta"] = nullptr;
  }
  return out;
}

json run_banach_stone(const ProblemFile& p) {
  const auto A = space_from_json(need(p.payload, "A", "/payload"), "/payload/A");
  const auto B = maybe(p.payload, "B") ? space_from_json(p.payload["B"], "/payload/B") : A;
  auto unit_of = [&](const OperatorSpace& S, const char* key) {
    if (const json* u = maybe(p.payload, key)) return vector_from_json(*u, sub("/payload", key));
    if (S.rows() != S.cols() || !S.contains(CMatrix::Identity(S.rows(), S.cols())))
      throw SchemaError(sub("/payload", key), "required when the identity is not in the space");
    return S.coordinates(CMatrix::Identity(S.rows(), S.cols()));
  };
  const UnitalAlgebra UA{A, unit_of(A, "unit_A")}, UB{B, unit_of(B, "unit_B")};
  const CMatrix map = matrix_from_json(need(p.payload, "map", "/payload"), "/payload/map");
  CbSearchOptions cb{p.seed, 64, p.level_cap};
  const auto r = banach_stone(UA, UB, map, p.tol, cb);
  return {{"u", to_json(r.u)},
          {"u_statement", to_json(r.u_statement)},
          {"pi", to_json(r.pi)},
          {"unitary_defect", r.unitary_defect},
          {"factorization_residual", r.factorization_residual},
          {"homomorphism_residual", r.homomorphism_residual},
          {"conventions", {{"proof", "T(a) = u·π(a)"}, {"statement", "T(a) = u_statement⁻¹·π(a)"}}}};
}

BanachSpace banach_from_json(const json& j, const std::string& ptr) {
  BanachSpace B;
  B.dim = count_from_json(need(j, "dim", ptr), sub(ptr, "dim"));
  const json& ball = need(j, "ball", ptr);
  if (ball.is_string()) {
    const auto s = ball.get<std::string>();
    if (s == "l1") B.kind = BallKind::l1;
    else if (s == "linf") B.kind = BallKind::linf;
    else if (s == "l2") B.kind = BallKind::l2;
    else throw SchemaError(sub(ptr, "ball"), "expected \"l1\", \"linf\", \"l2\" or {\"polytope\": [...]}");
  } else {
    const json& verts = need(ball, "polytope", sub(ptr, "ball"));
    if (!verts.is_array() || verts.empty()) throw SchemaError(sub(ptr, "ball/polytope"), "expected a list of vertices");
    B.kind = BallKind::polytope;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      const auto vp = sub(sub(ptr, "ball/polytope"), i);
      CVector v = vector_from_json(verts[i], vp);
      if (static_cast<std::size_t>(v.size()) != B.dim) throw SchemaError(vp, "vertex has the wrong length");
      B.vertices.push_back(std::move(v));
    }
  }
  try {
    B.validate();
  } catch (const InvalidInput& e) {
    throw SchemaError(ptr, e.what());
  }
  return B;
}

json run_min_cross_validate(const ProblemFile& p) {
  const auto B = banach_from_json(need(p.payload, "banach", "/payload"), "/payload/banach");
  std::size_t n = 64;
  if (const json* s = maybe(p.payload, "sample_size")) n = count_from_json(*s, "/payload/sample_size");
  if (n < B.dim) throw SchemaError("/payload/sample_size", "must be at least the dimension");
  const auto R = realize_min(B, n, p.seed, p.tol);
  const auto cv = cross_validate_multipliers(B, R, p.tol, envelope_options(p));
  const auto env = env_banach_check(B, R);
  const auto sep = separation_check(R, p.tol);
  json norms = json::array();
  for (const auto& c : cv.norms)
    norms.push_back({{"op", to_json(c.op)}, {"banach_bound", c.banach}, {"envelope_norm", c.envelope}});
  json out;
  out["banach"] = {{"dim", B.dim}, {"ball", to_string(B.kind)}};
  out["sample_size"] = R.sample.size();
  out["exact"] = cv.exact;
  out["ml_dim"] = cv.ml_dim;
  out["mr_dim"] = cv.mr_dim;
  out["banach_dim"] = cv.banach_dim;
  out["dims_agree"] = cv.dims_agree;
  out["spans_agree"] = cv.spans_agree;
  out["max_norm_gap"] = cv.max_norm_gap;
  out["norms"] = norms;
  out["env"] = {{"env", env.env}, {"min_dual_norm", env.min_dual_norm}};
  out["separation"] = {{"min_section", sep.min_section}, {"distinct_points", sep.distinct_points}};
  out["warnings"] = cv.warnings;
  return out;
}

void human_lines(std::ostringstream& os, const json& j, const std::string& indent) {
  for (const auto& [key, v] : j.items()) {
    if (v.is_object()) {
      os << indent << key << ":\n";
      human_lines(os, v, indent + "  ");
    } else if (v.is_array() && !v.empty() && v[0].is_array()) {
      // Matrices and lists of matrices are summarized by length.
      os << indent << key << ": [" << v.size() << " entries]\n";
    } else if (v.is_array() && !v.empty() && v[0].is_object()) {
      os << indent << key << ":\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        os << indent << "  [" << i << "]\n";
        human_lines(os, v[i], indent + "    ");
      }
    } else {
      os << indent << key << ": " << v.dump() << "\n";
    }
  }
}

}  // namespace

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{"envelope",     "multipliers",  "brs",
                                              "oplication",   "banach_stone", "min_cross_validate"};
  return names;
}

const std::vector<std::string>& gallery_names() {
  static const std::vector<std::string> names{"ex4_4", "ex6_9_n2", "t2", "c2_column", "l1_2", "linf_2"};
  return names;
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const CMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

cplx complex_from_json(const json& j, const std::string& ptr) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw SchemaError(ptr, "expected a number or an [re, im] pair");
}

CVector vector_from_json(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) throw SchemaError(ptr, "expected a non-empty array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], sub(ptr, i));
  return v;
}

CMatrix matrix_from_json(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) throw SchemaError(ptr, "expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw SchemaError(sub(ptr, std::size_t{0}), "expected a non-empty row");
  CMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto rp = sub(ptr, r);
    if (!j[r].is_array()) throw SchemaError(rp, "expected a row array");
    if (j[r].size() != cols)
      throw SchemaError(rp, "ragged row: expected " + std::to_string(cols) + " entries, found " + std::to_string(j[r].size()));
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c], sub(rp, c));
  }
  return m;
}

OperatorSpace space_from_json(const json& j, const std::string& ptr) {
  const json& basis = need(j, "basis", ptr);
  if (!basis.is_array() || basis.empty()) throw SchemaError(sub(ptr, "basis"), "expected a non-empty list of matrices");
  std::vector<CMatrix> mats;
  for (std::size_t i = 0; i < basis.size(); ++i) mats.push_back(matrix_from_json(basis[i], sub(sub(ptr, "basis"), i)));
  Eigen::Index rows = mats[0].rows(), cols = mats[0].cols();
  if (const json* r = maybe(j, "rows")) rows = static_cast<Eigen::Index>(count_from_json(*r, sub(ptr, "rows")));
  if (const json* c = maybe(j, "cols")) cols = static_cast<Eigen::Index>(count_from_json(*c, sub(ptr, "cols")));
  for (std::size_t i = 0; i < mats.size(); ++i)
    if (mats[i].rows() != rows || mats[i].cols() != cols)
      throw SchemaError(sub(sub(ptr, "basis"), i),
                        "expected a " + std::to_string(rows) + "×" + std::to_string(cols) + " matrix");
  std::string label;
  if (const json* l = maybe(j, "label")) {
    if (!l->is_string()) throw SchemaError(sub(ptr, "label"), "expected a string");
    label = l->get<std::string>();
  }
  try {
    return OperatorSpace(rows, cols, std::move(mats), label);
  } catch (const InvalidInput& e) {
    throw SchemaError(sub(ptr, "basis"), e.what());
  }
}

json space_to_json(const OperatorSpace& X) {
  json basis = json::array();
  for (const auto& b : X.basis()) basis.push_back(to_json(b));
  return {{"label", X.label()}, {"rows", X.rows()}, {"cols", X.cols()}, {"dim", X.dim()}, {"basis", basis}};
}

ProblemFile parse_problem(const json& j) {
  if (!j.is_object()) throw SchemaError("/", "expected a problem object");
  ProblemFile p;
  const json& version = need(j, "version", "");
  if (!version.is_string() || version.get<std::string>() != kProblemVersion)
    throw SchemaError("/version", std::string("unsupported version; expected \"") + kProblemVersion + "\"");
  const json& task = need(j, "task", "");
  if (!task.is_string()) throw SchemaError("/task", "expected a string");
  p.task = task.get<std::string>();
  if (std::find(task_names().begin(), task_names().end(), p.task) == task_names().end())
    throw SchemaError("/task", "unknown task \"" + p.task + "\"");
  p.payload = need(j, "payload", "");
  if (!p.payload.is_object()) throw SchemaError("/payload", "expected an object");
  if (const json* t = maybe(j, "tolerances")) {
    if (!t->is_object()) throw SchemaError("/tolerances", "expected an object");
    for (const auto& [key, v] : t->items()) {
      const double x = real_from_json(v, "/tolerances/" + key);
      if (key == "rank_eps") p.tol.rank_eps = x;
      else if (key == "norm_eps") p.tol.norm_eps = x;
      else if (key == "gap_eps") p.tol.gap_eps = x;
      else throw SchemaError("/tolerances/" + key, "unknown tolerance");
    }
  }
  if (const json* s = maybe(j, "seed")) {
    if (!s->is_number_integer() || (!s->is_number_unsigned() && s->get<long long>() < 0))
      throw SchemaError("/seed", "expected a non-negative integer");
    p.seed = s->get<std::uint64_t>();
  }
  if (const json* c = maybe(j, "level_cap")) {
    p.level_cap = count_from_json(*c, "/level_cap");
    if (*p.level_cap < 1) throw SchemaError("/level_cap", "must be at least 1");
  }
  return p;
}

ProblemFile gallery_problem(const std::string& name) {
  ProblemFile p;
  if (name == "ex4_4") {
    p.task = "multipliers";
    p.payload = {{"space", space_to_json(gallery::ex4_4())},
                 {"ops", json::array({{{"name", "left multiplication by e12"},
                                       {"side", "left"},
                                       {"multiply_by", to_json(unit_matrix(3, 3, 0, 1))}}})}};
  } else if (name == "ex6_9_n2") {
    const CMatrix P = gallery::ex6_9_P();
    const CMatrix a = P.inverse() * unit_matrix(2, 2, 0, 0) * P;
    p.task = "multipliers";
    p.payload = {{"space", space_to_json(gallery::ex6_9_n2())},
                 {"ops", json::array({{{"name", "right multiplication by P^-1 diag(1,0) P"},
                                       {"side", "right"},
                                       {"multiply_by", to_json(a)}}})}};
  } else if (name == "t2") {
    p.task = "brs";
    p.payload = {{"space", space_to_json(gallery::t2())}};
  } else if (name == "c2_column") {
    p.task = "multipliers";
    p.payload = {{"space", space_to_json(gallery::c2_column())}};
  } else if (name == "l1_2") {
    p.task = "min_cross_validate";
    p.payload = {{"banach", {{"dim", 2}, {"ball", "l1"}}}, {"sample_size", 64}};
  } else if (name == "linf_2") {
    p.task = "min_cross_validate";
    p.payload = {{"banach", {{"dim", 2}, {"ball", "linf"}}}, {"sample_size", 2}};
  } else {
    std::string known;
    for (const auto& n : gallery_names()) known += (known.empty() ? "" : ", ") + n;
    throw SchemaError("/gallery", "unknown fixture \"" + name + "\"; known: " + known);
  }
  return p;
}

json run(const ProblemFile& p) {
  p.tol.validate();
  json result;
  if (p.task == "envelope") result = run_envelope(p);
  else if (p.task == "multipliers") result = run_multipliers(p);
  else if (p.task == "brs") result = run_brs(p);
  else if (p.task == "oplication") result = run_oplication(p);
  else if (p.task == "banach_stone") result = run_banach_stone(p);
  else if (p.task == "min_cross_validate") result = run_min_cross_validate(p);
  else throw SchemaError("/task", "unknown task \"" + p.task + "\"");
  json report;
  report["tool"] = "ncshilov";
  report["version"] = NCSHILOV_VERSION;
  report["problem_version"] = p.version;
  report["task"] = p.task;
  report["seed"] = p.seed;
  report["tolerances"] = tolerances_json(p.tol);
  report["level_cap"] = p.level_cap ? json(*p.level_cap) : json(nullptr);
  report["result"] = std::move(result);
  return report;
}

std::string human_report(const json& report) {
  std::ostringstream os;
  os << "ncshilov " << report.value("version", "") << "  task=" << report.value("task", "")
     << "  seed=" << report.value("seed", 0) << "\n";
  const json& r = report["result"];
  const json* env = r.contains("envelope") ? &r["envelope"] : (r.contains("triple_envelope") ? &r : nullptr);
  if (env) {
    os << "T(X) ≅ " << (*env)["triple_envelope"]["structure"].get<std::string>()
       << "   shilov_ideal = " << (*env)["shilov_ideal"].dump() << "\n";
  }
  if (r.contains("verdict")) os << "verdict: " << r["verdict"].get<std::string>() << "\n";
  os << "\n";
  human_lines(os, r, "");
  return os.str();
}

}  // namespace ncshilov
