#include <doctest.h>

#include "ncshilov/gallery.hpp"
#include "ncshilov/problem.hpp"

using namespace ncshilov;

namespace {

std::string pointer_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const SchemaError& e) {
    return e.pointer();
  }
  return "<no error>";
}

json envelope_problem(json space) {
  return {{"version", "1"}, {"task", "envelope"}, {"payload", {{"space", std::move(space)}}}};
}

}  // namespace

TEST_CASE("complex and matrix parsing") {
  CHECK(complex_from_json(json(2.5), "/x") == cplx(2.5, 0));
  CHECK(complex_from_json(json::array({1, -2}), "/x") == cplx(1, -2));
  CHECK_THROWS_AS(complex_from_json(json("one"), "/x"), SchemaError);
  const CMatrix m = matrix_from_json(json::parse("[[1, [0, 1]], [0, 2]]"), "/m");
  CHECK(m(0, 1) == cplx(0, 1));
  CHECK(m(1, 1) == cplx(2, 0));
  CHECK(pointer_of([] { matrix_from_json(json::parse("[[1, 2], [3]]"), "/m"); }) == "/m/1");
  CHECK(pointer_of([] { matrix_from_json(json::parse("[[1, 2], [3, \"x\"]]"), "/m"); }) == "/m/1/1");

  Rng rng(3);
  const CMatrix r = rng.cmatrix(2, 3);
  CHECK((matrix_from_json(to_json(r), "") - r).norm() == 0.0);
}

TEST_CASE("space parsing") {
  const auto X = gallery::t2();
  const auto Y = space_from_json(space_to_json(X), "/s");
  CHECK(Y.dim() == 3);
  CHECK(Y.label() == "T_2");
  for (std::size_t k = 0; k < 3; ++k) CHECK((Y.basis()[k] - X.basis()[k]).norm() == 0.0);

  const json ragged = json::parse(R"({"basis": [[[1, 0], [0, 1]], [[1, 0], [0]]]})");
  CHECK(pointer_of([&] { space_from_json(ragged, "/payload/space"); }) == "/payload/space/basis/1/1");
  const json shapes = json::parse(R"({"basis": [[[1, 0], [0, 1]], [[1], [0]]]})");
  CHECK(pointer_of([&] { space_from_json(shapes, "/s"); }) == "/s/basis/1");
  const json dependent = json::parse(R"({"basis": [[[1, 0]], [[2, 0]]]})");
  CHECK(pointer_of([&] { space_from_json(dependent, "/s"); }) == "/s/basis");
}

TEST_CASE("problem header parsing") {
  auto p = parse_problem(envelope_problem(space_to_json(gallery::d2())));
  CHECK(p.task == "envelope");
  CHECK(p.seed == 42);
  CHECK_FALSE(p.level_cap.has_value());

  json j = envelope_problem(space_to_json(gallery::d2()));
  j["seed"] = 7;
  j["level_cap"] = 2;
  j["tolerances"] = {{"norm_eps", 1e-5}};
  p = parse_problem(j);
  CHECK(p.seed == 7);
  CHECK(*p.level_cap == 2);
  CHECK(p.tol.norm_eps == 1e-5);

  j["version"] = "2";
  CHECK(pointer_of([&] { parse_problem(j); }) == "/version");
  j["version"] = "1";
  j["task"] = "factor";
  CHECK(pointer_of([&] { parse_problem(j); }) == "/task");
  j["task"] = "envelope";
  j["tolerances"] = {{"wobble", 1.0}};
  CHECK(pointer_of([&] { parse_problem(j); }) == "/tolerances/wobble");
  j.erase("tolerances");
  j.erase("payload");
  CHECK(pointer_of([&] { parse_problem(j); }) == "/payload");
}

TEST_CASE("gallery problems") {
  for (const auto& name : gallery_names()) CHECK_NOTHROW(gallery_problem(name));
  CHECK(pointer_of([] { gallery_problem("nope"); }) == "/gallery");
}

TEST_CASE("envelope report") {
  const auto r = run(parse_problem(envelope_problem(space_to_json(gallery::t2()))));
  CHECK(r["task"] == "envelope");
  CHECK(r["seed"] == 42);
  CHECK(r["tolerances"]["norm_eps"] == 1e-6);
  CHECK(r["result"]["triple_envelope"]["structure"] == "M_2");
  CHECK(r["result"]["shilov_ideal"].empty());
  CHECK(human_report(r).find("T(X) ≅ M_2") != std::string::npos);

  const auto c = run(gallery_problem("c2_column"));
  CHECK(c["result"]["left"]["dim"] == 4);
  CHECK(c["result"]["right"]["dim"] == 1);
}

TEST_CASE("multiplier report on the non-isometric example") {
  const auto r = run(gallery_problem("ex4_4"));
  const auto& op = r["result"]["ops"][0];
  CHECK(op["left"]["multiplier_norm"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(op["cb_norm_upper"].get<double>() == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-6));
  CHECK(op["left_exceeds_cb"] == true);
}

TEST_CASE("brs and oplication reports") {
  const auto b = run(gallery_problem("t2"));
  CHECK(b["result"]["verdict"] == "certified operator algebra");

  ProblemFile p;
  p.task = "oplication";
  p.payload = {{"Y", space_to_json(gallery::m2())}, {"X", space_to_json(gallery::c2_column())}};
  const auto o = run(p);
  CHECK(o["result"]["cc"]["verdict"] == "pass");
  CHECK(o["result"]["theta"]["star_linear"] == true);

  p.task = "banach_stone";
  CMatrix swap = CMatrix::Zero(2, 2);
  swap(0, 1) = swap(1, 0) = 1;
  p.payload = {{"A", space_to_json(gallery::d2())}, {"map", to_json(swap)}};
  const auto s = run(p);
  CHECK(matrix_from_json(s["result"]["pi"], "").isApprox(swap, 1e-8));
}

TEST_CASE("reports are deterministic") {
  CHECK(run(gallery_problem("ex6_9_n2")).dump() == run(gallery_problem("ex6_9_n2")).dump());
}
