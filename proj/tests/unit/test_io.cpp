#include "doctest.h"
#include "padicforms/io.hpp"

using namespace padicforms;

TEST_CASE("forms round-trip through JSON and text") {
  const AdditiveForm f = build_named_form(NamedForm::kH, 6).form;
  const Json j = to_json(f);
  CHECK(j["degree"] == 6);
  CHECK(j["coeffs"][2] == Json::array({0, 1}));
  const AdditiveForm g = form_from_json(j);
  CHECK(g.coeffs == f.coeffs);
  CHECK(read_form(j.dump()).coeffs == f.coeffs);
  CHECK(read_form(format_form_text(f)).coeffs == f.coeffs);
}

TEST_CASE("negative JSON entries reduce modulo 2^K") {
  const AdditiveForm f = read_form(R"({"degree": 6, "precision": 10, "coeffs": [[1, 0], [-1, 0]]})");
  CHECK(f.coeffs[1] == RingElem::from_int(1023, 10));
}

TEST_CASE("malformed JSON forms are parse errors") {
  CHECK_THROWS_AS(read_form("{\"degree\": 6"), ParseError);
  CHECK_THROWS_AS(read_form(R"({"degree": 6, "coeffs": []})"), ParseError);
  CHECK_THROWS_AS(read_form(R"({"degree": 6, "coeffs": [[1]]})"), ParseError);
  CHECK_THROWS_AS(read_form(R"({"coeffs": [[1, 0]]})"), ParseError);
}

TEST_CASE("results serialize deterministically") {
  const AdditiveForm f = read_form(R"({"degree": 6, "precision": 10, "coeffs": [[1, 0], [7, 0]]})");
  const IsotropyResult r = decide_isotropy(f);
  const Json a = to_json(r), b = to_json(decide_isotropy(f));
  CHECK(a.dump() == b.dump());
  CHECK(a["verdict"] == "isotropic");
  CHECK_FALSE(a.contains("timings_ms"));
  CHECK(to_json(r, true).contains("timings_ms"));
  const Json& cert = a["certificate"];
  CHECK(cert["nodes"][cert["root"].get<int>()]["kind"] == "contraction");
  const Witness w = witness_from_json(a["witness"], f.precision);
  CHECK(verify_witness(f, w));
}

TEST_CASE("anisotropy certificates") {
  const IsotropyResult h = decide_isotropy(build_named_form(NamedForm::kH, 6).form);
  const Json j = to_json(h);
  CHECK(j["verdict"] == "anisotropic");
  CHECK(j["anisotropy"]["kind"] == "descent");
  const ExhaustiveDecision ex = decide_isotropy_exhaustive(build_named_form(NamedForm::kG, 6).form);
  REQUIRE(ex.certificate.has_value());
  const Json e = to_json(*ex.certificate);
  CHECK(e["kind"] == "exhaustion");
  CHECK(e["M"] == 3);
  CHECK(e["statesVisited"].get<std::uint64_t>() > 0);
}
