#include <random>

#include "doctest.h"
#include "padicforms/solver.hpp"

using namespace padicforms;

namespace {

AdditiveForm ints(int d, int k, const std::vector<std::int64_t>& cs) {
  std::vector<RingElem> out;
  for (auto c : cs) out.push_back(RingElem::from_int(c, k));
  return AdditiveForm(d, k, out);
}

AdditiveForm random_form(std::mt19937_64& rng, int d, int s, int k, int max_level) {
  std::vector<RingElem> cs;
  for (int i = 0; i < s; ++i) {
    RingElem u(rng(), rng(), k);
    if (!u.is_unit()) u += RingElem::one(k);
    cs.push_back(u.shl(static_cast<int>(rng() % static_cast<std::uint64_t>(max_level))));
  }
  return AdditiveForm(d, k, cs);
}

}  // namespace

TEST_CASE("1 + 7 is isotropic with a Newton-corrected witness") {
  const AdditiveForm f = ints(6, 10, {1, 7});
  const IsotropyResult r = decide_isotropy(f);
  CHECK(r.verdict == Verdict::kIsotropic);
  CHECK(r.stage == Stage::kSearch);
  REQUIRE(r.witness.has_value());
  CHECK(verify_witness(f, *r.witness));
  CHECK(r.witness->target_valuation == 10);
  CHECK(r.witness->assignment[1].is_unit());
}

TEST_CASE("lift_witness on the four-unit form") {
  const AdditiveForm f = ints(6, 12, {1, 1, 1, 1});
  const SearchOutcome so = search_certificate(f);
  REQUIRE(so.status == SearchStatus::kFound);
  const Witness w = lift_witness(f, *so.certificate);
  CHECK(verify_witness(f, w));
  RingElem total = RingElem::zero(12);
  for (std::size_t i = 0; i < 4; ++i) total += f.coeffs[i] * w.assignment[i].pow(6);
  CHECK(total.is_zero());
}

TEST_CASE("witnesses map back through shifts and reductions") {
  // Levels 2 and 8: reduction moves the second, normalization shifts.
  const AdditiveForm f = ints(6, 16, {4, 7 * 256, 4 * 5});
  const IsotropyResult r = decide_isotropy(f);
  REQUIRE(r.verdict == Verdict::kIsotropic);
  CHECK(verify_witness(f, *r.witness));
}

TEST_CASE("verify_witness rejects bad witnesses") {
  const AdditiveForm f = ints(6, 10, {1, 7});
  Witness zero;
  zero.assignment.assign(2, RingElem::zero(10));
  zero.target_valuation = 10;
  CHECK_FALSE(verify_witness(f, zero));

  Witness shallow = *decide_isotropy(f).witness;
  shallow.target_valuation = 2;
  CHECK_FALSE(verify_witness(f, shallow));
}

TEST_CASE("H is anisotropic") {
  std::vector<RingElem> h;
  for (int lvl : {0, 2, 4}) {
    h.push_back(RingElem::power_of_two(lvl, 10));
    h.push_back(RingElem::power_of_two(lvl, 10));
    h.push_back(RingElem::w(10).shl(lvl));
  }
  const IsotropyResult r = decide_isotropy(AdditiveForm(6, 10, h));
  CHECK(r.verdict == Verdict::kAnisotropic);
  CHECK(r.stage == Stage::kDescent);
  REQUIRE(r.anisotropy.has_value());
  CHECK(recheck_anisotropy(r.working_form, *r.anisotropy));
}

TEST_CASE("thresholds") {
  CHECK(isotropy_threshold(6) == 25);
  CHECK(isotropy_threshold(10) == 16);
  CHECK(isotropy_threshold(18) == 73);
}

TEST_CASE("solver agrees with the oracle on small random forms") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 120; ++trial) {
    const int s = 1 + static_cast<int>(rng() % 8);
    const AdditiveForm f = random_form(rng, 6, s, 10, 5);
    const IsotropyResult r = decide_isotropy(f);
    REQUIRE(r.verdict != Verdict::kInconclusive);
    const bool oracle = decide_isotropy_exhaustive(f).isotropic;
    CHECK((r.verdict == Verdict::kIsotropic) == oracle);
    if (r.witness) CHECK(verify_witness(f, *r.witness));
  }
}

TEST_CASE("forms at the upper bounds are isotropic") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const AdditiveForm f6 = random_form(rng, 6, 25, 10, 6);
    const IsotropyResult r6 = decide_isotropy(f6);
    CHECK(r6.verdict == Verdict::kIsotropic);
    CHECK(r6.above_threshold);
    const AdditiveForm f10 = random_form(rng, 10, 16, 14, 10);
    const IsotropyResult r10 = decide_isotropy(f10);
    CHECK(r10.verdict == Verdict::kIsotropic);
    if (r10.witness) CHECK(verify_witness(f10, *r10.witness));
  }
}

TEST_CASE("under-precise coefficients are rejected") {
  CHECK_THROWS_AS(decide_isotropy(AdditiveForm(6, 12, {RingElem::power_of_two(9, 12)})), PrecisionError);
}
