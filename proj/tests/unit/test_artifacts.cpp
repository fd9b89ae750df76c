#include <atomic>
#include <set>

#include "doctest.h"
#include "padicforms/artifacts.hpp"

using namespace padicforms;

namespace {

RingElem elem(std::uint64_t a, std::uint64_t b, int k) { return RingElem(a, b, k); }

}  // namespace

TEST_CASE("H and I coefficients") {
  const BlockForm h = build_named_form(NamedForm::kH, 6);
  REQUIRE(h.form.size() == 9);
  CHECK(h.form.precision == 10);
  const std::vector<RingElem> want{elem(1, 0, 10), elem(1, 0, 10), elem(0, 1, 10),
                                   elem(4, 0, 10), elem(4, 0, 10), elem(0, 4, 10),
                                   elem(16, 0, 10), elem(16, 0, 10), elem(0, 16, 10)};
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(h.form.coeffs[i] == want[i]);

  const BlockForm i6 = build_named_form(NamedForm::kI, 6);
  REQUIRE(i6.form.size() == 18);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(i6.form.coeffs[i] == elem(1, 0, 10));
    CHECK(i6.form.coeffs[3 + i] == elem(0, 2, 10));
    CHECK(i6.form.coeffs[6 + i] == elem(4, 4, 10));
  }
  CHECK(build_named_form(NamedForm::kH, 10).form.size() == 15);
  CHECK(build_named_form(NamedForm::kI, 18).form.size() == 54);
  CHECK_THROWS_AS(build_named_form(NamedForm::kI, 10), DomainError);
  CHECK_THROWS_AS(build_named_form(NamedForm::kH, 6, 6), PrecisionError);
  CHECK(parse_named_form("I") == NamedForm::kI);
  CHECK_THROWS_AS(parse_named_form("J"), ParseError);
}

TEST_CASE("descent on the lower-bound forms") {
  for (int d : {6, 10, 14}) {
    const DescentOutcome h = verify_descent(build_named_form(NamedForm::kH, d));
    CHECK(h.certificate.has_value());
  }
  const DescentOutcome i = verify_descent(build_named_form(NamedForm::kI, 6));
  REQUIRE(i.certificate.has_value());
  std::set<std::pair<std::uint64_t, std::uint64_t>> got;
  for (const auto& v : i.certificate->steps.front().window_values) got.insert({v.a(), v.b()});
  const std::set<std::pair<std::uint64_t, std::uint64_t>> want{{0, 0}, {1, 0}, {2, 0}, {3, 0},
                                                               {0, 2}, {1, 2}, {2, 2}, {3, 2}};
  CHECK(got == want);
  CHECK(verify_descent(build_named_form(NamedForm::kI, 18)).certificate.has_value());
}

TEST_CASE("G has no primitive zero modulo 4") {
  for (int d : {6, 10}) {
    const BlockForm g = build_named_form(NamedForm::kG, d);
    CHECK_FALSE(primitive_zero_mod(g.form, 2, PrimitivityMode::kPrimitive).zero.has_value());
  }
}

TEST_CASE("lemma registry and sweep sizes") {
  CHECK(lemma_registry().size() == 17);
  CHECK(find_lemma("007").default_mode == SweepMode::kExhaustive);
  CHECK(find_lemma("541").default_mode == SweepMode::kSampled);
  CHECK_THROWS_AS(find_lemma("999"), DomainError);
  CHECK(sweep_space_size(find_lemma("007").type) == 170'544);
  CHECK(sweep_space_size(find_lemma("223").type) == 136ULL * 136 * 816);
  CHECK(sweep_space_size(find_lemma("133").type) == 16ULL * 816 * 816);
  CHECK(sweep_space_size(find_lemma("115").type) == 256ULL * 15'504);
  CHECK(sweep_space_size(find_lemma("044").type) == 3876ULL * 3876);
  CHECK(sweep_space_size(find_lemma("025").type) == 136ULL * 15'504);
  CHECK(sweep_space_size(find_lemma("eight").type) == 1'217'566'350ULL);
}

TEST_CASE("sweep configurations are multisets in the canonical labeling") {
  const TypeDescriptor t = find_lemma("007").type;
  const auto first = sweep_configuration(t, 6, 0, 0);
  REQUIRE(first.size() == 7);
  for (const auto& l : first) {
    CHECK(l.coeff.known() == 3);
    CHECK(l.coeff.value() == RingElem::one(10));
  }
  std::set<std::vector<std::pair<std::uint64_t, std::uint64_t>>> seen;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> key;
    for (const auto& l : sweep_configuration(t, 6, 0, i * 85)) {
      CHECK(l.coeff.leading_class() == F4Class::one());
      key.push_back({l.coeff.value().a(), l.coeff.value().b()});
    }
    seen.insert(key);
  }
  CHECK(seen.size() == 2000);
  CHECK_THROWS_AS(sweep_configuration(t, 6, 0, 170'544), DomainError);

  const auto two = sweep_configuration(find_lemma("0061").type, 6, 0, 12345);
  REQUIRE(two.size() == 7);
  CHECK(two.back().coeff.known() == 3);
  CHECK(two.back().coeff.level() == 1);
}

TEST_CASE("the 007 sweep is exhaustive and clean") {
  SweepOptions opts;
  const SweepReport r = sweep_lemma(find_lemma("007"), 6, opts);
  CHECK(r.configurations == 170'544);
  CHECK(r.passed());
  CHECK(r.failures.empty());
}

TEST_CASE("escalation resolves configurations that need a fourth digit") {
  const TypeDescriptor t = find_lemma("0225").type;
  const auto leaves = sweep_configuration(t, 6, 0, 1808);
  CHECK(search_certificate(6, 10, leaves).status == SearchStatus::kNotFound);

  SweepOptions opts;
  opts.mode = SweepMode::kSampled;
  opts.samples = 5000;
  opts.max_extra_digits = 0;
  const SweepReport plain = sweep_lemma(find_lemma("0225"), 6, opts);
  opts.max_extra_digits = 2;
  const SweepReport escalated = sweep_lemma(find_lemma("0225"), 6, opts);
  CHECK(escalated.passed());
  CHECK(escalated.escalated == plain.failure_count);
  if (escalated.escalated > 0) CHECK(escalated.extra_digits >= 1);
}

TEST_CASE("sampled sweeps are deterministic in the seed") {
  SweepOptions opts;
  opts.mode = SweepMode::kSampled;
  opts.samples = 3000;
  const SweepReport a = sweep_lemma(find_lemma("211"), 10, opts);
  opts.threads = 3;
  const SweepReport b = sweep_lemma(find_lemma("211"), 10, opts);
  CHECK(a.passed());
  CHECK(a.failure_count == b.failure_count);
  CHECK(a.samples == 3000);
}

TEST_CASE("random forms and the sampling harness") {
  std::mt19937_64 rng(7);
  const AdditiveForm f = random_form(rng, 10, 40, 14);
  CHECK(f.size() == 40);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(f.level(i) < 10);

  const GammaStats g = gamma_experiment(10, 16, 20, 42);
  CHECK(g.isotropic == 20);
  CHECK(g.witness_failures == 0);
  const GammaStats small = gamma_experiment(6, 3, 40, 1);
  CHECK(small.isotropic + small.anisotropic + small.inconclusive == 40);
  CHECK(small.anisotropic > 0);
  CHECK(small.archived.empty());
  const GammaStats again = gamma_experiment(6, 3, 40, 1);
  CHECK(again.anisotropic == small.anisotropic);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> hits(5000);
  parallel_for(hits.size(), 4, [&](std::uint64_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(1000, 3,
                               [](std::uint64_t i) {
                                 if (i == 517) throw DomainError("boom");
                               }),
                  DomainError);
}
