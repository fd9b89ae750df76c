#include <algorithm>
#include <random>

#include "doctest.h"
#include "padicforms/forms.hpp"

using namespace padicforms;

namespace {

std::vector<int> levels_of(const AdditiveForm& f) {
  std::vector<int> out;
  for (std::size_t i = 0; i < f.size(); ++i) out.push_back(f.level(i));
  return out;
}

AdditiveForm at_levels(int d, int k, const std::vector<int>& levels) {
  std::vector<RingElem> cs;
  for (int l : levels) cs.push_back(RingElem::power_of_two(l, k));
  return AdditiveForm(d, k, cs);
}

}  // namespace

TEST_CASE("form construction rejects bad input") {
  CHECK_THROWS_AS(AdditiveForm(6, 10, {}), DomainError);
  CHECK_THROWS_AS(AdditiveForm(6, 10, {RingElem::zero(10)}), PrecisionError);
  CHECK_THROWS_AS(AdditiveForm(6, 10, {RingElem::one(9)}), PrecisionError);
  CHECK_THROWS_AS(AdditiveForm(8, 10, {RingElem::one(10)}), DomainError);
}

TEST_CASE("level reduction") {
  const AdditiveForm f = AdditiveForm::from_pairs(6, 20, {{128, 0}, {64, 0}, {1, 0}, {0, 512}});
  const AdditiveForm r = reduce_levels(f);
  CHECK(r.coeffs[0] == RingElem(2, 0, 20));
  CHECK(r.coeffs[1] == RingElem(1, 0, 20));
  CHECK(r.coeffs[3] == RingElem(0, 8, 20));
  CHECK(r.var_shift == std::vector<int>{1, 1, 0, 1});
  CHECK(r.levels_reduced());
  // Level 9 at K = 12 leaves only 6 digits after reduction.
  CHECK_THROWS_AS(reduce_levels(AdditiveForm::from_pairs(6, 12, {{512, 0}})), PrecisionError);
}

TEST_CASE("cyclic shifts") {
  CHECK(levels_of(cyclic_shift(at_levels(6, 12, {0, 0, 5}), 1)) == std::vector<int>{1, 1, 0});
  CHECK(levels_of(cyclic_shift(at_levels(6, 12, {0, 2, 4}), 2)) == std::vector<int>{2, 4, 0});
  const AdditiveForm f = at_levels(6, 12, {0, 3, 5});
  CHECK(levels_of(cyclic_shift(f, 6)) == levels_of(f));

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<RingElem> cs;
    for (int i = 0; i < 5; ++i) {
      cs.push_back(RingElem(rng() | 1, rng(), 30).shl(static_cast<int>(rng() % 6)));
    }
    const AdditiveForm g(6, 30, cs);
    const int t = static_cast<int>(rng() % 6);
    const AdditiveForm back = cyclic_shift(cyclic_shift(g, t), 6 - t);
    auto a = levels_of(g), b = levels_of(back);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("normalization") {
  CHECK(normalize(at_levels(6, 12, std::vector<int>(7, 0))).shift == 0);
  const NormalizedForm one = normalize(at_levels(6, 12, std::vector<int>(7, 1)));
  CHECK(one.shift == 5);
  CHECK(levels_of(one.form) == std::vector<int>(7, 0));
  std::vector<int> two_each;
  for (int l = 0; l < 6; ++l) two_each.insert(two_each.end(), {l, l});
  CHECK(normalize(at_levels(6, 12, two_each)).shift == 0);
  CHECK(satisfies_prefix_inequalities({2, 2, 2, 2, 2, 2}));
  CHECK_FALSE(satisfies_prefix_inequalities({1, 2, 2, 2, 2, 3}));

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> lv;
    const int s = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < s; ++i) lv.push_back(static_cast<int>(rng() % 10));
    const NormalizedForm n = normalize(at_levels(10, 16, lv));
    CHECK(satisfies_prefix_inequalities(level_distribution(n.form).counts));
  }
}

TEST_CASE("type descriptors") {
  const TypeDescriptor t = TypeDescriptor::parse("(0/0/6, 1)");
  REQUIRE(t.levels.size() == 2);
  CHECK(t.levels[0].stacked);
  CHECK(t.levels[0].class_counts == std::array<int, 3>{0, 0, 6});
  CHECK(t.levels[1].count == 1);
  CHECK(t.to_string() == "0/0/6,1");
  CHECK(t.total() == 7);
  CHECK_THROWS_AS(TypeDescriptor::parse("1/2"), ParseError);
  CHECK_THROWS_AS(TypeDescriptor::parse(""), ParseError);
}

TEST_CASE("type matching") {
  const AdditiveForm mixed = AdditiveForm::from_pairs(6, 12, {{1, 0}, {1, 0}, {0, 1}, {0, 1}, {1, 1}, {1, 1}, {1, 1}});
  const auto m = match_type(mixed, TypeDescriptor::parse("2/2/3"));
  REQUIRE(m.has_value());
  // Soundness: every slot holds variables of the labeled class.
  const auto& labels = m->class_labels.at(0);
  const auto& slot = m->slots.at(0);
  CHECK(slot.size() == 7);
  for (std::size_t k = 0; k < slot.size(); ++k) {
    const std::size_t group = k < 2 ? 0 : (k < 4 ? 1 : 2);
    CHECK(mixed.coeffs[slot[k]].leading_class() == labels[group]);
  }

  const AdditiveForm seven = AdditiveForm::from_pairs(6, 12, std::vector<std::pair<std::uint64_t, std::uint64_t>>(7, {0, 1}));
  CHECK(match_type(seven, TypeDescriptor::parse("0/0/7")).has_value());
  CHECK_FALSE(match_type(seven, TypeDescriptor::parse("0/1/7")).has_value());

  CHECK_FALSE(match_type(at_levels(6, 12, {0, 0}), TypeDescriptor::parse("3,1")).has_value());
  const auto shifted = match_type(at_levels(6, 12, {2, 2, 2, 3}), TypeDescriptor::parse("3,1"));
  REQUIRE(shifted.has_value());
  CHECK(shifted->shift == 4);
}

TEST_CASE("form text") {
  const AdditiveForm f = parse_form_text("d=6; 1, 1, 1*w, 4, 4, 4*w, 16, 16, 16*w");
  CHECK(f.degree == 6);
  CHECK(f.size() == 9);
  CHECK(f.precision >= 10);
  CHECK(f.coeffs[8] == RingElem(0, 16, f.precision));
  const AdditiveForm g = parse_form_text(format_form_text(f));
  CHECK(g.coeffs == f.coeffs);
  CHECK(parse_form_text("d=6; K=12; 1, -7").coeffs[1] == RingElem::from_int(-7, 12));
  CHECK_THROWS_AS(parse_form_text("1, 2"), ParseError);
  CHECK_THROWS_AS(parse_form_text("d=6;"), ParseError);
  CHECK_THROWS_AS(parse_form_text("d=4; 1"), ParseError);
  CHECK_THROWS_AS(parse_form_text("d=6; 1, x"), ParseError);
  // 2^20 needs level reduction by 18, leaving d + 2 digits.
  CHECK(parse_form_text("d=6; 1048576").precision >= 26);
}
