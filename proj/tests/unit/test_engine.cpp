#include <algorithm>
#include <random>

#include "doctest.h"
#include "padicforms/engine.hpp"

using namespace padicforms;

namespace {

AdditiveForm form(int d, int k, const std::vector<std::pair<std::int64_t, std::int64_t>>& cs) {
  std::vector<RingElem> out;
  for (auto [a, b] : cs) out.push_back(RingElem::from_int(a, k) + RingElem::from_int(b, k) * RingElem::w(k));
  return AdditiveForm(d, k, out);
}

VarNode leaf_node(const RingElem& c, int known) {
  VarNode n;
  n.coeff = PartialValue(c, known);
  n.level = n.coeff.level();
  return n;
}

}  // namespace

TEST_CASE("partial values") {
  const PartialValue x(RingElem(0b1011, 0, 10), 3);
  CHECK(x.value() == RingElem(0b011, 0, 10));
  CHECK(x.level() == 0);
  const PartialValue y(RingElem(0b0101, 0, 10), 3);
  const PartialValue s = x + y;  // 3 + 5 = 8 = 0 mod 8
  CHECK(s.known() == 3);
  CHECK_FALSE(s.level().has_value());
  CHECK(s.vanishes_to(3));
  CHECK_FALSE(s.vanishes_to(4));
  CHECK(x.shl(2).known() == 5);
  CHECK(x.shl(2).level() == 2);
  CHECK(x.times_unit(RingElem(5, 0, 10)).known() == 3);
  CHECK_THROWS_AS(x.times_unit(RingElem(2, 0, 10)), DomainError);
  CHECK_THROWS_AS(s.leading_class(), DomainError);
}

TEST_CASE("node arena rejects overlapping children") {
  const MultiplierSet ms = multiplier_set(6, 12);
  NodeArena arena(6, ms);
  const int a = arena.add_leaf(0, PartialValue::exact(RingElem::one(12)));
  const int b = arena.add_leaf(1, PartialValue::exact(RingElem::one(12)));
  const std::vector<MultiplierChoice> id2{{0, 0}, {0, 0}};
  const int ab = arena.contract(std::vector<int>{a, b}, id2, MoveKind::kSameClassPair);
  CHECK(arena.node(ab).coeff.value() == RingElem(2, 0, 12));
  CHECK_THROWS_AS(arena.contract(std::vector<int>{ab, a}, id2, MoveKind::kPair), DomainError);
}

TEST_CASE("tactic scan shapes") {
  const int k = 16;
  SUBCASE("pairs and cross-class moves") {
    const MultiplierSet ms = multiplier_set(6, k);
    std::vector<VarNode> bucket{leaf_node(RingElem::one(k), 3), leaf_node(RingElem::one(k), 3),
                                leaf_node(RingElem::w(k), 3)};
    const auto moves = tactic_scan(bucket, ms);
    CHECK(std::any_of(moves.begin(), moves.end(), [](const Move& m) {
      return m.groups[0] == std::vector<int>{0, 1} && m.kind != MoveKind::kCrossClass;
    }));
    CHECK(std::any_of(moves.begin(), moves.end(), [](const Move& m) { return m.kind == MoveKind::kCrossClass; }));
  }
  SUBCASE("four equal units admit a quadruplet to +3") {
    const MultiplierSet ms = multiplier_set(6, k);
    std::vector<VarNode> bucket(4, leaf_node(RingElem::one(k), 3));
    const auto moves = tactic_scan(bucket, ms);
    CHECK(std::any_of(moves.begin(), moves.end(),
                      [](const Move& m) { return m.kind == MoveKind::kQuadruplet && m.gain == 3; }));
  }
  SUBCASE("triplet needs all three classes") {
    const MultiplierSet ms = multiplier_set(6, k);
    std::vector<VarNode> bucket{leaf_node(RingElem::one(k), 3), leaf_node(RingElem::w(k), 3),
                                leaf_node(RingElem(1, 1, k), 3)};
    const auto moves = tactic_scan(bucket, ms);
    CHECK(std::count_if(moves.begin(), moves.end(), [](const Move& m) { return m.kind == MoveKind::kTriplet; }) == 8);
  }
  SUBCASE("seven units in one class, two noncomplementary 1-classes") {
    const MultiplierSet ms = multiplier_set(6, k);
    // class 1 with 1-classes 0 and 1: coefficients 1 and 3
    std::vector<VarNode> bucket;
    for (int i = 0; i < 4; ++i) bucket.push_back(leaf_node(RingElem::one(k), 3));
    for (int i = 0; i < 3; ++i) bucket.push_back(leaf_node(RingElem(3, 0, k), 3));
    TacticScanOptions opts;
    opts.vary_multipliers = false;
    const auto moves = tactic_scan(bucket, ms, opts);
    // Greedily take disjoint same-class pairs.
    std::vector<char> used(bucket.size(), 0);
    int pairs = 0;
    for (const auto& m : moves) {
      if (m.kind != MoveKind::kSameClassPair) continue;
      const auto& g = m.groups[0];
      if (used[static_cast<std::size_t>(g[0])] || used[static_cast<std::size_t>(g[1])]) continue;
      used[static_cast<std::size_t>(g[0])] = used[static_cast<std::size_t>(g[1])] = 1;
      ++pairs;
    }
    CHECK(pairs == 3);
  }
  SUBCASE("five in one class split") {
    const MultiplierSet ms = multiplier_set(6, k);
    std::vector<VarNode> bucket;
    for (int i = 0; i < 3; ++i) bucket.push_back(leaf_node(RingElem::one(k), 3));
    for (int i = 0; i < 2; ++i) bucket.push_back(leaf_node(RingElem(1, 2, k), 3));
    const auto moves = tactic_scan(bucket, ms);
    CHECK(std::any_of(moves.begin(), moves.end(), [](const Move& m) { return m.kind == MoveKind::kFiveInClassSplit; }));
  }
}

TEST_CASE("certificate search examples") {
  const int k = 12;
  SUBCASE("1 + 7 pair") {
    const AdditiveForm f = form(6, k, {{1, 0}, {7, 0}});
    const SearchOutcome out = search_certificate(f);
    REQUIRE(out.status == SearchStatus::kFound);
    const auto& cert = *out.certificate;
    CHECK(cert.anchor_level == 0);
    CHECK(cert.achieved_level >= 3);
    CHECK(cert.leaves_below(cert.root).size() == 2);
    CHECK(validate_certificate(f, cert).ok);
    CHECK(validate_certificate(form(6, k, {{1, 0}, {15, 0}}), cert).ok);
    CHECK_FALSE(validate_certificate(form(6, k, {{1, 0}, {3, 0}}), cert).ok);
  }
  SUBCASE("four equal units") {
    const AdditiveForm f = form(6, k, {{1, 0}, {1, 0}, {1, 0}, {1, 0}});
    const SearchOutcome out = search_certificate(f);
    REQUIRE(out.status == SearchStatus::kFound);
    CHECK(out.certificate->achieved_level >= 3);
    CHECK(validate_certificate(f, *out.certificate).ok);
  }
  SUBCASE("different classes do not contract at 3 | d") {
    const AdditiveForm f = form(6, k, {{1, 0}, {1, 2}});
    CHECK(search_certificate(f).status == SearchStatus::kNotFound);
  }
  SUBCASE("leaf depth below 3 finds nothing") {
    SearchConfig cfg;
    cfg.leaf_depth = 2;
    CHECK(search_certificate(form(6, k, {{1, 0}, {7, 0}}), cfg).status == SearchStatus::kNotFound);
  }
  SUBCASE("tiny budget is reported distinctly") {
    SearchConfig cfg;
    cfg.node_budget = 1;
    std::vector<std::pair<std::int64_t, std::int64_t>> cs(10, {1, 0});
    CHECK(search_certificate(form(6, k, cs), cfg).status == SearchStatus::kBudgetExhausted);
  }
}

TEST_CASE("validation rejects structural errors") {
  const int k = 12;
  const AdditiveForm f = form(6, k, {{1, 0}, {7, 0}});
  ContractionCertificate cert = *search_certificate(f).certificate;
  SUBCASE("overlapping leaves") {
    for (auto& n : cert.nodes) {
      if (n.kind == NodeKind::kLeaf) n.leaf_index = 0;
    }
    CHECK_FALSE(validate_certificate(f, cert).ok);
  }
  SUBCASE("missing variable") {
    cert.nodes[0].leaf_index = 5;
    CHECK_FALSE(validate_certificate(f, cert).ok);
  }
  SUBCASE("wrong anchor level") {
    cert.anchor_level = 1;
    CHECK_FALSE(validate_certificate(f, cert).ok);
  }
}

TEST_CASE("structural audit and monotonicity on random forms") {
  std::mt19937_64 rng(21);
  const int k = 16;
  int found = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int d = trial % 2 == 0 ? 6 : 10;
    std::vector<RingElem> cs;
    const int s = 2 + static_cast<int>(rng() % 8);
    for (int i = 0; i < s; ++i) {
      cs.push_back(RingElem(rng() | 1, rng(), k).shl(static_cast<int>(rng() % 3)));
      if (rng() % 2 == 0) cs.back() = RingElem(rng(), rng() | 1, k).shl(static_cast<int>(rng() % 3));
    }
    const AdditiveForm f(d, k, cs);
    const SearchOutcome out = search_certificate(f);
    if (out.status != SearchStatus::kFound) continue;
    ++found;
    const auto& cert = *out.certificate;
    const ValidationResult v = validate_certificate(f, cert);
    CHECK(v.ok);
    CHECK(cert.achieved_level >= cert.anchor_level + 3);
    int min_level = 1 << 20;
    for (int id : cert.leaves_below(cert.root)) min_level = std::min(min_level, *cert.node(id).level);
    CHECK(min_level == cert.anchor_level);

    std::vector<RingElem> more = cs;
    for (int extra = 0; extra < 3; ++extra) more.push_back(RingElem(rng() | 1, rng(), k).shl(static_cast<int>(rng() % 5)));
    CHECK(search_certificate(AdditiveForm(d, k, more)).status == SearchStatus::kFound);
  }
  CHECK(found > 50);
}

TEST_CASE("abstraction soundness on deep completions") {
  std::mt19937_64 rng(33);
  const int k = 20;
  int certs = 0;
  while (certs < 20) {
    std::vector<RingElem> cs;
    for (int i = 0; i < 6; ++i) cs.push_back(RingElem(rng(), rng(), k).shl(static_cast<int>(rng() % 3)));
    if (std::any_of(cs.begin(), cs.end(), [](const RingElem& c) { return c.is_zero(); })) continue;
    const AdditiveForm f(6, k, cs);
    const SearchOutcome out = search_certificate(f);
    if (out.status != SearchStatus::kFound) continue;
    ++certs;
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<RingElem> deep = cs;
      for (auto& c : deep) {
        const int known = c.valuation().value + 3;
        c = c.truncated(known) + RingElem(rng(), rng(), k).shl(known);
      }
      CHECK(validate_certificate(AdditiveForm(6, k, deep), *out.certificate).ok);
    }
  }
}
