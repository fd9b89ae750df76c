#include <random>
#include <set>

#include "doctest.h"
#include "padicforms/ring.hpp"

using namespace padicforms;

namespace {

RingElem E(std::uint64_t a, std::uint64_t b, int k = 12) { return RingElem(a, b, k); }

}  // namespace

TEST_CASE("ring arithmetic basics") {
  CHECK(E(0, 1) * E(0, 1) == E(1, 1));
  CHECK(E(1, 1) + E(1, 1) == E(2, 2));
  const RingElem five_root = RingElem::from_int(-1, 12) + E(0, 2);
  CHECK(five_root * five_root == E(5, 0));
  CHECK_THROWS_AS(E(1, 0, 8) + E(1, 0, 9), PrecisionError);
  CHECK_THROWS_AS(E(1, 0, 8) * E(1, 0, 9), PrecisionError);
}

TEST_CASE("ring laws on random elements") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const RingElem x = E(rng(), rng(), 20), y = E(rng(), rng(), 20), z = E(rng(), rng(), 20);
    CHECK(x * y == y * x);
    CHECK((x * y) * z == x * (y * z));
    CHECK(x * (y + z) == x * y + x * z);
    CHECK((x - y) + y == x);
    if (x.is_unit()) CHECK(x * x.inverse() == RingElem::one(20));
    CHECK(x.conjugate().conjugate() == x);
    CHECK((x * y).conjugate() == x.conjugate() * y.conjugate());
  }
}

TEST_CASE("valuation") {
  CHECK(E(2, 2).valuation().value == 1);
  CHECK(E(4, 0).valuation().value == 2);
  const Valuation z = RingElem::zero(8).valuation();
  CHECK(z.infinite);
  CHECK(z.value == 8);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const RingElem x = E(rng() % 64 << (rng() % 4), rng() % 64 << (rng() % 4), 30);
    const RingElem y = E(rng() % 64 << (rng() % 4), rng() % 64 << (rng() % 4), 30);
    if (x.is_zero() || y.is_zero()) continue;
    const int vx = x.valuation().value, vy = y.valuation().value;
    if (vx + vy < 30) CHECK((x * y).valuation().value == vx + vy);
  }
}

TEST_CASE("digit expansion") {
  const DigitExpansion e = digit_expand(E(3, 5), 3);
  CHECK(e.level == 0);
  REQUIRE(e.digits.size() == 3);
  CHECK(e.digits[0] == F4Class::w1());
  CHECK(e.digits[1] == F4Class::one());
  CHECK(e.digits[2] == F4Class::w());

  const DigitExpansion two = digit_expand(E(2, 2), 2);
  CHECK(two.level == 1);
  CHECK(two.digits[0] == F4Class::w1());
  CHECK(two.digits[1] == F4Class::zero());

  const DigitExpansion five = digit_expand(E(5, 0), 3);
  CHECK(five.digits == std::vector<F4Class>{F4Class::one(), F4Class::zero(), F4Class::one()});

  CHECK_THROWS_AS(digit_expand(RingElem::zero(8), 2), DomainError);
  CHECK_THROWS_AS(digit_expand(E(4, 0, 8), 7), PrecisionError);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const RingElem x = E(rng(), rng(), 24);
    if (x.is_zero()) continue;
    const int lvl = x.valuation().value;
    const int depth = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(24 - lvl));
    const DigitExpansion ex = digit_expand(x, depth);
    CHECK(ex.reconstruct(24) == x.truncated(lvl + depth));
  }
}

TEST_CASE("F4 tables") {
  const F4Class c0 = F4Class::zero(), c1 = F4Class::one(), a = F4Class::w(), a1 = F4Class::w1();
  CHECK(a + a1 == c1);
  CHECK(a * a == a1);
  CHECK(a * a1 == c1);
  for (unsigned x = 0; x < 4; ++x) {
    for (unsigned y = 0; y < 4; ++y) {
      const F4Class cx = F4Class::from_bits(x), cy = F4Class::from_bits(y);
      // Compare against ring arithmetic on the lifts modulo 2.
      const RingElem rx = RingElem::lift(cx, 1), ry = RingElem::lift(cy, 1);
      CHECK((cx + cy) == (rx + ry).residue());
      CHECK((cx * cy) == (rx * ry).residue());
      CHECK((cx + cx) == c0);
    }
  }
  CHECK(c1.name() == "1");
  CHECK(a1.name() == "A1");
}

TEST_CASE("unit sixth powers modulo 8") {
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  int units = 0;
  for (std::uint64_t a = 0; a < 8; ++a) {
    for (std::uint64_t b = 0; b < 8; ++b) {
      const RingElem u(a, b, 3);
      if (!u.is_unit()) continue;
      ++units;
      const RingElem p = u.pow(6);
      seen.insert({p.a(), p.b()});
    }
  }
  CHECK(units == 48);
  CHECK(seen == std::set<std::pair<std::uint64_t, std::uint64_t>>{{1, 0}, {5, 0}});
}

TEST_CASE("multiplier sets") {
  auto mod = [](const MultiplierSet& ms, int k) {
    std::set<std::pair<std::uint64_t, std::uint64_t>> out;
    for (const auto& m : ms.reps) {
      const RingElem r = m.value.with_precision(k);
      out.insert({r.a(), r.b()});
    }
    return out;
  };
  const MultiplierSet six = multiplier_set(6, 16);
  CHECK(six.reps.size() == 2);
  CHECK_FALSE(six.class_transitive);
  CHECK(mod(six, 3) == std::set<std::pair<std::uint64_t, std::uint64_t>>{{1, 0}, {5, 0}});
  CHECK(mod(six, 2) == std::set<std::pair<std::uint64_t, std::uint64_t>>{{1, 0}});

  const MultiplierSet ten = multiplier_set(10, 16);
  CHECK(ten.reps.size() == 6);
  CHECK(ten.class_transitive);
  // 1, 1 + w and w + 2 (1 + w) modulo 4
  CHECK(mod(ten, 2) == std::set<std::pair<std::uint64_t, std::uint64_t>>{{1, 0}, {1, 1}, {2, 3}});

  for (int d : {6, 10, 14, 18, 30}) {
    const MultiplierSet ms = multiplier_set(d, 24);
    for (const auto& m : ms.reps) {
      CHECK(m.value.is_unit());
      CHECK(m.root.pow(static_cast<std::uint64_t>(d)) == m.value);
      const RingElem u = m.value.with_precision(3);
      const RingElem t = teichmueller(F4Class::nonzero(m.class_index), 3) * RingElem(1 + 4 * m.epsilon, 0, 3);
      CHECK(u == t);
      const auto root = dth_root(m.value, d);
      REQUIRE(root.has_value());
      CHECK(root->pow(static_cast<std::uint64_t>(d)) == m.value);
    }
  }
  CHECK_THROWS_AS(multiplier_set(4, 16), DomainError);
  CHECK_THROWS_AS(multiplier_set(12, 16), DomainError);
}

TEST_CASE("teichmueller lifts") {
  for (int c = 0; c < 3; ++c) {
    const RingElem t = teichmueller(F4Class::nonzero(c), 40);
    CHECK(t.pow(3) == RingElem::one(40));
    CHECK(t.residue() == F4Class::nonzero(c));
  }
}

TEST_CASE("d-th roots") {
  CHECK(*dth_root(RingElem::one(16), 6) == RingElem::one(16));
  const auto r5 = dth_root(E(5, 0, 16), 6);
  REQUIRE(r5.has_value());
  CHECK(r5->pow(6) == E(5, 0, 16));
  CHECK_FALSE(dth_root(E(1, 1, 16), 6).has_value());
  CHECK_FALSE(dth_root(E(3, 0, 16), 6).has_value());
  CHECK_THROWS_AS(dth_root(E(2, 0, 16), 6), DomainError);
  const auto r7 = dth_root(RingElem::from_int(-7, 20), 6);
  REQUIRE(r7.has_value());
  CHECK(r7->pow(6) == RingElem::from_int(-7, 20));
}

TEST_CASE("Newton anchor solve") {
  const RingElem x = newton_anchor_solve(RingElem::one(16), 6, E(7, 0, 16));
  CHECK(x.is_unit());
  CHECK(x.pow(6) + E(7, 0, 16) == RingElem::zero(16));

  // 2 x^6 + c with v(2 + c) >= 4
  const RingElem c = RingElem::from_int(-2, 16) + E(16, 32, 16);
  const RingElem y = newton_anchor_solve(E(2, 0, 16), 6, c);
  CHECK(y.is_unit());
  CHECK(E(2, 0, 16) * y.pow(6) + c == RingElem::zero(16));

  CHECK(newton_anchor_solve(RingElem::one(16), 6, RingElem::from_int(-1, 16)) == RingElem::one(16));
  CHECK_THROWS_AS(newton_anchor_solve(RingElem::one(16), 6, E(3, 0, 16)), DomainError);
}

TEST_CASE("element text") {
  CHECK(RingElem::parse("3+5*w", 10) == E(3, 5, 10));
  CHECK(RingElem::parse("5", 10) == E(5, 0, 10));
  CHECK(RingElem::parse("1*w", 10) == E(0, 1, 10));
  CHECK(RingElem::parse("-1", 4) == E(15, 0, 4));
  CHECK_THROWS_AS(RingElem::parse("3+x", 10), ParseError);
  CHECK(E(3, 5, 10).to_string() == "3+5*w");
}
