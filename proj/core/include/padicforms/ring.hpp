#pragma once

// Truncated ring of integers O/2^K O of the unramified quadratic extension
// Q2(sqrt 5). O = Z2[w] with w^2 = w + 1 (w = (1 + sqrt 5) / 2), the
// uniformizer is 2 and the residue field is F4 = {0, 1, w, 1 + w}.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "padicforms/errors.hpp"

namespace padicforms {

inline constexpr int kMaxPrecision = 63;

/// Residue class in F4, stored as (coefficient of 1, coefficient of w).
class F4Class {
 public:
  constexpr F4Class() = default;
  constexpr F4Class(bool one, bool w) : bits_(static_cast<std::uint8_t>((one ? 1 : 0) | (w ? 2 : 0))) {}

  static constexpr F4Class zero() { return F4Class(false, false); }
  static constexpr F4Class one() { return F4Class(true, false); }
  static constexpr F4Class w() { return F4Class(false, true); }
  static constexpr F4Class w1() { return F4Class(true, true); }
  static constexpr F4Class from_bits(unsigned bits) { return F4Class((bits & 1) != 0, (bits & 2) != 0); }

  /// The three nonzero classes in the fixed order 1, w, 1 + w.
  static constexpr F4Class nonzero(int index) { return from_bits(static_cast<unsigned>(index + 1)); }

  constexpr unsigned bits() const { return bits_; }
  constexpr bool one_bit() const { return (bits_ & 1) != 0; }
  constexpr bool w_bit() const { return (bits_ & 2) != 0; }
  constexpr bool is_zero() const { return bits_ == 0; }
  /// Position of a nonzero class in the order 1, w, 1 + w.
  constexpr int index() const { return static_cast<int>(bits_) - 1; }

  friend constexpr F4Class operator+(F4Class x, F4Class y) { return from_bits(x.bits_ ^ y.bits_); }
  friend constexpr F4Class operator*(F4Class x, F4Class y) {
    // (p + q w)(r + s w) = (pr + qs) + (ps + qr + qs) w over F2.
    const bool p = x.one_bit(), q = x.w_bit(), r = y.one_bit(), s = y.w_bit();
    return F4Class(((p && r) != (q && s)), ((p && s) != (q && r)) != (q && s));
  }
  friend constexpr bool operator==(F4Class x, F4Class y) { return x.bits_ == y.bits_; }

  /// "0", "1", "A" or "A1".
  std::string name() const;

 private:
  std::uint8_t bits_ = 0;
};

std::ostream& operator<<(std::ostream& os, F4Class c);

/// 2-adic valuation; `infinite` means "at least `value`", i.e. the element is
/// zero at the available precision.
struct Valuation {
  int value = 0;
  bool infinite = false;

  bool at_least(int v) const { return value >= v; }
  friend bool operator==(const Valuation&, const Valuation&) = default;
};

/// Element a + b w of O/2^K O with 0 <= a, b < 2^K.
class RingElem {
 public:
  RingElem() = default;
  /// Reduces a and b modulo 2^precision.
  RingElem(std::uint64_t a, std::uint64_t b, int precision);

  static RingElem from_int(std::int64_t value, int precision);
  static RingElem zero(int precision) { return RingElem(0, 0, precision); }
  static RingElem one(int precision) { return RingElem(1, 0, precision); }
  static RingElem w(int precision) { return RingElem(0, 1, precision); }
  /// Lift of a residue class using the representatives {0, 1, w, 1 + w}.
  static RingElem lift(F4Class c, int precision) { return RingElem(c.one_bit(), c.w_bit(), precision); }
  /// 2^exponent (zero when exponent >= precision).
  static RingElem power_of_two(int exponent, int precision);

  /// Parses "a+b*w", "a", "b*w", "-a-b*w" (decimal integers, reduced mod 2^K).
  static RingElem parse(std::string_view text, int precision);

  std::uint64_t a() const { return a_; }
  std::uint64_t b() const { return b_; }
  int precision() const { return precision_; }
  std::uint64_t mask() const { return mask_for(precision_); }

  bool is_zero() const { return a_ == 0 && b_ == 0; }
  bool is_unit() const { return ((a_ | b_) & 1) != 0; }
  Valuation valuation() const;
  /// Class of the leading digit: residue of x / 2^level. Zero for x = 0.
  F4Class leading_class() const;
  /// Residue modulo 2.
  F4Class residue() const { return F4Class((a_ & 1) != 0, (b_ & 1) != 0); }

  /// Same representative (a, b) viewed at another precision; truncates when
  /// lowering, pads with zero digits when raising.
  RingElem with_precision(int precision) const { return RingElem(a_, b_, precision); }
  /// Reduction modulo 2^bits, kept at the current precision.
  RingElem truncated(int bits) const;

  RingElem operator-() const;
  friend RingElem operator+(const RingElem& x, const RingElem& y);
  friend RingElem operator-(const RingElem& x, const RingElem& y);
  friend RingElem operator*(const RingElem& x, const RingElem& y);
  RingElem& operator+=(const RingElem& y) { return *this = *this + y; }
  RingElem& operator-=(const RingElem& y) { return *this = *this - y; }
  RingElem& operator*=(const RingElem& y) { return *this = *this * y; }
  friend bool operator==(const RingElem& x, const RingElem& y) = default;

  /// Multiplication by 2^n.
  RingElem shl(int n) const;
  /// Exact division by 2^n. The result is known modulo 2^(K-n); its upper
  /// digits are taken from the representative. Requires valuation >= n.
  RingElem exact_shr(int n) const;

  RingElem pow(std::uint64_t exponent) const;
  /// Multiplicative inverse of a unit.
  RingElem inverse() const;

  /// Galois conjugation w -> 1 - w.
  RingElem conjugate() const;

  std::string to_string() const;

  static std::uint64_t mask_for(int precision) {
    return precision >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << precision) - 1;
  }

 private:
  std::uint64_t a_ = 0;
  std::uint64_t b_ = 0;
  int precision_ = 1;
};

std::ostream& operator<<(std::ostream& os, const RingElem& x);

/// Throws PrecisionError unless 1 <= precision <= kMaxPrecision.
void check_precision(int precision);

/// x = 2^level * (sum_i 2^i lift(digits[i]) + ...), digits[0] != 0.
struct DigitExpansion {
  int level = 0;
  std::vector<F4Class> digits;

  /// 2^level * sum_i 2^i lift(digits[i]) at the given precision.
  RingElem reconstruct(int precision) const;
};

/// Requires x != 0 and level + depth <= K.
DigitExpansion digit_expand(const RingElem& x, int depth);

/// Throws DomainError unless d = 2m with m odd.
void check_degree_shape(int degree);
bool divisible_by_three(int degree);

/// Teichmueller lift of a nonzero residue class: the cube root of unity
/// congruent to it modulo 2.
RingElem teichmueller(F4Class c, int precision);

/// One d-th power multiplier: `value` = `root`^d, with value congruent to
/// (Teichmueller class) * (1 + 4 * epsilon) modulo 8.
struct Multiplier {
  int class_index = 0;  ///< 0, 1, 2 for classes 1, w, 1 + w of `value`
  int epsilon = 0;      ///< selects the factor (1 + 4 epsilon) modulo 8
  RingElem root;
  RingElem value;
};

/// Representatives of the unit d-th powers modulo 8 lifted to exact d-th
/// powers modulo 2^K. Two entries when 3 | d, six otherwise.
struct MultiplierSet {
  int degree = 0;
  int precision = 0;
  bool class_transitive = false;  ///< true iff 3 does not divide d
  std::vector<Multiplier> reps;

  const Multiplier& find(int class_index, int epsilon) const;
  int index_of(int class_index, int epsilon) const;
};

MultiplierSet multiplier_set(int degree, int precision);
/// Memoized multiplier_set; the reference stays valid for the program's
/// lifetime. Thread-safe.
const MultiplierSet& shared_multiplier_set(int degree, int precision);

/// Unit x with x^d = t (mod 2^K), or nullopt when t is not a d-th power.
/// Throws DomainError if t is not a unit.
std::optional<RingElem> dth_root(const RingElem& t, int degree);

/// Unit x with a * x^d + c = 0 (mod 2^K), where v(a) = k, v(c) = k and
/// v(a + c) >= k + 3 (seed x = 1). Throws DomainError if the residual is
/// too shallow for the Newton iteration.
RingElem newton_anchor_solve(const RingElem& a, int degree, const RingElem& c);

}  // namespace padicforms
