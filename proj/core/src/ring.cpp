#include "padicforms/ring.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace padicforms {

std::string F4Class::name() const {
  switch (bits_) {
    case 0: return "0";
    case 1: return "1";
    case 2: return "A";
    default: return "A1";
  }
}

std::ostream& operator<<(std::ostream& os, F4Class c) { return os << c.name(); }

void check_precision(int precision) {
  if (precision < 1 || precision > kMaxPrecision) {
    throw PrecisionError("precision " + std::to_string(precision) + " outside [1, " +
                         std::to_string(kMaxPrecision) + "]");
  }
}

RingElem::RingElem(std::uint64_t a, std::uint64_t b, int precision) : precision_(precision) {
  check_precision(precision);
  a_ = a & mask();
  b_ = b & mask();
}

RingElem RingElem::from_int(std::int64_t value, int precision) {
  return RingElem(static_cast<std::uint64_t>(value), 0, precision);
}

RingElem RingElem::power_of_two(int exponent, int precision) {
  if (exponent >= precision) return zero(precision);
  return RingElem(std::uint64_t{1} << exponent, 0, precision);
}

namespace {

void require_same_precision(const RingElem& x, const RingElem& y) {
  if (x.precision() != y.precision()) {
    throw PrecisionError("precision mismatch: " + std::to_string(x.precision()) + " vs " +
                         std::to_string(y.precision()));
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// One signed term: "[digits][*]w" or "digits".
void parse_term(std::string_view term, bool negative, std::uint64_t& a, std::uint64_t& b,
                std::string_view whole) {
  term = trim(term);
  if (term.empty()) throw ParseError("empty term in element '" + std::string(whole) + "'");
  bool is_w = false;
  if (term.back() == 'w' || term.back() == 'W') {
    is_w = true;
    term.remove_suffix(1);
    term = trim(term);
    if (!term.empty() && term.back() == '*') {
      term.remove_suffix(1);
      term = trim(term);
      if (term.empty()) throw ParseError("dangling '*' in element '" + std::string(whole) + "'");
    }
  }
  std::uint64_t magnitude = 1;
  if (!term.empty()) {
    auto [ptr, ec] = std::from_chars(term.data(), term.data() + term.size(), magnitude);
    if (ec != std::errc() || ptr != term.data() + term.size()) {
      throw ParseError("bad integer '" + std::string(term) + "' in element '" + std::string(whole) + "'");
    }
  } else if (!is_w) {
    throw ParseError("empty term in element '" + std::string(whole) + "'");
  }
  const std::uint64_t signed_value = negative ? (~magnitude + 1) : magnitude;
  (is_w ? b : a) += signed_value;
}

}  // namespace

RingElem RingElem::parse(std::string_view text, int precision) {
  const std::string_view whole = trim(text);
  if (whole.empty()) throw ParseError("empty element");
  std::uint64_t a = 0, b = 0;
  std::size_t start = 0;
  bool negative = false;
  if (whole.front() == '+' || whole.front() == '-') {
    negative = whole.front() == '-';
    start = 1;
  }
  for (std::size_t i = start; i <= whole.size(); ++i) {
    if (i == whole.size() || whole[i] == '+' || whole[i] == '-') {
      parse_term(whole.substr(start, i - start), negative, a, b, whole);
      if (i < whole.size()) negative = whole[i] == '-';
      start = i + 1;
    }
  }
  return RingElem(a, b, precision);
}

Valuation RingElem::valuation() const {
  if (is_zero()) return {precision_, true};
  return {std::countr_zero(a_ | b_), false};
}

F4Class RingElem::leading_class() const {
  if (is_zero()) return F4Class::zero();
  const int v = std::countr_zero(a_ | b_);
  return F4Class(((a_ >> v) & 1) != 0, ((b_ >> v) & 1) != 0);
}

RingElem RingElem::truncated(int bits) const {
  const std::uint64_t m = mask_for(std::min(bits, precision_));
  return RingElem(a_ & m, b_ & m, precision_);
}

RingElem RingElem::operator-() const { return RingElem(~a_ + 1, ~b_ + 1, precision_); }

RingElem operator+(const RingElem& x, const RingElem& y) {
  require_same_precision(x, y);
  return RingElem(x.a_ + y.a_, x.b_ + y.b_, x.precision_);
}

RingElem operator-(const RingElem& x, const RingElem& y) {
  require_same_precision(x, y);
  return RingElem(x.a_ - y.a_, x.b_ - y.b_, x.precision_);
}

RingElem operator*(const RingElem& x, const RingElem& y) {
  require_same_precision(x, y);
  // (a + b w)(c + e w) = (ac + be) + (ae + bc + be) w, using w^2 = w + 1.
  const std::uint64_t be = x.b_ * y.b_;
  return RingElem(x.a_ * y.a_ + be, x.a_ * y.b_ + x.b_ * y.a_ + be, x.precision_);
}

RingElem RingElem::shl(int n) const {
  if (n >= precision_) return zero(precision_);
  return RingElem(a_ << n, b_ << n, precision_);
}

RingElem RingElem::exact_shr(int n) const {
  if (n == 0) return *this;
  if (!valuation().at_least(n)) {
    throw DomainError("exact_shr: " + to_string() + " is not divisible by 2^" + std::to_string(n));
  }
  if (n >= precision_) return zero(precision_);
  return RingElem(a_ >> n, b_ >> n, precision_);
}

RingElem RingElem::pow(std::uint64_t exponent) const {
  RingElem result = one(precision_);
  RingElem base = *this;
  while (exponent != 0) {
    if ((exponent & 1) != 0) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

RingElem RingElem::inverse() const {
  if (!is_unit()) throw DomainError("inverse of non-unit " + to_string());
  // Residue field inverse, then y <- y (2 - x y); each step doubles the
  // number of correct digits.
  const F4Class r = residue();
  F4Class r_inv = r;  // 1 and its own inverse
  if (r == F4Class::w()) r_inv = F4Class::w1();
  if (r == F4Class::w1()) r_inv = F4Class::w();
  RingElem y = lift(r_inv, precision_);
  const RingElem two = from_int(2, precision_);
  for (int correct = 1; correct < precision_; correct *= 2) y = y * (two - *this * y);
  return y;
}

RingElem RingElem::conjugate() const { return RingElem(a_ + b_, ~b_ + 1, precision_); }

std::string RingElem::to_string() const {
  std::ostringstream os;
  if (b_ == 0) {
    os << a_;
  } else if (a_ == 0) {
    os << b_ << "*w";
  } else {
    os << a_ << "+" << b_ << "*w";
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const RingElem& x) { return os << x.to_string(); }

RingElem DigitExpansion::reconstruct(int precision) const {
  RingElem sum = RingElem::zero(precision);
  for (std::size_t i = digits.size(); i-- > 0;) {
    sum = sum.shl(1) + RingElem::lift(digits[i], precision);
  }
  return sum.shl(level);
}

DigitExpansion digit_expand(const RingElem& x, int depth) {
  if (depth < 1) throw DomainError("digit_expand: depth must be positive");
  const Valuation v = x.valuation();
  if (v.infinite) throw DomainError("digit_expand: zero element at precision " + std::to_string(x.precision()));
  if (v.value + depth > x.precision()) {
    throw PrecisionError("digit_expand: level " + std::to_string(v.value) + " + depth " + std::to_string(depth) +
                         " exceeds precision " + std::to_string(x.precision()));
  }
  DigitExpansion out;
  out.level = v.value;
  out.digits.reserve(static_cast<std::size_t>(depth));
  const std::uint64_t a = x.a() >> v.value;
  const std::uint64_t b = x.b() >> v.value;
  for (int i = 0; i < depth; ++i) out.digits.emplace_back(((a >> i) & 1) != 0, ((b >> i) & 1) != 0);
  return out;
}

void check_degree_shape(int degree) {
  if (degree < 2 || degree % 2 != 0 || (degree / 2) % 2 == 0) {
    throw DomainError("degree " + std::to_string(degree) + " is not of the form 2m with m odd");
  }
}

bool divisible_by_three(int degree) { return degree % 3 == 0; }

RingElem teichmueller(F4Class c, int precision) {
  if (c.is_zero()) throw DomainError("teichmueller: zero class");
  RingElem x = RingElem::lift(c, precision);
  // x -> x^4 is a lift of Frobenius-squared = identity on F4 and gains at
  // least one digit per step.
  for (int i = 0; i <= precision; ++i) x = x.pow(4);
  if (x.pow(3) != RingElem::one(precision)) throw InternalError("teichmueller iteration did not converge");
  return x;
}

const Multiplier& MultiplierSet::find(int class_index, int epsilon) const {
  return reps.at(static_cast<std::size_t>(index_of(class_index, epsilon)));
}

int MultiplierSet::index_of(int class_index, int epsilon) const {
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (reps[i].class_index == class_index && reps[i].epsilon == epsilon) return static_cast<int>(i);
  }
  throw DomainError("multiplier (class " + std::to_string(class_index) + ", epsilon " +
                    std::to_string(epsilon) + ") not available for degree " + std::to_string(degree));
}

MultiplierSet multiplier_set(int degree, int precision) {
  check_degree_shape(degree);
  check_precision(precision);
  MultiplierSet set;
  set.degree = degree;
  set.precision = precision;
  set.class_transitive = !divisible_by_three(degree);
  const auto udeg = static_cast<std::uint64_t>(degree);
  // (2w - 1)^2 = 5, so (2w - 1)^d = 5^m = 5 (mod 8).
  const RingElem five_root = RingElem(~std::uint64_t{0}, 2, precision);
  const RingElem omega = teichmueller(F4Class::w(), precision);
  const int class_count = set.class_transitive ? 3 : 1;
  for (int c = 0; c < class_count; ++c) {
    // omega^(j d) has class index (j d) mod 3; pick j so that it equals c.
    int j = 0;
    while ((j * degree) % 3 != c) ++j;
    const RingElem class_root = omega.pow(static_cast<std::uint64_t>(j));
    for (int eps = 0; eps < 2; ++eps) {
      Multiplier m;
      m.class_index = c;
      m.epsilon = eps;
      m.root = eps == 0 ? class_root : class_root * five_root;
      m.value = m.root.pow(udeg);
      set.reps.push_back(m);
    }
  }
  return set;
}

const MultiplierSet& shared_multiplier_set(int degree, int precision) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<MultiplierSet>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{degree, precision}];
  if (!slot) slot = std::make_unique<MultiplierSet>(multiplier_set(degree, precision));
  return *slot;
}

namespace {

// Newton iteration for x^d = t from a seed with v(seed^d - t) >= 3.
RingElem newton_dth_root(const RingElem& t, int degree, RingElem x) {
  const auto udeg = static_cast<std::uint64_t>(degree);
  const RingElem half_degree = RingElem::from_int(degree / 2, t.precision());
  for (int iter = 0; iter < 2 * kMaxPrecision; ++iter) {
    const RingElem f = x.pow(udeg) - t;
    if (f.is_zero()) return x;
    if (!f.valuation().at_least(std::min(3, t.precision()))) {
      throw DomainError("Newton seed residual " + f.to_string() + " has valuation below 3");
    }
    // f / f'(x) = (f / 2) / (m x^(d-1)).
    const RingElem step = f.exact_shr(1) * (half_degree * x.pow(udeg - 1)).inverse();
    x -= step;
  }
  throw InternalError("Newton iteration for d-th root did not converge");
}

}  // namespace

std::optional<RingElem> dth_root(const RingElem& t, int degree) {
  if (degree < 1) throw DomainError("dth_root: degree must be positive");
  if (!t.is_unit()) throw DomainError("dth_root: " + t.to_string() + " is not a unit");
  const int k = t.precision();
  const int search_bits = std::min(k, 4);
  const std::uint64_t search_mask = RingElem::mask_for(search_bits);
  const auto udeg = static_cast<std::uint64_t>(degree);
  const RingElem target = t.with_precision(search_bits);
  for (std::uint64_t a = 0; a <= search_mask; ++a) {
    for (std::uint64_t b = 0; b <= search_mask; ++b) {
      const RingElem x(a, b, search_bits);
      if (!x.is_unit() || x.pow(udeg) != target) continue;
      if (degree % 2 != 0) {
        // Odd degree: f' is a unit, plain Newton from any residue-level seed.
        RingElem y = x.with_precision(k);
        for (int iter = 0; iter < 2 * kMaxPrecision; ++iter) {
          const RingElem f = y.pow(udeg) - t;
          if (f.is_zero()) return y;
          y -= f * (RingElem::from_int(degree, k) * y.pow(udeg - 1)).inverse();
        }
        throw InternalError("Newton iteration for odd-degree root did not converge");
      }
      return newton_dth_root(t, degree, x.with_precision(k));
    }
  }
  return std::nullopt;
}

RingElem newton_anchor_solve(const RingElem& a, int degree, const RingElem& c) {
  check_degree_shape(degree);
  const int precision = a.precision();
  const Valuation va = a.valuation();
  if (va.infinite) throw DomainError("newton_anchor_solve: zero anchor coefficient");
  const int k = va.value;
  if (k + 3 > precision) {
    throw PrecisionError("newton_anchor_solve: precision " + std::to_string(precision) +
                         " below anchor level + 3 = " + std::to_string(k + 3));
  }
  if (!(a + c).valuation().at_least(k + 3)) {
    throw DomainError("newton_anchor_solve: residual " + (a + c).to_string() + " has valuation below level + 3 = " +
                      std::to_string(k + 3));
  }
  // Divide through by a: x^d = t with t = -(c / 2^k) / (a / 2^k), t = 1 (mod 8).
  const int reduced = precision - k;
  const RingElem unit = a.exact_shr(k).with_precision(reduced);
  const RingElem rest = c.exact_shr(k).with_precision(reduced);
  const RingElem t = -(rest * unit.inverse());
  const RingElem x = newton_dth_root(t, degree, RingElem::one(reduced));
  return x.with_precision(precision);
}

}  // namespace padicforms
