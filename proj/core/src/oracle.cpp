#include "padicforms/oracle.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <set>

namespace padicforms {

namespace {

using Key = std::pair<std::uint64_t, std::uint64_t>;
Key key_of(const RingElem& x) { return {x.a(), x.b()}; }

// Unit d-th powers modulo 2^rem: reps * (1 + 8 z).
std::vector<RingElem> unit_power_values(int degree, int rem) {
  const MultiplierSet ms = multiplier_set(degree, std::max(rem, 1));
  std::set<Key> seen;
  std::vector<RingElem> out;
  auto add = [&](const RingElem& v) {
    if (seen.insert(key_of(v)).second) out.push_back(v);
  };
  if (rem <= 3) {
    for (const auto& m : ms.reps) add(m.value.with_precision(rem));
    return out;
  }
  const std::uint64_t span = std::uint64_t{1} << (rem - 3);
  for (const auto& m : ms.reps) {
    for (std::uint64_t za = 0; za < span; ++za) {
      for (std::uint64_t zb = 0; zb < span; ++zb) {
        add(m.value * (RingElem::one(rem) + RingElem(za, zb, rem).shl(3)));
      }
    }
  }
  return out;
}

PowerValueSet build_power_value_set(int degree, int modulus) {
  check_degree_shape(degree);
  check_precision(modulus);
  PowerValueSet pvs;
  pvs.degree = degree;
  pvs.modulus = modulus;
  PowerValue zero;
  zero.value = RingElem::zero(modulus);
  zero.unit_part = RingElem::zero(1);
  pvs.values.push_back(zero);
  for (int j = 0; j * degree < modulus; ++j) {
    const int rem = modulus - j * degree;
    for (const RingElem& u : unit_power_values(degree, rem)) {
      PowerValue v;
      v.value = u.with_precision(modulus).shl(j * degree);
      v.unit = j == 0;
      v.shift = j;
      v.unit_part = u;
      pvs.values.push_back(v);
    }
  }
  if (modulus <= 9) {
    std::set<Key> fast, brute;
    for (const auto& v : pvs.values) fast.insert(key_of(v.value));
    for (const auto& v : brute_force_power_values(degree, modulus)) brute.insert(key_of(v));
    if (fast != brute || fast.size() != pvs.values.size()) {
      throw InternalError("power value set disagrees with brute force at d = " + std::to_string(degree) +
                          ", M = " + std::to_string(modulus));
    }
  }
  return pvs;
}

// Bitset over O/2^M, bit a + 2^M b.
class SumSet {
 public:
  explicit SumSet(int modulus)
      : m_(modulus), r_(std::uint64_t{1} << modulus), words_(std::max<std::uint64_t>(1, (r_ * r_) / 64), 0) {}

  bool test(std::uint64_t a, std::uint64_t b) const {
    const std::uint64_t i = a + (b << m_);
    return ((words_[i / 64] >> (i % 64)) & 1U) != 0;
  }
  void set(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t i = a + (b << m_);
    words_[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  bool any() const {
    return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
  }
  std::uint64_t count() const {
    std::uint64_t c = 0;
    for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
    return c;
  }
  std::size_t word_count() const { return words_.size(); }

  // this |= src translated by (va, vb).
  void or_translated(const SumSet& src, std::uint64_t va, std::uint64_t vb) {
    if (r_ >= 64) {
      const std::uint64_t w = r_ / 64;
      const std::uint64_t q = va / 64;
      const unsigned r = static_cast<unsigned>(va % 64);
      for (std::uint64_t b = 0; b < r_; ++b) {
        const std::uint64_t* in = &src.words_[b * w];
        std::uint64_t* out = &words_[((b + vb) & (r_ - 1)) * w];
        for (std::uint64_t k = 0; k < w; ++k) {
          const std::uint64_t lo = in[(k + w - q) % w];
          if (r == 0) {
            out[k] |= lo;
          } else {
            const std::uint64_t prev = in[(k + 2 * w - q - 1) % w];
            out[k] |= (lo << r) | (prev >> (64 - r));
          }
        }
      }
      return;
    }
    for (std::uint64_t b = 0; b < r_; ++b) {
      for (std::uint64_t a = 0; a < r_; ++a) {
        if (src.test(a, b)) set((a + va) & (r_ - 1), (b + vb) & (r_ - 1));
      }
    }
  }

 private:
  int m_;
  std::uint64_t r_;
  std::vector<std::uint64_t> words_;
};

struct Option {
  std::uint64_t a = 0, b = 0;
  bool flag = false;
  std::size_t value_index = 0;
};

std::vector<std::vector<Option>> variable_options(const AdditiveForm& f, int modulus, PrimitivityMode mode,
                                                  const PowerValueSet& pvs) {
  std::vector<std::vector<Option>> opts(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const RingElem a = f.coeffs[i].with_precision(modulus);
    const bool liftable = mode == PrimitivityMode::kPrimitive || f.level(i) <= modulus - 3;
    std::set<std::tuple<std::uint64_t, std::uint64_t, bool>> seen;
    for (std::size_t v = 0; v < pvs.values.size(); ++v) {
      const RingElem p = a * pvs.values[v].value;
      const bool flag = liftable && pvs.values[v].unit;
      if (seen.insert({p.a(), p.b(), flag}).second) opts[i].push_back({p.a(), p.b(), flag, v});
    }
  }
  return opts;
}

void check_policy(const AdditiveForm& f, int modulus, const OraclePolicy& policy) {
  if (modulus < 1) throw DomainError("oracle modulus must be positive");
  if (modulus > f.precision) {
    throw PrecisionError("precision " + std::to_string(f.precision) + " too low for the oracle modulus 2^" +
                         std::to_string(modulus));
  }
  if (modulus > policy.max_modulus) {
    throw BudgetExceeded("oracle modulus 2^" + std::to_string(modulus) + " exceeds the policy bound 2^" +
                         std::to_string(policy.max_modulus));
  }
  const std::uint64_t states = std::uint64_t{1} << (2 * modulus);
  const std::uint64_t layer_bytes = 2 * std::max<std::uint64_t>(8, states / 8);
  if ((f.size() + 1) * layer_bytes > policy.max_memory_bytes) {
    throw BudgetExceeded("oracle tables exceed the memory budget");
  }
}

std::uint64_t work_estimate(const AdditiveForm& f, int modulus, const PowerValueSet& pvs) {
  const std::uint64_t words = std::max<std::uint64_t>(1, (std::uint64_t{1} << (2 * modulus)) / 64);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const int rem = std::max(0, modulus - f.level(i));
    const std::uint64_t distinct = std::min<std::uint64_t>(pvs.values.size(), std::uint64_t{1} << std::min(62, 2 * rem));
    total += 2 * 2 * distinct * words;
  }
  return total;
}

RingElem root_of(const PowerValue& v, int degree, int modulus) {
  if (v.shift < 0) return RingElem::zero(modulus);
  const int rem = v.unit_part.precision();
  const MultiplierSet& ms = shared_multiplier_set(degree, rem);
  for (const auto& m : ms.reps) {
    if (m.value == v.unit_part) return m.root.with_precision(modulus).shl(v.shift);
  }
  const auto r = dth_root(v.unit_part, degree);
  if (!r) throw InternalError("power value " + v.unit_part.to_string() + " has no d-th root");
  return r->with_precision(modulus).shl(v.shift);
}

}  // namespace

std::vector<RingElem> brute_force_power_values(int degree, int modulus) {
  check_precision(modulus);
  if (modulus > 12) throw BudgetExceeded("brute-force power values limited to M <= 12");
  const std::uint64_t r = std::uint64_t{1} << modulus;
  std::set<Key> seen;
  std::vector<RingElem> out;
  for (std::uint64_t a = 0; a < r; ++a) {
    for (std::uint64_t b = 0; b < r; ++b) {
      const RingElem p = RingElem(a, b, modulus).pow(static_cast<std::uint64_t>(degree));
      if (seen.insert(key_of(p)).second) out.push_back(p);
    }
  }
  return out;
}

PowerValueSet power_value_set(int degree, int modulus) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, PowerValueSet> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({degree, modulus});
    if (it != cache.end()) return it->second;
  }
  PowerValueSet pvs = build_power_value_set(degree, modulus);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(std::make_pair(degree, modulus), std::move(pvs)).first->second;
}

bool oracle_admits(const AdditiveForm& f, const OraclePolicy& policy) {
  const int modulus = f.max_level() + 3;
  try {
    check_policy(f, modulus, policy);
  } catch (const Error&) {
    return false;
  }
  return work_estimate(f, modulus, power_value_set(f.degree, modulus)) <= policy.max_work;
}

ZeroSearch primitive_zero_mod(const AdditiveForm& f, int modulus, PrimitivityMode mode, const OraclePolicy& policy) {
  check_policy(f, modulus, policy);
  const PowerValueSet pvs = power_value_set(f.degree, modulus);
  if (work_estimate(f, modulus, pvs) > policy.max_work) {
    throw BudgetExceeded("oracle work estimate exceeds the policy budget");
  }
  const auto opts = variable_options(f, modulus, mode, pvs);
  const std::size_t n = f.size();
  const std::uint64_t mask = RingElem::mask_for(modulus);

  std::vector<std::array<SumSet, 2>> layers;
  layers.reserve(n + 1);
  layers.push_back({SumSet(modulus), SumSet(modulus)});
  layers[0][0].set(0, 0);
  ZeroSearch result;
  result.states_visited = 1;
  for (std::size_t i = 0; i < n; ++i) {
    std::array<SumSet, 2> next{SumSet(modulus), SumSet(modulus)};
    for (int flag = 0; flag < 2; ++flag) {
      const SumSet& src = layers[i][static_cast<std::size_t>(flag)];
      if (!src.any()) continue;
      for (const Option& o : opts[i]) next[static_cast<std::size_t>(flag | (o.flag ? 1 : 0))].or_translated(src, o.a, o.b);
    }
    result.states_visited += next[0].count() + next[1].count();
    layers.push_back(std::move(next));
  }
  if (!layers[n][1].test(0, 0)) return result;

  ZeroAssignment z;
  z.x.assign(n, RingElem::zero(modulus));
  std::uint64_t ca = 0, cb = 0;
  int cflag = 1;
  bool have_unit = false;
  for (std::size_t i = n; i-- > 0;) {
    bool stepped = false;
    for (const Option& o : opts[i]) {
      for (int pf = 0; pf < 2 && !stepped; ++pf) {
        if ((pf | (o.flag ? 1 : 0)) != cflag) continue;
        const std::uint64_t pa = (ca - o.a) & mask, pb = (cb - o.b) & mask;
        if (!layers[i][static_cast<std::size_t>(pf)].test(pa, pb)) continue;
        const PowerValue& pv = pvs.values[o.value_index];
        z.x[i] = root_of(pv, f.degree, modulus);
        if (o.flag && !have_unit) {
          // The deepest flagged choice on the walk back is the one that
          // raised the flag; any flagged variable works.
          z.unit_index = i;
          have_unit = true;
        }
        ca = pa;
        cb = pb;
        cflag = pf;
        stepped = true;
      }
      if (stepped) break;
    }
    if (!stepped) throw InternalError("oracle backtracking failed");
  }
  if (!have_unit) throw InternalError("oracle zero lacks a flagged unit variable");
  result.zero = std::move(z);
  return result;
}

ExhaustiveDecision decide_isotropy_exhaustive(const AdditiveForm& f, const OraclePolicy& policy) {
  const int modulus = f.max_level() + 3;
  const ZeroSearch zs = primitive_zero_mod(f, modulus, PrimitivityMode::kLiftable, policy);
  ExhaustiveDecision out;
  if (!zs.zero) {
    AnisotropyCertificate cert;
    cert.kind = AnisotropyCertificate::Kind::kExhaustion;
    cert.modulus = modulus;
    cert.states_visited = zs.states_visited;
    out.certificate = cert;
    return out;
  }
  const int k = f.precision;
  const auto ud = static_cast<std::uint64_t>(f.degree);
  Witness w;
  w.primitive_index = zs.zero->unit_index;
  w.target_valuation = k;
  for (const auto& x : zs.zero->x) w.assignment.push_back(x.with_precision(k));
  const std::size_t p = w.primitive_index;
  RingElem rest = RingElem::zero(k);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i != p) rest += f.coeffs[i] * w.assignment[i].pow(ud);
  }
  const RingElem anchor = f.coeffs[p] * w.assignment[p].pow(ud);
  w.assignment[p] = w.assignment[p] * newton_anchor_solve(anchor, f.degree, rest);
  if (!verify_witness(f, w)) throw InternalError("oracle witness failed verification after lifting");
  out.isotropic = true;
  out.witness = std::move(w);
  return out;
}

DescentOutcome descent_certificate(const AdditiveForm& f) {
  const int d = f.degree;
  const std::size_t n = f.size();
  struct VarState {
    int level;
    RingElem unit;  // modulo 4
    bool forced = false;
  };
  std::vector<VarState> vars;
  for (std::size_t i = 0; i < n; ++i) {
    const int lvl = f.level(i);
    if (lvl + 2 > f.precision) throw PrecisionError("descent needs two digits of every coefficient");
    vars.push_back({lvl, f.coeffs[i].exact_shr(lvl).with_precision(2), false});
  }
  const PowerValueSet mod4 = power_value_set(d, 2);
  const PowerValueSet mod2 = power_value_set(d, 1);

  DescentOutcome out;
  AnisotropyCertificate cert;
  cert.kind = AnisotropyCertificate::Kind::kDescent;
  for (std::size_t guard = 0; guard < 4 * n * static_cast<std::size_t>(d) + 4; ++guard) {
    int base = vars[0].level;
    for (const auto& v : vars) base = std::min(base, v.level);
    DescentStep step;
    step.base_level = base;
    struct Choice {
      int state;  // a + 4 b
      bool flag;
      RingElem value;
    };
    std::vector<std::vector<Choice>> choices;
    for (std::size_t i = 0; i < n; ++i) {
      if (vars[i].level >= base + 2) continue;
      step.window.push_back(i);
      std::vector<Choice> cs;
      std::set<std::pair<int, bool>> seen;
      if (vars[i].level == base) {
        step.forced.push_back(i);
        for (const auto& pv : mod4.values) {
          const RingElem c = vars[i].unit * pv.value;
          const int s = static_cast<int>(c.a() + 4 * c.b());
          if (seen.insert({s, pv.unit}).second) cs.push_back({s, pv.unit, pv.value});
        }
      } else {
        for (const auto& pv : mod2.values) {
          const RingElem c = (vars[i].unit.with_precision(1) * pv.value).with_precision(2).shl(1);
          const int s = static_cast<int>(c.a() + 4 * c.b());
          if (seen.insert({s, false}).second) cs.push_back({s, false, pv.value});
        }
      }
      choices.push_back(std::move(cs));
    }
    // 16 residues x flag, one layer per window variable.
    auto add = [](int x, int y) { return (((x & 3) + (y & 3)) & 3) | ((((x >> 2) + (y >> 2)) & 3) << 2); };
    std::vector<std::array<bool, 32>> layers(choices.size() + 1);
    layers[0].fill(false);
    layers[0][0] = true;
    for (std::size_t i = 0; i < choices.size(); ++i) {
      layers[i + 1].fill(false);
      for (int st = 0; st < 32; ++st) {
        if (!layers[i][static_cast<std::size_t>(st)]) continue;
        for (const auto& c : choices[i]) {
          const int flag = (st >> 4) | (c.flag ? 1 : 0);
          layers[i + 1][static_cast<std::size_t>(add(st & 15, c.state) | (flag << 4))] = true;
        }
      }
    }
    const auto& last = layers[choices.size()];
    for (int st = 0; st < 16; ++st) {
      if (last[static_cast<std::size_t>(st)] || last[static_cast<std::size_t>(st | 16)]) {
        step.window_values.emplace_back(static_cast<std::uint64_t>(st & 3), static_cast<std::uint64_t>(st >> 2), 2);
      }
    }
    if (last[16]) {
      // Walk back to one violating assignment.
      std::vector<RingElem> values(choices.size());
      int cur = 16;
      for (std::size_t i = choices.size(); i-- > 0;) {
        bool stepped = false;
        for (const auto& c : choices[i]) {
          for (int pf = 0; pf < 2 && !stepped; ++pf) {
            if ((pf | (c.flag ? 1 : 0)) != (cur >> 4)) continue;
            const int neg = ((4 - (c.state & 3)) & 3) | (((4 - (c.state >> 2)) & 3) << 2);
            const int prev = add(cur & 15, neg) | (pf << 4);
            if (!layers[i][static_cast<std::size_t>(prev)]) continue;
            values[i] = c.value;
            cur = prev;
            stepped = true;
          }
          if (stepped) break;
        }
        if (!stepped) throw InternalError("descent backtracking failed");
      }
      out.failed_step = std::move(step);
      out.violating_values = std::move(values);
      return out;
    }
    for (std::size_t i : step.forced) {
      vars[i].level += d;
      vars[i].forced = true;
    }
    cert.steps.push_back(std::move(step));
    if (std::all_of(vars.begin(), vars.end(), [](const VarState& v) { return v.forced; })) {
      out.certificate = std::move(cert);
      return out;
    }
  }
  throw InternalError("descent did not terminate");
}

bool recheck_anisotropy(const AdditiveForm& f, const AnisotropyCertificate& cert, const OraclePolicy& policy) {
  if (cert.kind == AnisotropyCertificate::Kind::kExhaustion) {
    if (cert.modulus != f.max_level() + 3) return false;
    return !decide_isotropy_exhaustive(f, policy).isotropic;
  }
  const DescentOutcome again = descent_certificate(f);
  if (!again.certificate || again.certificate->steps.size() != cert.steps.size()) return false;
  for (std::size_t i = 0; i < cert.steps.size(); ++i) {
    const auto& a = again.certificate->steps[i];
    const auto& b = cert.steps[i];
    if (a.base_level != b.base_level || a.window != b.window || a.forced != b.forced) return false;
  }
  return true;
}

}  // namespace padicforms
