#include "padicforms/artifacts.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

namespace padicforms {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("PADIC_FORMS_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

void parallel_for(std::uint64_t n, int threads, const std::function<void(std::uint64_t)>& body) {
  if (threads <= 1 || n < 2) {
    for (std::uint64_t i = 0; i < n; ++i) body(i);
    return;
  }
  constexpr std::uint64_t kChunk = 256;
  std::atomic<std::uint64_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    try {
      while (true) {
        const std::uint64_t start = next.fetch_add(kChunk);
        if (start >= n) return;
        const std::uint64_t stop = std::min(n, start + kChunk);
        for (std::uint64_t i = start; i < stop; ++i) body(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mu);
      if (!err) err = std::current_exception();
      next.store(n);
    }
  };
  std::vector<std::thread> pool;
  const auto count = static_cast<std::uint64_t>(threads) < n ? threads : static_cast<int>(n);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

NamedForm parse_named_form(std::string_view name) {
  if (name == "G") return NamedForm::kG;
  if (name == "H") return NamedForm::kH;
  if (name == "F") return NamedForm::kF;
  if (name == "I") return NamedForm::kI;
  throw ParseError("unknown form name '" + std::string(name) + "' (expected G, H, F or I)");
}

std::string to_string(NamedForm f) {
  switch (f) {
    case NamedForm::kG: return "G";
    case NamedForm::kH: return "H";
    case NamedForm::kF: return "F";
    case NamedForm::kI: return "I";
  }
  return "?";
}

BlockForm build_named_form(NamedForm name, int degree, int precision) {
  check_degree_shape(degree);
  const int k = precision == 0 ? default_precision(degree) : precision;
  check_precision(k);
  const RingElem one = RingElem::one(k), w = RingElem::w(k), w1 = one + w;
  const std::vector<RingElem> g{one, one, w};
  const std::vector<RingElem> f{one, one, one};
  BlockForm out;
  out.name = name;
  switch (name) {
    case NamedForm::kG: out.blocks.push_back({0, one, g}); break;
    case NamedForm::kF: out.blocks.push_back({0, one, f}); break;
    case NamedForm::kH:
      for (int i = 0; i < degree / 2; ++i) out.blocks.push_back({2 * i, one, g});
      break;
    case NamedForm::kI:
      if (!divisible_by_three(degree)) throw DomainError("form I needs 3 | d");
      for (int i = 0; i < degree / 3; ++i) {
        out.blocks.push_back({3 * i, one, f});
        out.blocks.push_back({3 * i + 1, w, f});
        out.blocks.push_back({3 * i + 2, w1, f});
      }
      break;
  }
  std::vector<RingElem> coeffs;
  for (const auto& b : out.blocks) {
    if (b.level + 3 > k) throw PrecisionError("precision too low for block level " + std::to_string(b.level));
    for (const auto& c : b.inner) coeffs.push_back((b.unit * c).shl(b.level));
  }
  out.form = AdditiveForm(degree, k, std::move(coeffs));
  return out;
}

DescentOutcome verify_descent(const BlockForm& f) {
  if (f.blocks.empty()) throw DomainError("verify_descent needs a block structure");
  return descent_certificate(f.form);
}

std::string to_string(SweepMode m) { return m == SweepMode::kExhaustive ? "exhaustive" : "sampled"; }

const std::vector<LemmaSpec>& lemma_registry() {
  static const std::vector<LemmaSpec> registry = [] {
    std::vector<LemmaSpec> r;
    auto add = [&](std::string id, std::string type, std::vector<int> degrees, SweepMode mode, std::string what) {
      r.push_back({std::move(id), TypeDescriptor::parse(type), std::move(degrees), mode, std::move(what)});
    };
    const auto ex = SweepMode::kExhaustive;
    const auto sa = SweepMode::kSampled;
    add("223", "2/2/3", {6}, ex, "two, two and three variables in the three classes of one level");
    add("133", "1/3/3", {6}, ex, "one, three and three variables in the three classes of one level");
    add("115", "1/1/5", {6}, ex, "one, one and five variables in the three classes of one level");
    add("044", "0/4/4", {6}, ex, "four and four variables in two classes of one level");
    add("025", "0/2/5", {6}, ex, "two and five variables in two classes of one level");
    add("007", "0/0/7", {6}, ex, "seven variables in one class of one level");
    add("eight", "8", {6}, sa, "eight variables in one level");
    add("0061", "0/0/6,1", {6, 10}, sa, "six in one class, one variable a level up");
    add("0241", "0/2/4,1", {6, 10}, sa, "two and four in two classes, one variable a level up");
    add("0225", "0/2/2,5", {6, 10}, sa, "two and two in two classes, five variables a level up");
    add("0045", "0/0/4,5", {6, 10}, sa, "four in one class, five variables a level up");
    add("541", "5,4,1", {6, 10}, sa, "five, four and one variables in three consecutive levels");
    add("211", "2,1,1", {10}, sa, "two, one and one variables in three consecutive levels (3 does not divide d)");
    add("31", "3,1", {10}, sa, "three and one variables in two consecutive levels (3 does not divide d)");
    add("5", "5", {10}, sa, "five variables in one level (3 does not divide d)");
    add("401", "4,0,1", {10}, sa, "four variables in one level, one variable two levels up (3 does not divide d)");
    add("23", "2,3", {10}, sa, "two and three variables in two consecutive levels (3 does not divide d)");
    return r;
  }();
  return registry;
}

const LemmaSpec& find_lemma(std::string_view id) {
  for (const auto& l : lemma_registry()) {
    if (l.id == id) return l;
  }
  throw DomainError("unknown lemma '" + std::string(id) + "'");
}

namespace {

// One multiset slot of a sweep: `count` variables at `level`, each with a
// digit profile to `depth` digits; fixed-class slots only vary the digits
// after the leading one.
struct Slot {
  int level = 0;
  int depth = 0;
  bool fixed = false;
  F4Class cls;
  int count = 0;
  int profiles = 0;
};

std::vector<Slot> sweep_slots(const TypeDescriptor& type) {
  if (type.levels.size() > 3) throw DomainError("sweeps support at most three consecutive levels");
  // Stacked slots a, b, c take classes w, 1 + w, 1: any labeling is carried
  // to this one by multiplying by a cube root of unity and conjugating.
  static constexpr std::array<F4Class, 3> kCanonical{F4Class::w(), F4Class::w1(), F4Class::one()};
  std::vector<Slot> slots;
  for (std::size_t j = 0; j < type.levels.size(); ++j) {
    const int depth = 3 - static_cast<int>(j);
    const int digits = 1 << (2 * (depth - 1));
    const auto& req = type.levels[j];
    if (req.stacked) {
      for (int c = 0; c < 3; ++c) {
        if (req.class_counts[static_cast<std::size_t>(c)] == 0) continue;
        slots.push_back({static_cast<int>(j), depth, true, kCanonical[static_cast<std::size_t>(c)],
                         req.class_counts[static_cast<std::size_t>(c)], digits});
      }
    } else if (req.count > 0) {
      slots.push_back({static_cast<int>(j), depth, false, F4Class::one(), req.count, 3 * digits});
    }
  }
  return slots;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

std::uint64_t multiset_count(int profiles, int count) { return binomial(profiles + count - 1, count); }

// The rank-th non-decreasing sequence of `count` profiles, in lexicographic
// order.
void unrank_multiset(std::uint64_t rank, int profiles, int count, std::vector<int>& out) {
  out.clear();
  int v = 0;
  for (int r = count; r > 0; --r) {
    while (true) {
      const std::uint64_t with_v = multiset_count(profiles - v, r - 1);
      if (rank < with_v) break;
      rank -= with_v;
      ++v;
    }
    out.push_back(v);
  }
}

PartialValue profile_value(const Slot& slot, int profile, int precision) {
  F4Class cls = slot.cls;
  int digits = profile;
  if (!slot.fixed) {
    cls = F4Class::nonzero(profile % 3);
    digits = profile / 3;
  }
  RingElem u = RingElem::lift(cls, precision);
  for (int i = 1; i < slot.depth; ++i) {
    u += RingElem::lift(F4Class::from_bits(static_cast<unsigned>(digits & 3)), precision).shl(i);
    digits >>= 2;
  }
  return PartialValue(u.shl(slot.level), slot.level + slot.depth);
}

struct SweepSpace {
  std::vector<Slot> slots;
  std::vector<std::uint64_t> sizes;
  std::uint64_t total = 1;

  explicit SweepSpace(const TypeDescriptor& type) : slots(sweep_slots(type)) {
    for (const auto& s : slots) {
      sizes.push_back(multiset_count(s.profiles, s.count));
      total *= sizes.back();
    }
  }

  void leaves(std::uint64_t index, int precision, std::vector<SearchLeaf>& out) const {
    out.clear();
    std::size_t var = 0;
    std::vector<int> picks;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      unrank_multiset(index % sizes[k], slots[k].profiles, slots[k].count, picks);
      index /= sizes[k];
      for (int p : picks) out.push_back({var++, profile_value(slots[k], p, precision)});
    }
  }
};

// Refines failing configurations one digit at a time, least refined
// variable first, until every branch has a certificate.
struct Escalation {
  int degree;
  int precision;
  const SweepOptions& options;
  std::vector<int> base_known;
  std::uint64_t searches = 0;
  int deepest = 0;

  SearchStatus run(std::vector<SearchLeaf>& leaves) {
    if (++searches > options.escalation_budget) return SearchStatus::kBudgetExhausted;
    const SearchOutcome out = search_certificate(degree, precision, leaves, options.search);
    if (out.status == SearchStatus::kFound) return out.status;
    std::size_t pick = leaves.size();
    int pick_extra = options.max_extra_digits;
    // Highest level first among the least refined.
    for (std::size_t i = leaves.size(); i-- > 0;) {
      const int extra = leaves[i].coeff.known() - base_known[i];
      if (extra < pick_extra && leaves[i].coeff.known() < precision) {
        pick = i;
        pick_extra = extra;
      }
    }
    if (pick == leaves.size()) return out.status == SearchStatus::kBudgetExhausted ? out.status : SearchStatus::kNotFound;
    const PartialValue old = leaves[pick].coeff;
    deepest = std::max(deepest, pick_extra + 1);
    SearchStatus status = SearchStatus::kFound;
    for (unsigned digit = 0; digit < 4 && status == SearchStatus::kFound; ++digit) {
      const RingElem bit = RingElem::lift(F4Class::from_bits(digit), precision).shl(old.known());
      leaves[pick].coeff = PartialValue(old.value() + bit, old.known() + 1);
      status = run(leaves);
    }
    leaves[pick].coeff = old;
    return status;
  }
};

std::string encode(std::uint64_t index, const std::vector<SearchLeaf>& leaves) {
  std::ostringstream os;
  os << index << ':';
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    os << (i == 0 ? " " : ", ") << leaves[i].coeff.value().to_string() << " mod 2^" << leaves[i].coeff.known();
  }
  return os.str();
}

}  // namespace

std::uint64_t sweep_space_size(const TypeDescriptor& type) {
  std::uint64_t total = 1;
  for (const auto& s : sweep_slots(type)) total *= multiset_count(s.profiles, s.count);
  return total;
}

std::vector<SearchLeaf> sweep_configuration(const TypeDescriptor& type, int degree, int precision,
                                            std::uint64_t index) {
  const SweepSpace space(type);
  if (index >= space.total) throw DomainError("sweep configuration index out of range");
  std::vector<SearchLeaf> leaves;
  space.leaves(index, precision == 0 ? default_precision(degree) : precision, leaves);
  return leaves;
}

SweepReport sweep_lemma(const LemmaSpec& lemma, int degree, const SweepOptions& options) {
  check_degree_shape(degree);
  const auto t0 = Clock::now();
  const SweepSpace space(lemma.type);
  const int precision = options.precision == 0 ? default_precision(degree) : options.precision;
  SweepReport rep;
  rep.lemma = lemma.id;
  rep.degree = degree;
  rep.type = lemma.type.to_string();
  rep.mode = options.mode;
  rep.space = space.total;
  rep.seed = options.seed;
  const bool exhaustive = options.mode == SweepMode::kExhaustive;
  const std::uint64_t n = exhaustive ? space.total : options.samples;
  rep.samples = exhaustive ? 0 : n;

  std::atomic<std::uint64_t> failures{0}, exhausted{0}, escalated{0};
  std::atomic<int> deepest{0};
  std::mutex mu;
  std::vector<std::pair<std::uint64_t, std::string>> recorded;
  const int threads = options.threads > 0 ? options.threads : worker_count();
  thread_local std::vector<SearchLeaf> leaves;
  parallel_for(n, threads, [&](std::uint64_t i) {
    std::uint64_t index = i;
    if (!exhaustive) {
      std::seed_seq seq{options.seed, i};
      std::mt19937_64 rng(seq);
      index = std::uniform_int_distribution<std::uint64_t>(0, space.total - 1)(rng);
    }
    space.leaves(index, precision, leaves);
    const SearchOutcome out = search_certificate(degree, precision, leaves, options.search);
    if (out.status == SearchStatus::kFound) return;
    SearchStatus status = out.status;
    if (options.max_extra_digits > 0) {
      Escalation esc{degree, precision, options, {}};
      for (const auto& l : leaves) esc.base_known.push_back(l.coeff.known());
      status = esc.run(leaves);
      escalated.fetch_add(1);
      int seen = deepest.load();
      while (esc.deepest > seen && !deepest.compare_exchange_weak(seen, esc.deepest)) {
      }
      if (status == SearchStatus::kFound) return;
    }
    (status == SearchStatus::kBudgetExhausted ? exhausted : failures).fetch_add(1);
    std::lock_guard<std::mutex> lock(mu);
    recorded.emplace_back(index, encode(index, leaves));
  });
  std::sort(recorded.begin(), recorded.end());
  for (std::size_t i = 0; i < recorded.size() && i < options.max_recorded_failures; ++i) {
    rep.failures.push_back(recorded[i].second);
  }
  rep.configurations = n;
  rep.failure_count = failures.load();
  rep.budget_exhausted = exhausted.load();
  rep.escalated = escalated.load();
  rep.extra_digits = deepest.load();
  rep.seconds = seconds_since(t0);
  return rep;
}

AdditiveForm random_form(std::mt19937_64& rng, int degree, int s, int precision) {
  std::uniform_int_distribution<int> level(0, degree - 1);
  std::vector<RingElem> coeffs;
  for (int i = 0; i < s; ++i) {
    RingElem u;
    do {
      u = RingElem(rng(), rng(), precision);
    } while (!u.is_unit());
    coeffs.push_back(u.shl(level(rng)));
  }
  return AdditiveForm(degree, precision, std::move(coeffs));
}

GammaStats gamma_experiment(int degree, int s, std::uint64_t trials, std::uint64_t seed, const SolverConfig& config,
                            int precision) {
  const auto t0 = Clock::now();
  const int k = precision == 0 ? default_precision(degree) : precision;
  GammaStats stats;
  stats.degree = degree;
  stats.s = s;
  stats.trials = trials;
  stats.seed = seed;
  std::atomic<std::uint64_t> iso{0}, aniso{0}, inc{0}, bad{0};
  std::mutex mu;
  std::vector<std::pair<std::uint64_t, AdditiveForm>> archived, examples;
  parallel_for(trials, worker_count(), [&](std::uint64_t t) {
    std::seed_seq seq{seed, t};
    std::mt19937_64 rng(seq);
    const AdditiveForm f = random_form(rng, degree, s, k);
    const IsotropyResult r = decide_isotropy(f, config);
    switch (r.verdict) {
      case Verdict::kIsotropic:
        iso.fetch_add(1);
        if (!r.witness || !verify_witness(f, *r.witness)) bad.fetch_add(1);
        break;
      case Verdict::kAnisotropic: {
        aniso.fetch_add(1);
        std::lock_guard<std::mutex> lock(mu);
        if (s > 3 * degree) archived.emplace_back(t, f);
        examples.emplace_back(t, f);
        break;
      }
      case Verdict::kInconclusive: inc.fetch_add(1); break;
    }
  });
  auto by_trial = [](const auto& x, const auto& y) { return x.first < y.first; };
  std::sort(archived.begin(), archived.end(), by_trial);
  std::sort(examples.begin(), examples.end(), by_trial);
  for (auto& [t, f] : archived) stats.archived.push_back(std::move(f));
  for (std::size_t i = 0; i < examples.size() && i < 5; ++i) stats.anisotropic_examples.push_back(examples[i].second);
  stats.isotropic = iso.load();
  stats.anisotropic = aniso.load();
  stats.inconclusive = inc.load();
  stats.witness_failures = bad.load();
  stats.seconds = seconds_since(t0);
  return stats;
}

std::vector<ReproduceRow> reproduce(int degree, const ReproduceOptions& options,
                                    const std::function<void(const ReproduceRow&)>& on_row) {
  check_degree_shape(degree);
  std::vector<ReproduceRow> rows;
  auto emit = [&](std::string item, auto&& check) {
    const auto t0 = Clock::now();
    ReproduceRow row;
    row.item = std::move(item);
    try {
      std::tie(row.passed, row.detail) = check();
    } catch (const std::exception& e) {
      row.passed = false;
      row.detail = std::string("error: ") + e.what();
    }
    row.seconds = seconds_since(t0);
    if (on_row) on_row(row);
    rows.push_back(std::move(row));
  };
  const std::string dstr = std::to_string(degree);

  emit("G has no primitive zero modulo 4 (d=" + dstr + ")", [&] {
    const BlockForm g = build_named_form(NamedForm::kG, degree);
    const bool none = !primitive_zero_mod(g.form, 2, PrimitivityMode::kPrimitive).zero;
    return std::make_pair(none, std::string(none ? "no primitive zero" : "primitive zero found"));
  });
  const BlockForm h = build_named_form(NamedForm::kH, degree);
  emit("H anisotropic by descent, s = 3d/2 = " + std::to_string(h.form.size()), [&] {
    const DescentOutcome out = verify_descent(h);
    return std::make_pair(out.certificate.has_value(),
                          out.certificate ? std::to_string(out.certificate->steps.size()) + " descent steps"
                                          : std::string("descent admitted a zero"));
  });
  if (oracle_admits(h.form)) {
    emit("H anisotropic by exhaustion", [&] {
      const ExhaustiveDecision ex = decide_isotropy_exhaustive(h.form);
      return std::make_pair(!ex.isotropic, ex.isotropic ? std::string("oracle found a zero")
                                                        : "no liftable zero modulo 2^" +
                                                              std::to_string(ex.certificate->modulus));
    });
  }
  if (divisible_by_three(degree)) {
    emit("I anisotropic by descent, s = 3d = " + std::to_string(3 * degree), [&] {
      const DescentOutcome out = verify_descent(build_named_form(NamedForm::kI, degree));
      if (!out.certificate) return std::make_pair(false, std::string("descent admitted a zero"));
      // {0, 1, 2, 3} + 2w {0, 1}
      std::vector<std::pair<std::uint64_t, std::uint64_t>> got, want;
      for (const auto& v : out.certificate->steps.front().window_values) got.emplace_back(v.a(), v.b());
      for (std::uint64_t a = 0; a < 4; ++a) {
        for (std::uint64_t b : {0, 2}) want.emplace_back(a, b);
      }
      std::sort(got.begin(), got.end());
      std::sort(want.begin(), want.end());
      return std::make_pair(got == want, std::string(got == want ? "first window values {0,1,2,3} + 2w{0,1}"
                                                                 : "first window values differ"));
    });
  }
  for (const auto& lemma : lemma_registry()) {
    if (std::find(lemma.degrees.begin(), lemma.degrees.end(), degree) == lemma.degrees.end()) continue;
    emit("lemma " + lemma.id + " (" + lemma.type.to_string() + ")", [&] {
      SweepOptions opts;
      opts.mode = lemma.default_mode;
      opts.samples = options.samples;
      opts.seed = options.seed;
      const SweepReport rep = sweep_lemma(lemma, degree, opts);
      return std::make_pair(rep.passed(), to_string(rep.mode) + ", " + std::to_string(rep.configurations) +
                                              " configurations, " + std::to_string(rep.failure_count) +
                                              " failures");
    });
  }
  const int s = isotropy_threshold(degree);
  emit("upper bound: s = " + std::to_string(s) + " forms isotropic", [&] {
    const GammaStats g = gamma_experiment(degree, s, options.trials, options.seed);
    const bool ok = g.isotropic == g.trials && g.witness_failures == 0;
    return std::make_pair(ok, std::to_string(g.isotropic) + "/" + std::to_string(g.trials) + " isotropic, " +
                                  std::to_string(g.inconclusive) + " inconclusive");
  });
  return rows;
}

}  // namespace padicforms
