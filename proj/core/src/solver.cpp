#include "padicforms/solver.hpp"

#include <algorithm>
#include <chrono>

namespace padicforms {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kIsotropic: return "isotropic";
    case Verdict::kAnisotropic: return "anisotropic";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

std::string to_string(Stage s) {
  switch (s) {
    case Stage::kSearch: return "search";
    case Stage::kDescent: return "descent";
    case Stage::kOracle: return "oracle";
    case Stage::kNone: return "none";
  }
  return "unknown";
}

int isotropy_threshold(int degree) {
  check_degree_shape(degree);
  return divisible_by_three(degree) ? 4 * degree + 1 : 3 * degree / 2 + 1;
}

bool verify_witness(const AdditiveForm& f, const Witness& w) {
  if (w.assignment.size() != f.size() || w.primitive_index >= f.size()) return false;
  if (w.target_valuation > f.precision) return false;
  for (const auto& x : w.assignment) {
    if (x.precision() != f.precision) return false;
  }
  const RingElem& xp = w.assignment[w.primitive_index];
  if (!xp.is_unit()) return false;
  if (w.target_valuation < f.level(w.primitive_index) + 3) return false;
  RingElem total = RingElem::zero(f.precision);
  for (std::size_t i = 0; i < f.size(); ++i) {
    total += f.coeffs[i] * w.assignment[i].pow(static_cast<std::uint64_t>(f.degree));
  }
  return total.valuation().at_least(w.target_valuation);
}

Witness lift_witness(const AdditiveForm& f, const ContractionCertificate& cert) {
  const int k = f.precision;
  const auto ud = static_cast<std::uint64_t>(f.degree);
  const MultiplierSet& mults = shared_multiplier_set(f.degree, k);
  Witness w;
  w.assignment.assign(f.size(), RingElem::zero(k));
  w.primitive_index = cert.anchor_leaf;
  w.target_valuation = k;
  for (const auto& [id, root] : cert.leaf_roots(mults)) {
    const VarNode& leaf = cert.node(id);
    w.assignment.at(leaf.leaf_index) = root.shl(leaf.leaf_scale);
  }
  const std::size_t p = cert.anchor_leaf;
  RingElem rest = RingElem::zero(k);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i != p) rest += f.coeffs[i] * w.assignment[i].pow(ud);
  }
  const RingElem anchor = f.coeffs[p] * w.assignment[p].pow(ud);
  w.assignment[p] = w.assignment[p] * newton_anchor_solve(anchor, f.degree, rest);
  return w;
}

Witness map_witness_back(const AdditiveForm& original, const AdditiveForm& derived, const Witness& w) {
  // derived_i = 2^scale * b_i / 2^(d q_i) in the variables y_i = 2^q_i x_i,
  // so x_i = 2^(Q - q_i) y_i solves the original form up to the common
  // factor 2^e removed below.
  const int q_max = *std::max_element(derived.var_shift.begin(), derived.var_shift.end());
  std::vector<RingElem> x;
  int e = derived.precision;
  for (std::size_t i = 0; i < derived.size(); ++i) {
    x.push_back(w.assignment[i].shl(q_max - derived.var_shift[i]));
    const Valuation v = x.back().valuation();
    if (!v.infinite) e = std::min(e, v.value);
  }
  Witness out;
  out.target_valuation = original.precision;
  bool found = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const RingElem xi = x[i].valuation().infinite ? RingElem::zero(derived.precision) : x[i].exact_shr(e);
    out.assignment.push_back(xi.with_precision(original.precision));
    if (!found && out.assignment.back().is_unit()) {
      out.primitive_index = i;
      found = true;
    }
  }
  if (!found) throw InternalError("mapped witness has no unit variable");
  return out;
}

IsotropyResult decide_isotropy(const AdditiveForm& f, const SolverConfig& config) {
  IsotropyResult res;
  auto t0 = Clock::now();
  // Validates the coefficients against the form's own precision first.
  (void)reduce_levels(f);
  int q_all = 0;
  for (std::size_t i = 0; i < f.size(); ++i) q_all = std::max(q_all, f.level(i) / f.degree);
  const int working = f.precision + f.degree * (q_all + 1);
  if (working > kMaxPrecision) {
    throw PrecisionError("working precision " + std::to_string(working) + " exceeds " +
                         std::to_string(kMaxPrecision) + " digits");
  }
  const NormalizedForm nf = normalize(reduce_levels(f.with_precision(working)));
  const AdditiveForm& h = nf.form;
  res.working_form = h;
  res.above_threshold = static_cast<int>(f.size()) >= isotropy_threshold(f.degree);
  res.timings.normalize_ms = ms_since(t0);

  t0 = Clock::now();
  const SearchOutcome so = search_certificate(h, config.search);
  res.search_nodes = so.nodes_explored;
  res.timings.search_ms = ms_since(t0);
  if (so.status == SearchStatus::kFound) {
    const ValidationResult v = validate_certificate(h, *so.certificate);
    if (!v.ok) throw InternalError("search produced an invalid certificate: " + v.reason);
    const Witness w = map_witness_back(f, h, lift_witness(h, *so.certificate));
    if (!verify_witness(f, w)) throw InternalError("lifted witness failed verification");
    res.verdict = Verdict::kIsotropic;
    res.stage = Stage::kSearch;
    res.witness = w;
    res.certificate = so.certificate;
    return res;
  }
  if (so.status == SearchStatus::kBudgetExhausted) res.diagnostics = "certificate search exhausted its budget; ";

  if (config.use_descent) {
    t0 = Clock::now();
    DescentOutcome dc = descent_certificate(h);
    res.timings.descent_ms = ms_since(t0);
    if (dc.certificate) {
      res.verdict = Verdict::kAnisotropic;
      res.stage = Stage::kDescent;
      res.anisotropy = std::move(dc.certificate);
      return res;
    }
  }

  if (config.use_oracle && oracle_admits(h, config.oracle)) {
    t0 = Clock::now();
    ExhaustiveDecision ex = decide_isotropy_exhaustive(h, config.oracle);
    res.timings.oracle_ms = ms_since(t0);
    res.stage = Stage::kOracle;
    if (ex.isotropic) {
      const Witness w = map_witness_back(f, h, *ex.witness);
      if (!verify_witness(f, w)) throw InternalError("oracle witness failed verification in the input frame");
      res.verdict = Verdict::kIsotropic;
      res.witness = w;
    } else {
      res.verdict = Verdict::kAnisotropic;
      res.anisotropy = std::move(ex.certificate);
    }
    return res;
  }

  res.diagnostics += "no certificate found, descent inconclusive, oracle outside its policy";
  if (res.above_threshold) res.diagnostics += " (form is above the isotropy threshold)";
  return res;
}

}  // namespace padicforms
