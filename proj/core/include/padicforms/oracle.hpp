#pragma once

// Exhaustive decision procedure: a form is isotropic iff it has a zero
// modulo 2^M, M = max level + 3, in which a variable with coefficient level
// <= M - 3 takes a unit value. Sums are tracked by a bitset DP over O/2^M.

#include <cstdint>
#include <optional>
#include <vector>

#include "padicforms/forms.hpp"
#include "padicforms/witness.hpp"

namespace padicforms {

/// One value x^d mod 2^M, with x = 2^shift * u (u a unit) or x = 0.
struct PowerValue {
  RingElem value;      ///< precision M
  bool unit = false;   ///< x is a unit
  int shift = -1;      ///< -1 for x = 0
  RingElem unit_part;  ///< u^d modulo 2^(M - shift d)
};

struct PowerValueSet {
  int degree = 0;
  int modulus = 0;
  std::vector<PowerValue> values;  ///< zero first, then by shift
};

/// {x^d mod 2^M : x in O}, built from the multiplier reps times 1 + 8 O and
/// scaled by 2^(j d). Cross-checked by brute force when 4^M <= 10^6.
PowerValueSet power_value_set(int degree, int modulus);

/// Direct enumeration of x^d over all 4^M residues.
std::vector<RingElem> brute_force_power_values(int degree, int modulus);

struct OraclePolicy {
  int max_modulus = 10;
  /// Bound on 64-bit word operations for the whole DP.
  std::uint64_t max_work = 8'000'000'000ULL;
  std::uint64_t max_memory_bytes = 1ULL << 30;
};

enum class PrimitivityMode {
  kLiftable,   ///< the unit variable's coefficient level must be <= M - 3
  kPrimitive,  ///< any unit variable counts (plain primitive zeros)
};

struct ZeroAssignment {
  std::vector<RingElem> x;  ///< precision M
  std::size_t unit_index = 0;
};

struct ZeroSearch {
  std::optional<ZeroAssignment> zero;
  std::uint64_t states_visited = 0;
};

/// Throws BudgetExceeded when the instance exceeds the policy and
/// PrecisionError when M exceeds the form's precision.
ZeroSearch primitive_zero_mod(const AdditiveForm& f, int modulus, PrimitivityMode mode = PrimitivityMode::kLiftable,
                              const OraclePolicy& policy = {});

/// True iff the policy admits the exhaustive decision for f.
bool oracle_admits(const AdditiveForm& f, const OraclePolicy& policy = {});

/// One descent step: variables below base + 2 admit no zero modulo
/// 2^(base + 2) with a base-level variable a unit, so the base-level
/// variables are even.
struct DescentStep {
  int base_level = 0;
  std::vector<std::size_t> window;
  std::vector<std::size_t> forced;
  /// Every achievable window sum divided by 2^base, modulo 4, sorted.
  std::vector<RingElem> window_values;
};

struct AnisotropyCertificate {
  enum class Kind { kExhaustion, kDescent };
  Kind kind = Kind::kExhaustion;
  int modulus = 0;
  std::uint64_t states_visited = 0;
  std::vector<DescentStep> steps;
};

struct ExhaustiveDecision {
  bool isotropic = false;
  std::optional<Witness> witness;
  std::optional<AnisotropyCertificate> certificate;
};

/// Runs primitive_zero_mod at M = max level + 3 and Newton-lifts a found
/// zero to a witness at the form's precision.
ExhaustiveDecision decide_isotropy_exhaustive(const AdditiveForm& f, const OraclePolicy& policy = {});

struct DescentOutcome {
  std::optional<AnisotropyCertificate> certificate;
  /// On failure: the step that admitted a zero and one violating
  /// assignment of power values modulo 4 (per window variable).
  std::optional<DescentStep> failed_step;
  std::vector<RingElem> violating_values;
};

/// Generic window descent. Repeats until every variable has been forced
/// even at least once, which proves anisotropy.
DescentOutcome descent_certificate(const AdditiveForm& f);

/// Re-derives an anisotropy certificate from scratch.
bool recheck_anisotropy(const AdditiveForm& f, const AnisotropyCertificate& cert, const OraclePolicy& policy = {});

}  // namespace padicforms
