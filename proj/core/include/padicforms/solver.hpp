#pragma once

#include <optional>
#include <string>

#include "padicforms/engine.hpp"
#include "padicforms/oracle.hpp"
#include "padicforms/witness.hpp"

namespace padicforms {

enum class Verdict { kIsotropic, kAnisotropic, kInconclusive };
enum class Stage { kSearch, kDescent, kOracle, kNone };

std::string to_string(Verdict v);
std::string to_string(Stage s);

struct SolverConfig {
  SearchConfig search;
  OraclePolicy oracle;
  bool use_descent = true;
  bool use_oracle = true;
};

struct StageTimings {
  double normalize_ms = 0;
  double search_ms = 0;
  double descent_ms = 0;
  double oracle_ms = 0;
};

struct IsotropyResult {
  Verdict verdict = Verdict::kInconclusive;
  Stage stage = Stage::kNone;
  /// In the input form's frame, at its precision.
  std::optional<Witness> witness;
  /// Certificates refer to `working_form` (reduced, normalized, widened).
  std::optional<ContractionCertificate> certificate;
  std::optional<AnisotropyCertificate> anisotropy;
  AdditiveForm working_form;
  /// s >= 4d + 1 (3 | d) or s >= 3d/2 + 1 (3 does not divide d).
  bool above_threshold = false;
  std::uint64_t search_nodes = 0;
  std::string diagnostics;
  StageTimings timings;
};

/// Variable count from which every form is isotropic.
int isotropy_threshold(int degree);

/// reduce + normalize, then certificate search, descent, oracle.
IsotropyResult decide_isotropy(const AdditiveForm& f, const SolverConfig& config = {});

/// Leaf variables get their multiplier roots (times 2 for wrapped leaves),
/// the rest 0; the anchor is corrected by Newton so the total vanishes
/// modulo 2^K. Requires a certificate that validates against f.
Witness lift_witness(const AdditiveForm& f, const ContractionCertificate& cert);

/// Maps a witness of `derived` (obtained from `original` by reduce_levels
/// and cyclic_shift at a wider precision) back to `original`'s frame.
Witness map_witness_back(const AdditiveForm& original, const AdditiveForm& derived, const Witness& w);

}  // namespace padicforms
