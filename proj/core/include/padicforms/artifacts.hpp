#pragma once

// Witness forms for the lower bounds, the descent verifier, lemma sweeps and
// the Gamma* sampling harness.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "padicforms/solver.hpp"

namespace padicforms {

enum class NamedForm { kG, kH, kF, kI };

NamedForm parse_named_form(std::string_view name);
std::string to_string(NamedForm f);

/// 2^level * unit * (inner form).
struct Block {
  int level = 0;
  RingElem unit;
  std::vector<RingElem> inner;
};

struct BlockForm {
  NamedForm name = NamedForm::kG;
  std::vector<Block> blocks;
  AdditiveForm form;
};

/// G = x^d + y^d + w z^d, F = x^d + y^d + z^d,
/// H = sum_{i < d/2} 2^(2i) G, I = sum_{i < d/3} 2^(3i) F + 2^(3i+1) w F + 2^(3i+2) (1+w) F.
/// I needs 3 | d. Precision 0 selects d + 4.
BlockForm build_named_form(NamedForm name, int degree, int precision = 0);

/// Generic window descent on the assembled form.
DescentOutcome verify_descent(const BlockForm& f);

enum class SweepMode { kExhaustive, kSampled };
std::string to_string(SweepMode m);

struct LemmaSpec {
  std::string id;
  TypeDescriptor type;
  /// Degrees the acceptance sweeps use.
  std::vector<int> degrees;
  SweepMode default_mode = SweepMode::kSampled;
  std::string statement;
};

const std::vector<LemmaSpec>& lemma_registry();
/// Throws DomainError for unknown ids.
const LemmaSpec& find_lemma(std::string_view id);

/// Number of configurations in a lemma's sweep space: multisets of digit
/// profiles per slot, stacked levels with one fixed class labeling.
std::uint64_t sweep_space_size(const TypeDescriptor& type);

struct SweepOptions {
  SweepMode mode = SweepMode::kExhaustive;
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 42;
  int threads = 0;    ///< 0: PADIC_FORMS_THREADS or hardware concurrency
  int precision = 0;  ///< 0: d + 4
  SearchConfig search;
  std::size_t max_recorded_failures = 100;
  /// Digits a failing configuration may learn per variable before it counts
  /// as a failure; 0 disables escalation.
  int max_extra_digits = 2;
  /// Searches allowed per escalated configuration.
  std::uint64_t escalation_budget = 1'000'000;
};

struct SweepReport {
  std::string lemma;
  int degree = 0;
  std::string type;
  SweepMode mode = SweepMode::kExhaustive;
  std::uint64_t space = 0;
  std::uint64_t configurations = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t failure_count = 0;
  std::uint64_t budget_exhausted = 0;
  /// Configurations that needed digits beyond the base depth, and the most
  /// extra digits any variable needed.
  std::uint64_t escalated = 0;
  int extra_digits = 0;
  /// "index: coeff@level, ..." for the first failures, by index.
  std::vector<std::string> failures;
  double seconds = 0;

  bool passed() const { return failure_count == 0 && budget_exhausted == 0; }
};

SweepReport sweep_lemma(const LemmaSpec& lemma, int degree, const SweepOptions& options);

/// The leaves of one sweep configuration (for reproducing failures).
std::vector<SearchLeaf> sweep_configuration(const TypeDescriptor& type, int degree, int precision,
                                            std::uint64_t index);

/// Uniform levels in [0, d) times uniform units modulo 2^K.
AdditiveForm random_form(std::mt19937_64& rng, int degree, int s, int precision);

struct GammaStats {
  int degree = 0;
  int s = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t isotropic = 0;
  std::uint64_t anisotropic = 0;
  std::uint64_t inconclusive = 0;
  std::uint64_t witness_failures = 0;
  /// Anisotropic samples with s > 3d (archived), then the first few
  /// anisotropic samples of any size.
  std::vector<AdditiveForm> archived;
  std::vector<AdditiveForm> anisotropic_examples;
  double seconds = 0;
};

/// Trial t uses a generator seeded with (seed, t).
GammaStats gamma_experiment(int degree, int s, std::uint64_t trials, std::uint64_t seed,
                            const SolverConfig& config = {}, int precision = 0);

struct ReproduceRow {
  std::string item;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct ReproduceOptions {
  std::uint64_t seed = 42;
  std::uint64_t trials = 1000;
  std::uint64_t samples = 100'000;
};

/// Lower-bound forms, descent, oracle cross-checks, lemma sweeps and the
/// upper-bound sampling for one degree.
std::vector<ReproduceRow> reproduce(int degree, const ReproduceOptions& options,
                                    const std::function<void(const ReproduceRow&)>& on_row = {});

/// PADIC_FORMS_THREADS if set and positive, else hardware concurrency.
int worker_count();

/// Runs body(i) for i in [0, n) on `threads` workers (dynamic chunks).
void parallel_for(std::uint64_t n, int threads, const std::function<void(std::uint64_t)>& body);

}  // namespace padicforms
