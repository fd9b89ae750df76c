#pragma once

// Contraction calculus. A contraction replaces the terms a_i x_i^d (i in S)
// by b y^d, b = sum a_i m_i with m_i unit d-th powers. A contraction tree
// whose root reaches level >= k + 3, where k is the lowest leaf level, gives
// a nontrivial zero by Hensel's lemma.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "padicforms/forms.hpp"
#include "padicforms/ring.hpp"

namespace padicforms {

/// A coefficient trusted only modulo 2^known.
class PartialValue {
 public:
  PartialValue() = default;
  PartialValue(RingElem value, int known);
  static PartialValue exact(const RingElem& value) { return {value, value.precision()}; }

  const RingElem& value() const { return value_; }
  int known() const { return known_; }

  /// Known precision is the minimum of the operands'.
  friend PartialValue operator+(const PartialValue& x, const PartialValue& y);
  /// Multiplication by an exact unit keeps the known precision.
  PartialValue times_unit(const RingElem& unit) const;
  /// Multiplication by 2^n raises the known precision by n.
  PartialValue shl(int n) const;

  /// Level when the valuation is determined below `known`, else nullopt
  /// (the value is only known to lie at level >= known).
  std::optional<int> level() const;
  /// Class of the leading digit; requires a resolved level.
  F4Class leading_class() const;
  /// True iff the value is known to vanish modulo 2^n.
  bool vanishes_to(int n) const;

 private:
  RingElem value_;
  int known_ = 0;
};

struct MultiplierChoice {
  int class_index = 0;
  int epsilon = 0;
  friend bool operator==(const MultiplierChoice&, const MultiplierChoice&) = default;
};

enum class NodeKind { kLeaf, kContraction };

/// Named move shapes.
enum class MoveKind {
  kPair,               ///< two nodes whose classes cancel
  kSameClassPair,      ///< pair in one 0,1-class: lands in the same class one level up
  kComplementaryPair,  ///< pair landing at least two levels up
  kTriplet,            ///< one node in each nonzero class
  kQuadruplet,         ///< two pairs landing in one class, contracted again
  kCrossClass,         ///< two classes contracted to the third class in the same level
  kFiveInClassSplit,   ///< two pairs from five same-class nodes landing in distinct classes
  kAmongThree,         ///< pair from three same-class nodes going exactly one level up
};

std::string to_string(MoveKind kind);

struct VarNode {
  int id = 0;
  NodeKind kind = NodeKind::kLeaf;
  PartialValue coeff;
  /// nullopt: unresolved, level >= coeff.known().
  std::optional<int> level;
  /// Leaf: original variable index; the leaf stands for the term
  /// a_i (2^leaf_scale x)^d, i.e. coefficient a_i * 2^(d * leaf_scale).
  std::size_t leaf_index = 0;
  int leaf_scale = 0;
  /// Contraction: children and the multiplier applied to each.
  std::vector<int> children;
  std::vector<MultiplierChoice> choices;
  MoveKind move = MoveKind::kPair;
};

struct ContractionCertificate {
  int degree = 0;
  int precision = 0;
  std::vector<VarNode> nodes;
  int root = -1;
  std::size_t anchor_leaf = 0;
  int anchor_level = 0;
  /// Lower bound on the root level (exact when the root level is resolved).
  int achieved_level = 0;
  /// Multiplier values (indexed like MultiplierSet::reps) used when the
  /// certificate was built.
  std::vector<Multiplier> multipliers;

  const VarNode& node(int id) const { return nodes.at(static_cast<std::size_t>(id)); }
  /// Leaf node ids below `id`, in tree order.
  std::vector<int> leaves_below(int id) const;
  /// Product of the multiplier roots on the path from each leaf to the root,
  /// keyed by leaf node id.
  std::vector<std::pair<int, RingElem>> leaf_roots(const MultiplierSet& mults) const;
};

/// Arena of nodes under construction.
class NodeArena {
 public:
  NodeArena(int degree, const MultiplierSet& mults) : degree_(degree), mults_(&mults) {}

  int add_leaf(std::size_t leaf_index, const PartialValue& coeff, int leaf_scale = 0);
  /// Requires >= 2 children with disjoint leaf sets. Throws DomainError on
  /// overlap.
  int contract(std::span<const int> children, std::span<const MultiplierChoice> choices, MoveKind move);

  const VarNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<VarNode>& nodes() const { return nodes_; }
  std::vector<VarNode> release() { return std::move(nodes_); }
  const MultiplierSet& multipliers() const { return *mults_; }

 private:
  int degree_;
  const MultiplierSet* mults_;
  std::vector<VarNode> nodes_;
  std::vector<std::vector<std::size_t>> leaf_sets_;
};

/// One candidate contraction (or a pair of parallel contractions for
/// kFiveInClassSplit, or a two-stage contraction for kQuadruplet).
struct Move {
  MoveKind kind = MoveKind::kPair;
  /// Groups of bucket positions contracted together; one group for most
  /// kinds, two for quadruplets and five-in-class splits.
  std::vector<std::vector<int>> groups;
  std::vector<std::vector<MultiplierChoice>> choices;
  /// Resulting values and levels, one per group (for quadruplets: the value
  /// after the second stage).
  std::vector<PartialValue> results;
  std::vector<std::optional<int>> result_levels;
  /// Levels gained by the best result (3 when it reaches the success level
  /// relative to the bucket, also when unresolved).
  int gain = 0;
};

struct TacticScanOptions {
  /// When false, every node keeps the multiplier in `fixed` (default: the
  /// identity) and only the shapes are enumerated.
  bool vary_multipliers = true;
  std::vector<MultiplierChoice> fixed;
};

/// Enumerates every admissible move of the named shapes in a bucket of
/// nodes sharing one level, with all multiplier choices, deduplicated.
std::vector<Move> tactic_scan(std::span<const VarNode> bucket, const MultiplierSet& mults,
                              const TacticScanOptions& options = {});

struct SearchConfig {
  int leaf_depth = 3;
  std::uint64_t node_budget = 1'000'000;
};

enum class SearchStatus { kFound, kNotFound, kBudgetExhausted };

struct SearchOutcome {
  SearchStatus status = SearchStatus::kNotFound;
  std::optional<ContractionCertificate> certificate;
  std::uint64_t nodes_explored = 0;
};

/// One leaf of a search: variable index, coefficient known modulo 2^known.
struct SearchLeaf {
  std::size_t index = 0;
  PartialValue coeff;
};

/// Certificate search over a form with reduced levels; leaves are known
/// modulo 2^(level + leaf_depth).
SearchOutcome search_certificate(const AdditiveForm& f, const SearchConfig& config = {});

/// Same search over explicit partial leaves (coefficients with levels in
/// [0, d)); `precision` is the ring precision of the leaf values.
SearchOutcome search_certificate(int degree, int precision, std::span<const SearchLeaf> leaves,
                                 const SearchConfig& config = {});

struct ValidationResult {
  bool ok = false;
  std::string reason;
  int exact_root_level = 0;
};

/// Recomputes every node with exact arithmetic at the form's precision.
ValidationResult validate_certificate(const AdditiveForm& f, const ContractionCertificate& cert);

}  // namespace padicforms
