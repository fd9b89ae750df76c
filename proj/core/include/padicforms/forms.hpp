#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "padicforms/ring.hpp"

namespace padicforms {

/// a_1 x_1^d + ... + a_s x_s^d with coefficients in O/2^K O.
///
/// The stored representatives are treated as exact elements of O. Level
/// reduction and cyclic shifts are recorded so that zeros can be mapped back
/// to the frame the form was created in: if this form was derived from an
/// original form with coefficients b_i, then
///
///   coeffs[i] = 2^scale_log * b_i / 2^(d * var_shift[i]),
///
/// and its variables are y_i = 2^var_shift[i] * x_i.
struct AdditiveForm {
  int degree = 0;
  int precision = 0;
  std::vector<RingElem> coeffs;
  int scale_log = 0;
  std::vector<int> var_shift;

  AdditiveForm() = default;
  /// Validates degree shape, precision agreement and nonzero coefficients.
  AdditiveForm(int degree, int precision, std::vector<RingElem> coeffs);
  /// Coefficients given as (a, b) pairs.
  static AdditiveForm from_pairs(int degree, int precision,
                                 const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs);

  std::size_t size() const { return coeffs.size(); }
  int level(std::size_t i) const { return coeffs[i].valuation().value; }
  bool levels_reduced() const;
  int max_level() const;
  /// Same form at another precision (representatives kept, so raising is
  /// exact).
  AdditiveForm with_precision(int precision) const;
  /// The form restricted to the listed variables (frame bookkeeping kept).
  AdditiveForm subform(const std::vector<std::size_t>& indices) const;
};

/// Per-level variable counts and per-level class tallies (index 0, 1, 2 for
/// classes 1, w, 1 + w).
struct LevelDistribution {
  std::vector<int> counts;
  std::vector<std::array<int, 3>> class_counts;
};

/// Requires levels_reduced().
LevelDistribution level_distribution(const AdditiveForm& f);

/// Moves every coefficient level into [0, d) by the substitution
/// 2^r x^d = 2^(r - i d) (2^i x)^d. Rejects coefficients whose reduced value
/// would be known to fewer than d + 2 digits.
AdditiveForm reduce_levels(const AdditiveForm& f);

/// Multiplies the form by 2^t and re-reduces, so every level becomes
/// (level + t) mod d. Requires reduced levels.
AdditiveForm cyclic_shift(const AdditiveForm& f, int t);

struct NormalizedForm {
  AdditiveForm form;
  int shift = 0;
};

/// Picks the first cyclic shift t for which s_0 + ... + s_j >= (j + 1) s / d
/// for every j. Requires reduced levels. Throws InternalError if no shift
/// works (impossible by the Davenport-Lewis argument).
NormalizedForm normalize(const AdditiveForm& f);

/// True iff the level counts satisfy every prefix inequality.
bool satisfies_prefix_inequalities(const std::vector<int>& counts);

/// Minimum variable counts for one level: either a plain count or a stack of
/// three per-class counts matched up to relabeling of the nonzero classes.
struct LevelRequirement {
  bool stacked = false;
  int count = 0;
  std::array<int, 3> class_counts{};

  int total() const { return stacked ? class_counts[0] + class_counts[1] + class_counts[2] : count; }
};

/// A type such as (0 0 6, 1): consecutive level requirements starting at
/// level 0, matched up to a cyclic shift of levels.
struct TypeDescriptor {
  std::vector<LevelRequirement> levels;

  /// Syntax: levels separated by ',', a stacked level written "a/b/c", e.g.
  /// "0/0/6,1" or "5,4,1".
  static TypeDescriptor parse(std::string_view text);
  std::string to_string() const;
  int total() const;
};

struct TypeMatch {
  int shift = 0;
  /// For each descriptor level: the matched variable indices (stacked levels
  /// list slot a's variables first, then b's, then c's).
  std::vector<std::vector<std::size_t>> slots;
  /// For each stacked descriptor level: the F4 class assigned to slots a, b, c.
  std::vector<std::array<F4Class, 3>> class_labels;
};

/// Tries every cyclic shift and every relabeling of classes per stacked level.
std::optional<TypeMatch> match_type(const AdditiveForm& f, const TypeDescriptor& type);

/// Parses "d=6; 1, 1, 1*w, 4" (optionally "d=6; K=12; ..."). Without an
/// explicit K the precision is chosen so every coefficient is kept exactly
/// and can be level-reduced.
AdditiveForm parse_form_text(std::string_view text);
std::string format_form_text(const AdditiveForm& f);

/// Default working precision d + 4.
int default_precision(int degree);

}  // namespace padicforms
