#include "padicforms/engine.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <limits>
#include <map>

namespace padicforms {

PartialValue::PartialValue(RingElem value, int known) : known_(known) {
  if (known < 0 || known > value.precision()) {
    throw PrecisionError("PartialValue: known precision " + std::to_string(known) + " outside [0, " +
                         std::to_string(value.precision()) + "]");
  }
  value_ = value.truncated(known);
}

PartialValue operator+(const PartialValue& x, const PartialValue& y) {
  return PartialValue(x.value_ + y.value_, std::min(x.known_, y.known_));
}

PartialValue PartialValue::times_unit(const RingElem& unit) const {
  if (!unit.is_unit()) throw DomainError("times_unit: " + unit.to_string() + " is not a unit");
  return PartialValue(value_ * unit, known_);
}

PartialValue PartialValue::shl(int n) const {
  return PartialValue(value_.shl(n), std::min(known_ + n, value_.precision()));
}

std::optional<int> PartialValue::level() const {
  const Valuation v = value_.valuation();
  if (v.infinite || v.value >= known_) return std::nullopt;
  return v.value;
}

F4Class PartialValue::leading_class() const {
  if (!level()) throw DomainError("leading_class of a value with unresolved level");
  return value_.leading_class();
}

bool PartialValue::vanishes_to(int n) const { return known_ >= n && value_.truncated(n).is_zero(); }

std::string to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::kPair: return "pair";
    case MoveKind::kSameClassPair: return "same-class-pair";
    case MoveKind::kComplementaryPair: return "complementary-pair";
    case MoveKind::kTriplet: return "triplet";
    case MoveKind::kQuadruplet: return "quadruplet";
    case MoveKind::kCrossClass: return "cross-class";
    case MoveKind::kFiveInClassSplit: return "five-in-class-split";
    case MoveKind::kAmongThree: return "among-three";
  }
  return "unknown";
}

std::vector<int> ContractionCertificate::leaves_below(int id) const {
  std::vector<int> out;
  std::vector<int> stack{id};
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    const VarNode& n = node(cur);
    if (n.kind == NodeKind::kLeaf) {
      out.push_back(cur);
    } else {
      for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
    }
  }
  return out;
}

std::vector<std::pair<int, RingElem>> ContractionCertificate::leaf_roots(const MultiplierSet& mults) const {
  std::vector<std::pair<int, RingElem>> out;
  std::function<void(int, const RingElem&)> walk = [&](int id, const RingElem& acc) {
    const VarNode& n = node(id);
    if (n.kind == NodeKind::kLeaf) {
      out.emplace_back(id, acc);
      return;
    }
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      const Multiplier& m = mults.find(n.choices[c].class_index, n.choices[c].epsilon);
      walk(n.children[c], acc * m.root);
    }
  };
  walk(root, RingElem::one(mults.precision));
  return out;
}

int NodeArena::add_leaf(std::size_t leaf_index, const PartialValue& coeff, int leaf_scale) {
  VarNode n;
  n.id = static_cast<int>(nodes_.size());
  n.kind = NodeKind::kLeaf;
  n.leaf_index = leaf_index;
  n.leaf_scale = leaf_scale;
  n.coeff = leaf_scale == 0 ? coeff : coeff.shl(degree_ * leaf_scale);
  n.level = n.coeff.level();
  nodes_.push_back(std::move(n));
  leaf_sets_.push_back({leaf_index});
  return nodes_.back().id;
}

int NodeArena::contract(std::span<const int> children, std::span<const MultiplierChoice> choices, MoveKind move) {
  if (children.size() < 2) throw DomainError("contract needs at least two children");
  if (children.size() != choices.size()) throw DomainError("contract: one multiplier choice per child required");
  std::vector<std::size_t> leaves;
  for (int c : children) {
    const auto& s = leaf_sets_.at(static_cast<std::size_t>(c));
    leaves.insert(leaves.end(), s.begin(), s.end());
  }
  std::sort(leaves.begin(), leaves.end());
  if (std::adjacent_find(leaves.begin(), leaves.end()) != leaves.end()) {
    throw DomainError("contract: children share an original variable");
  }
  VarNode n;
  n.id = static_cast<int>(nodes_.size());
  n.kind = NodeKind::kContraction;
  n.move = move;
  for (std::size_t c = 0; c < children.size(); ++c) {
    const VarNode& child = node(children[c]);
    const Multiplier& m = mults_->find(choices[c].class_index, choices[c].epsilon);
    const PartialValue term = child.coeff.times_unit(m.value);
    n.coeff = c == 0 ? term : n.coeff + term;
  }
  n.level = n.coeff.level();
  n.children.assign(children.begin(), children.end());
  n.choices.assign(choices.begin(), choices.end());
  nodes_.push_back(std::move(n));
  leaf_sets_.push_back(std::move(leaves));
  return nodes_.back().id;
}

namespace {

// Gain of a result relative to base level L, capped at 3. Unresolved
// results count their known lower bound.
int gain_of(const PartialValue& v, int base) {
  const auto lvl = v.level();
  const int reached = lvl ? *lvl : v.known();
  return std::clamp(reached - base, 0, 3);
}

std::vector<MultiplierChoice> all_choices(const MultiplierSet& mults) {
  std::vector<MultiplierChoice> out;
  for (const auto& m : mults.reps) out.push_back({m.class_index, m.epsilon});
  return out;
}

}  // namespace

std::vector<Move> tactic_scan(std::span<const VarNode> bucket, const MultiplierSet& mults,
                              const TacticScanOptions& options) {
  std::vector<Move> moves;
  const int n = static_cast<int>(bucket.size());
  if (n < 2) return moves;
  const auto base = bucket[0].level;
  if (!base) throw DomainError("tactic_scan: bucket nodes must have resolved levels");
  for (const auto& node : bucket) {
    if (node.level != base) throw DomainError("tactic_scan: bucket nodes must share one level");
  }
  const int L = *base;

  // Options per bucket position: (choice, multiplied value, class).
  struct Option {
    MultiplierChoice choice;
    PartialValue value;
    F4Class cls;
  };
  std::vector<std::vector<Option>> opts(static_cast<std::size_t>(n));
  const std::vector<MultiplierChoice> every = all_choices(mults);
  for (int i = 0; i < n; ++i) {
    std::vector<MultiplierChoice> cs;
    if (options.vary_multipliers) {
      cs = every;
    } else if (static_cast<int>(options.fixed.size()) == n) {
      cs = {options.fixed[static_cast<std::size_t>(i)]};
    } else {
      cs = {MultiplierChoice{0, 0}};
    }
    for (const auto& c : cs) {
      const PartialValue v = bucket[static_cast<std::size_t>(i)].coeff.times_unit(mults.find(c.class_index, c.epsilon).value);
      opts[static_cast<std::size_t>(i)].push_back({c, v, v.leading_class()});
    }
  }

  std::array<int, 3> class_count{};
  for (const auto& node : bucket) ++class_count[static_cast<std::size_t>(node.coeff.leading_class().index())];

  // Pairs and cross-class moves.
  struct PairMove {
    int i, j;
    MultiplierChoice ci, cj;
    PartialValue result;
  };
  std::vector<PairMove> up_pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (const auto& oi : opts[static_cast<std::size_t>(i)]) {
        for (const auto& oj : opts[static_cast<std::size_t>(j)]) {
          const PartialValue r = oi.value + oj.value;
          Move m;
          m.groups = {{i, j}};
          m.choices = {{oi.choice, oj.choice}};
          m.results = {r};
          m.result_levels = {r.level()};
          if (oi.cls == oj.cls) {
            m.gain = gain_of(r, L);
            const F4Class orig_i = bucket[static_cast<std::size_t>(i)].coeff.leading_class();
            const F4Class orig_j = bucket[static_cast<std::size_t>(j)].coeff.leading_class();
            if (m.gain >= 2) {
              m.kind = MoveKind::kComplementaryPair;
            } else if (!r.level()) {
              m.kind = MoveKind::kPair;
            } else if (r.leading_class() == oi.cls) {
              m.kind = MoveKind::kSameClassPair;
            } else if (orig_i == orig_j && class_count[static_cast<std::size_t>(orig_i.index())] >= 3) {
              m.kind = MoveKind::kAmongThree;
            } else {
              m.kind = MoveKind::kPair;
            }
            if (r.level()) up_pairs.push_back({i, j, oi.choice, oj.choice, r});
          } else {
            m.kind = MoveKind::kCrossClass;
            m.gain = 0;
          }
          moves.push_back(std::move(m));
        }
      }
    }
  }

  // Triplets.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        for (const auto& oi : opts[static_cast<std::size_t>(i)]) {
          for (const auto& oj : opts[static_cast<std::size_t>(j)]) {
            for (const auto& ok : opts[static_cast<std::size_t>(k)]) {
              if (oi.cls == oj.cls || oi.cls == ok.cls || oj.cls == ok.cls) continue;
              const PartialValue r = oi.value + oj.value + ok.value;
              Move m;
              m.kind = MoveKind::kTriplet;
              m.groups = {{i, j, k}};
              m.choices = {{oi.choice, oj.choice, ok.choice}};
              m.results = {r};
              m.result_levels = {r.level()};
              m.gain = gain_of(r, L);
              moves.push_back(std::move(m));
            }
          }
        }
      }
    }
  }

  // Quadruplets (two pairs landing in one class one level up, contracted
  // again) and five-in-class splits (two pairs from five same-class nodes
  // landing in distinct classes one level up).
  for (std::size_t p = 0; p < up_pairs.size(); ++p) {
    const auto& a = up_pairs[p];
    if (gain_of(a.result, L) != 1) continue;
    for (std::size_t q = p + 1; q < up_pairs.size(); ++q) {
      const auto& b = up_pairs[q];
      if (b.i <= a.i || b.i == a.j || b.j == a.j || b.j == a.i) continue;
      if (gain_of(b.result, L) != 1) continue;
      const F4Class ca = a.result.leading_class();
      const F4Class cb = b.result.leading_class();
      Move m;
      m.groups = {{a.i, a.j}, {b.i, b.j}};
      m.choices = {{a.ci, a.cj}, {b.ci, b.cj}};
      if (ca == cb) {
        const PartialValue r = a.result + b.result;
        m.kind = MoveKind::kQuadruplet;
        m.results = {r};
        m.result_levels = {r.level()};
        m.gain = gain_of(r, L);
        moves.push_back(std::move(m));
      } else {
        const F4Class ci = bucket[static_cast<std::size_t>(a.i)].coeff.leading_class();
        const bool same_source = ci == bucket[static_cast<std::size_t>(a.j)].coeff.leading_class() &&
                                 ci == bucket[static_cast<std::size_t>(b.i)].coeff.leading_class() &&
                                 ci == bucket[static_cast<std::size_t>(b.j)].coeff.leading_class();
        if (!same_source || class_count[static_cast<std::size_t>(ci.index())] < 5) continue;
        m.kind = MoveKind::kFiveInClassSplit;
        m.results = {a.result, b.result};
        m.result_levels = {a.result.level(), b.result.level()};
        m.gain = 1;
        moves.push_back(std::move(m));
      }
    }
  }
  return moves;
}

namespace {

constexpr int kResidues = 64;  // O / 8 O, index a + 8 b
constexpr std::uint8_t kUnreached = std::numeric_limits<std::uint8_t>::max();

int residue_index(const RingElem& x) { return static_cast<int>((x.a() & 7) | ((x.b() & 7) << 3)); }
int add_residues(int x, int y) { return (((x & 7) + (y & 7)) & 7) | ((((x >> 3) + (y >> 3)) & 7) << 3); }

struct WindowLeaf {
  std::size_t position = 0;  // index into the leaves span
  int scale = 0;
  bool anchor = false;
  std::vector<int> contributions;  // per multiplier rep
};

// Builds the tree for a chosen leaf selection, bottom-up by level, taking
// tactic moves in preference order. Returns the root id or -1.
int assemble(NodeArena& arena, std::vector<int> selected, int window, int degree) {
  const int success = window + 3;
  auto has_anchor_leaf = [&](int id) {
    std::vector<int> stack{id};
    while (!stack.empty()) {
      const VarNode& n = arena.node(stack.back());
      stack.pop_back();
      if (n.kind == NodeKind::kLeaf) {
        if (n.level == window) return true;
      } else {
        stack.insert(stack.end(), n.children.begin(), n.children.end());
      }
    }
    return false;
  };
  auto reached = [&](int id) {
    const VarNode& n = arena.node(id);
    return !n.level || *n.level >= success ? n.coeff.vanishes_to(success) : false;
  };
  (void)degree;

  std::vector<int> pending = std::move(selected);
  for (int lvl = window; lvl < success; ++lvl) {
    std::vector<int> bucket_ids;
    std::vector<int> rest;
    for (int id : pending) {
      const auto& l = arena.node(id).level;
      (l && *l == lvl ? bucket_ids : rest).push_back(id);
    }
    // Leaves carry their multiplier in the contraction that consumes them;
    // contracted nodes use the identity.
    while (!bucket_ids.empty()) {
      std::vector<VarNode> bucket;
      std::vector<MultiplierChoice> fixed;
      for (int id : bucket_ids) bucket.push_back(arena.node(id));
      for (std::size_t i = 0; i < bucket_ids.size(); ++i) fixed.push_back({0, 0});
      std::array<int, 3> counts{};
      for (const auto& n : bucket) ++counts[static_cast<std::size_t>(n.coeff.leading_class().index())];
      const bool need_triplet = (counts[0] % 2 == 1) && (counts[1] % 2 == 1) && (counts[2] % 2 == 1);
      const bool balanced = need_triplet || (counts[0] % 2 == 0 && counts[1] % 2 == 0 && counts[2] % 2 == 0);
      if (!balanced) return -1;

      TacticScanOptions opts;
      opts.vary_multipliers = false;
      opts.fixed = fixed;
      const std::vector<Move> moves = tactic_scan(bucket, arena.multipliers(), opts);
      const Move* best = nullptr;
      auto rank = [](const Move& m) {
        switch (m.kind) {
          case MoveKind::kComplementaryPair: return 0;
          case MoveKind::kSameClassPair: return 1;
          case MoveKind::kAmongThree: return 2;
          case MoveKind::kPair: return 3;
          default: return 4;
        }
      };
      for (const Move& m : moves) {
        const bool usable = need_triplet ? m.kind == MoveKind::kTriplet
                                         : (m.kind == MoveKind::kPair || m.kind == MoveKind::kSameClassPair ||
                                            m.kind == MoveKind::kComplementaryPair || m.kind == MoveKind::kAmongThree);
        if (!usable) continue;
        if (best == nullptr || m.gain > best->gain || (m.gain == best->gain && rank(m) < rank(*best))) best = &m;
      }
      if (best == nullptr) return -1;
      std::vector<int> children;
      for (int pos : best->groups[0]) children.push_back(bucket_ids[static_cast<std::size_t>(pos)]);
      const int id = arena.contract(children, best->choices[0], best->kind);
      std::vector<int> remaining;
      for (std::size_t i = 0; i < bucket_ids.size(); ++i) {
        if (std::find(best->groups[0].begin(), best->groups[0].end(), static_cast<int>(i)) == best->groups[0].end()) {
          remaining.push_back(bucket_ids[i]);
        }
      }
      bucket_ids = std::move(remaining);
      if (reached(id)) {
        if (has_anchor_leaf(id)) return id;
        continue;  // lands above the window without an anchor: not needed
      }
      rest.push_back(id);
    }
    pending = std::move(rest);
  }
  return -1;
}

}  // namespace

SearchOutcome search_certificate(int degree, int precision, std::span<const SearchLeaf> leaves,
                                 const SearchConfig& config) {
  check_degree_shape(degree);
  SearchOutcome outcome;
  if (config.leaf_depth < 3) return outcome;  // the anchor can never be trusted to level + 3
  const MultiplierSet& mults = shared_multiplier_set(degree, precision);
  const std::size_t reps = mults.reps.size();

  for (int window = 0; window < degree; ++window) {
    if (window + 3 > precision) break;
    std::vector<WindowLeaf> wl;
    bool any_anchor = false;
    for (std::size_t p = 0; p < leaves.size(); ++p) {
      const auto lvl = leaves[p].coeff.level();
      if (!lvl) continue;
      int scale = -1;
      if (*lvl >= window && *lvl <= window + 2) {
        scale = 0;
      } else if (*lvl + degree >= window && *lvl + degree <= window + 2) {
        scale = 1;
      }
      if (scale < 0) continue;
      const PartialValue eff = scale == 0 ? leaves[p].coeff : leaves[p].coeff.shl(degree);
      if (eff.known() < window + 3) continue;
      WindowLeaf leaf;
      leaf.position = p;
      leaf.scale = scale;
      leaf.anchor = scale == 0 && *lvl == window;
      for (const auto& m : mults.reps) leaf.contributions.push_back(residue_index((eff.value() * m.value).exact_shr(window)));
      any_anchor = any_anchor || leaf.anchor;
      wl.push_back(std::move(leaf));
    }
    if (!any_anchor) continue;

    // Layered subset DP over (residue mod 8 relative to 2^window, anchor
    // used); entries hold the fewest leaves reaching the state.
    const std::size_t n = wl.size();
    std::vector<std::array<std::uint8_t, 2 * kResidues>> dp(n + 1);
    for (auto& layer : dp) layer.fill(kUnreached);
    dp[0][0] = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dp[i + 1] = dp[i];
      for (int state = 0; state < 2 * kResidues; ++state) {
        const std::uint8_t c = dp[i][static_cast<std::size_t>(state)];
        if (c == kUnreached) continue;
        const int flag = (state >= kResidues ? 1 : 0) | (wl[i].anchor ? 1 : 0);
        for (std::size_t m = 0; m < reps; ++m) {
          const int next = add_residues(state % kResidues, wl[i].contributions[m]) + flag * kResidues;
          auto& slot = dp[i + 1][static_cast<std::size_t>(next)];
          if (c + 1 < slot) slot = static_cast<std::uint8_t>(c + 1);
        }
        outcome.nodes_explored += reps;
      }
      if (outcome.nodes_explored > config.node_budget) {
        outcome.status = SearchStatus::kBudgetExhausted;
        return outcome;
      }
    }
    if (dp[n][kResidues] == kUnreached) continue;

    // Walk back, preferring to skip later leaves so lower indices are used.
    std::vector<std::pair<std::size_t, std::size_t>> chosen;  // (window leaf, rep)
    int cur = kResidues;
    for (std::size_t i = n; i-- > 0;) {
      const std::uint8_t need = dp[i + 1][static_cast<std::size_t>(cur)];
      if (dp[i][static_cast<std::size_t>(cur)] == need) continue;
      bool stepped = false;
      for (std::size_t m = 0; m < reps && !stepped; ++m) {
        for (int prev_flag = 0; prev_flag < 2 && !stepped; ++prev_flag) {
          const int flag = prev_flag | (wl[i].anchor ? 1 : 0);
          if (flag != cur / kResidues) continue;
          // prev + contribution = cur (mod 8, componentwise)
          const int contrib = wl[i].contributions[m];
          const int neg = ((8 - (contrib & 7)) & 7) | (((8 - (contrib >> 3)) & 7) << 3);
          const int prev = add_residues(cur % kResidues, neg) + prev_flag * kResidues;
          if (dp[i][static_cast<std::size_t>(prev)] != kUnreached && dp[i][static_cast<std::size_t>(prev)] + 1 == need) {
            chosen.emplace_back(i, m);
            cur = prev;
            stepped = true;
          }
        }
      }
      if (!stepped) throw InternalError("certificate search: DP walk-back failed");
    }
    std::reverse(chosen.begin(), chosen.end());

    NodeArena arena(degree, mults);
    std::vector<int> selected;
    // Leaves are contracted at their own level with their chosen multiplier;
    // pre-multiplying them keeps tactic_scan's identity choices valid, so the
    // choice is recorded by wrapping: add the leaf, then remember the choice.
    std::vector<MultiplierChoice> leaf_choice;
    for (const auto& [i, m] : chosen) {
      const SearchLeaf& src = leaves[wl[i].position];
      const int id = arena.add_leaf(src.index, src.coeff, wl[i].scale);
      selected.push_back(id);
      leaf_choice.push_back({mults.reps[m].class_index, mults.reps[m].epsilon});
    }
    // Apply the leaf multipliers by building the tree over multiplied
    // leaves, then rewriting the leaf edges with the chosen multipliers.
    NodeArena scaled(degree, mults);
    for (std::size_t s = 0; s < selected.size(); ++s) {
      const VarNode& leaf = arena.node(selected[s]);
      const Multiplier& m = mults.find(leaf_choice[s].class_index, leaf_choice[s].epsilon);
      const int id = scaled.add_leaf(leaf.leaf_index, leaf.coeff.times_unit(m.value), 0);
      (void)id;
    }
    std::vector<int> scaled_ids(selected.size());
    for (std::size_t s = 0; s < selected.size(); ++s) scaled_ids[s] = static_cast<int>(s);
    const int root = assemble(scaled, scaled_ids, window, degree);
    if (root < 0) throw InternalError("certificate search: tree assembly failed for a feasible selection");

    ContractionCertificate cert;
    cert.degree = degree;
    cert.precision = precision;
    cert.nodes = scaled.release();
    // Restore the true leaf coefficients and move the leaf multipliers onto
    // the edges into their parents.
    for (std::size_t s = 0; s < selected.size(); ++s) {
      const VarNode& orig = arena.node(selected[s]);
      VarNode& leaf = cert.nodes[s];
      leaf.coeff = orig.coeff;
      leaf.level = orig.level;
      leaf.leaf_scale = orig.leaf_scale;
    }
    for (auto& node : cert.nodes) {
      if (node.kind != NodeKind::kContraction) continue;
      for (std::size_t c = 0; c < node.children.size(); ++c) {
        const auto child = static_cast<std::size_t>(node.children[c]);
        if (child < selected.size()) node.choices[c] = leaf_choice[child];
      }
    }
    // Keep only the root's subtree, renumbered in creation order.
    std::vector<int> keep;
    {
      std::vector<int> stack{root};
      std::vector<char> mark(cert.nodes.size(), 0);
      while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        if (mark[static_cast<std::size_t>(id)]) continue;
        mark[static_cast<std::size_t>(id)] = 1;
        for (int c : cert.nodes[static_cast<std::size_t>(id)].children) stack.push_back(c);
      }
      for (std::size_t id = 0; id < cert.nodes.size(); ++id) {
        if (mark[id]) keep.push_back(static_cast<int>(id));
      }
    }
    std::vector<int> renumber(cert.nodes.size(), -1);
    std::vector<VarNode> compact;
    for (int id : keep) {
      renumber[static_cast<std::size_t>(id)] = static_cast<int>(compact.size());
      VarNode n = cert.nodes[static_cast<std::size_t>(id)];
      n.id = static_cast<int>(compact.size());
      for (int& c : n.children) c = renumber[static_cast<std::size_t>(c)];
      compact.push_back(std::move(n));
    }
    cert.nodes = std::move(compact);
    cert.root = renumber[static_cast<std::size_t>(root)];
    cert.anchor_level = window;
    std::size_t anchor = std::numeric_limits<std::size_t>::max();
    for (const auto& n : cert.nodes) {
      if (n.kind == NodeKind::kLeaf && n.level == window) anchor = std::min(anchor, n.leaf_index);
    }
    cert.anchor_leaf = anchor;
    const VarNode& r = cert.node(cert.root);
    cert.achieved_level = r.level ? *r.level : r.coeff.known();
    cert.multipliers = mults.reps;
    outcome.status = SearchStatus::kFound;
    outcome.certificate = std::move(cert);
    return outcome;
  }
  outcome.status = SearchStatus::kNotFound;
  return outcome;
}

SearchOutcome search_certificate(const AdditiveForm& f, const SearchConfig& config) {
  if (!f.levels_reduced()) throw DomainError("search_certificate requires reduced levels");
  std::vector<SearchLeaf> leaves;
  leaves.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const int known = std::min(f.level(i) + config.leaf_depth, f.precision);
    leaves.push_back({i, PartialValue(f.coeffs[i], known)});
  }
  return search_certificate(f.degree, f.precision, leaves, config);
}

ValidationResult validate_certificate(const AdditiveForm& f, const ContractionCertificate& cert) {
  ValidationResult res;
  auto fail = [&](std::string why) {
    res.ok = false;
    res.reason = std::move(why);
    return res;
  };
  if (cert.degree != f.degree) return fail("degree mismatch");
  if (cert.root < 0 || cert.root >= static_cast<int>(cert.nodes.size())) return fail("root out of range");
  if (cert.anchor_level + 3 > f.precision) return fail("precision below anchor level + 3");
  const MultiplierSet& mults = shared_multiplier_set(f.degree, f.precision);
  const int common = std::min(f.precision, cert.precision);
  for (const auto& m : cert.multipliers) {
    int idx = 0;
    try {
      idx = mults.index_of(m.class_index, m.epsilon);
    } catch (const DomainError&) {
      return fail("certificate uses a multiplier unavailable for this degree");
    }
    if (m.value.with_precision(common) != mults.reps[static_cast<std::size_t>(idx)].value.with_precision(common)) {
      return fail("multiplier transcript disagrees with recomputed d-th powers");
    }
  }

  std::vector<RingElem> exact(cert.nodes.size());
  std::vector<int> exact_level(cert.nodes.size());
  std::vector<std::size_t> used;
  int min_leaf_level = std::numeric_limits<int>::max();
  bool anchor_seen = false;
  // Nodes reachable from the root, children before parents (ids increase).
  std::vector<char> reach(cert.nodes.size(), 0);
  reach[static_cast<std::size_t>(cert.root)] = 1;
  for (std::size_t id = cert.nodes.size(); id-- > 0;) {
    if (!reach[id]) continue;
    const VarNode& n = cert.nodes[id];
    if (n.id != static_cast<int>(id)) return fail("node id mismatch");
    for (int c : n.children) {
      if (c < 0 || c >= static_cast<int>(id)) return fail("child id must precede its parent");
      reach[static_cast<std::size_t>(c)] = 1;
    }
  }
  for (std::size_t id = 0; id < cert.nodes.size(); ++id) {
    if (!reach[id]) continue;
    const VarNode& n = cert.nodes[id];
    if (n.kind == NodeKind::kLeaf) {
      if (n.leaf_index >= f.size()) return fail("leaf references a missing variable");
      if (n.leaf_scale < 0 || n.leaf_scale > 1) return fail("leaf scale out of range");
      exact[id] = f.coeffs[n.leaf_index].shl(f.degree * n.leaf_scale);
      const Valuation v = exact[id].valuation();
      if (v.infinite) return fail("leaf coefficient vanishes at this precision");
      exact_level[id] = v.value;
      used.push_back(n.leaf_index);
      min_leaf_level = std::min(min_leaf_level, v.value);
      if (n.leaf_index == cert.anchor_leaf) {
        anchor_seen = true;
        if (n.leaf_scale != 0 || v.value != cert.anchor_level) return fail("anchor leaf is not at the anchor level");
      }
    } else {
      if (n.children.size() < 2 || n.children.size() != n.choices.size()) return fail("malformed contraction");
      RingElem sum = RingElem::zero(f.precision);
      int max_child = 0;
      for (std::size_t c = 0; c < n.children.size(); ++c) {
        int idx = 0;
        try {
          idx = mults.index_of(n.choices[c].class_index, n.choices[c].epsilon);
        } catch (const DomainError&) {
          return fail("contraction uses a multiplier unavailable for this degree");
        }
        const auto child = static_cast<std::size_t>(n.children[c]);
        sum += exact[child] * mults.reps[static_cast<std::size_t>(idx)].value;
        max_child = std::max(max_child, exact_level[child]);
      }
      exact[id] = sum;
      exact_level[id] = sum.valuation().value;
      if (exact_level[id] < max_child) return fail("contraction lands below one of its children");
    }
  }
  std::sort(used.begin(), used.end());
  if (std::adjacent_find(used.begin(), used.end()) != used.end()) return fail("overlapping leaves");
  if (!anchor_seen) return fail("anchor leaf not in the root's tree");
  if (min_leaf_level != cert.anchor_level) return fail("anchor is not the lowest leaf");
  res.exact_root_level = exact_level[static_cast<std::size_t>(cert.root)];
  if (res.exact_root_level < cert.anchor_level + 3) return fail("root level below anchor level + 3");
  res.ok = true;
  return res;
}

}  // namespace padicforms
