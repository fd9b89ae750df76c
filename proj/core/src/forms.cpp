#include "padicforms/forms.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <numeric>
#include <sstream>

namespace padicforms {

int default_precision(int degree) { return degree + 4; }

AdditiveForm::AdditiveForm(int degree_, int precision_, std::vector<RingElem> coeffs_)
    : degree(degree_), precision(precision_), coeffs(std::move(coeffs_)), var_shift(coeffs.size(), 0) {
  check_degree_shape(degree);
  check_precision(precision);
  if (coeffs.empty()) throw DomainError("additive form needs at least one coefficient");
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i].precision() != precision) {
      throw PrecisionError("coefficient " + std::to_string(i) + " has precision " +
                           std::to_string(coeffs[i].precision()) + ", form has " + std::to_string(precision));
    }
    if (coeffs[i].is_zero()) {
      throw PrecisionError("coefficient " + std::to_string(i) + " is zero modulo 2^" + std::to_string(precision));
    }
  }
}

AdditiveForm AdditiveForm::from_pairs(int degree, int precision,
                                      const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs) {
  check_precision(precision);
  std::vector<RingElem> coeffs;
  coeffs.reserve(pairs.size());
  for (const auto& [a, b] : pairs) coeffs.emplace_back(a, b, precision);
  return AdditiveForm(degree, precision, std::move(coeffs));
}

bool AdditiveForm::levels_reduced() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (level(i) >= degree) return false;
  }
  return true;
}

int AdditiveForm::max_level() const {
  int m = 0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, level(i));
  return m;
}

AdditiveForm AdditiveForm::with_precision(int new_precision) const {
  check_precision(new_precision);
  AdditiveForm out = *this;
  out.precision = new_precision;
  for (auto& c : out.coeffs) {
    if (new_precision < c.precision() && (c.a() > RingElem::mask_for(new_precision) ||
                                          c.b() > RingElem::mask_for(new_precision))) {
      throw PrecisionError("coefficient " + c.to_string() + " does not fit in precision " +
                           std::to_string(new_precision));
    }
    c = c.with_precision(new_precision);
  }
  return out;
}

AdditiveForm AdditiveForm::subform(const std::vector<std::size_t>& indices) const {
  AdditiveForm out;
  out.degree = degree;
  out.precision = precision;
  out.scale_log = scale_log;
  for (std::size_t i : indices) {
    out.coeffs.push_back(coeffs.at(i));
    out.var_shift.push_back(var_shift.at(i));
  }
  if (out.coeffs.empty()) throw DomainError("subform needs at least one variable");
  return out;
}

LevelDistribution level_distribution(const AdditiveForm& f) {
  if (!f.levels_reduced()) throw DomainError("level_distribution requires reduced levels");
  LevelDistribution dist;
  dist.counts.assign(static_cast<std::size_t>(f.degree), 0);
  dist.class_counts.assign(static_cast<std::size_t>(f.degree), {0, 0, 0});
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto lvl = static_cast<std::size_t>(f.level(i));
    ++dist.counts[lvl];
    ++dist.class_counts[lvl][static_cast<std::size_t>(f.coeffs[i].leading_class().index())];
  }
  return dist;
}

AdditiveForm reduce_levels(const AdditiveForm& f) {
  AdditiveForm out = f;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Valuation v = out.coeffs[i].valuation();
    if (v.infinite) throw PrecisionError("coefficient " + std::to_string(i) + " is zero at this precision");
    const int q = v.value / f.degree;
    if (q == 0) continue;
    if (f.precision - q * f.degree < f.degree + 2) {
      throw PrecisionError("coefficient " + std::to_string(i) + " at level " + std::to_string(v.value) +
                           " is under-precise at precision " + std::to_string(f.precision) +
                           " (reduced value would keep fewer than d + 2 digits)");
    }
    out.coeffs[i] = out.coeffs[i].exact_shr(q * f.degree);
    out.var_shift[i] += q;
  }
  return out;
}

AdditiveForm cyclic_shift(const AdditiveForm& f, int t) {
  if (!f.levels_reduced()) throw DomainError("cyclic_shift requires reduced levels");
  const int d = f.degree;
  t = ((t % d) + d) % d;
  if (t == 0) return f;
  AdditiveForm out = f;
  out.scale_log += t;
  // The shifted product can need up to K + t digits before the wrap-around
  // division, so compute it at the widest precision.
  for (std::size_t i = 0; i < out.size(); ++i) {
    const RingElem wide = f.coeffs[i].with_precision(kMaxPrecision).shl(t);
    if (f.level(i) + t >= d) {
      out.coeffs[i] = wide.exact_shr(d).with_precision(f.precision);
      out.var_shift[i] += 1;
    } else {
      out.coeffs[i] = wide.with_precision(f.precision);
    }
  }
  return out;
}

bool satisfies_prefix_inequalities(const std::vector<int>& counts) {
  const long long d = static_cast<long long>(counts.size());
  const long long s = std::accumulate(counts.begin(), counts.end(), 0LL);
  long long prefix = 0;
  for (long long j = 0; j < d; ++j) {
    prefix += counts[static_cast<std::size_t>(j)];
    if (prefix * d < (j + 1) * s) return false;
  }
  return true;
}

NormalizedForm normalize(const AdditiveForm& f) {
  const LevelDistribution dist = level_distribution(f);
  const int d = f.degree;
  std::vector<int> shifted(static_cast<std::size_t>(d));
  for (int t = 0; t < d; ++t) {
    for (int lvl = 0; lvl < d; ++lvl) {
      shifted[static_cast<std::size_t>((lvl + t) % d)] = dist.counts[static_cast<std::size_t>(lvl)];
    }
    if (satisfies_prefix_inequalities(shifted)) return {cyclic_shift(f, t), t};
  }
  throw InternalError("normalize: no cyclic shift satisfies the prefix inequalities");
}

TypeDescriptor TypeDescriptor::parse(std::string_view text) {
  TypeDescriptor type;
  std::string cleaned;
  for (char ch : text) {
    if (ch != '(' && ch != ')' && !std::isspace(static_cast<unsigned char>(ch))) cleaned.push_back(ch);
  }
  if (cleaned.empty()) throw ParseError("empty type descriptor");
  auto parse_int = [&](std::string_view s) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || value < 0) {
      throw ParseError("bad count '" + std::string(s) + "' in type '" + std::string(text) + "'");
    }
    return value;
  };
  std::string_view rest = cleaned;
  while (true) {
    const std::size_t comma = rest.find(',');
    const std::string_view part = rest.substr(0, comma);
    LevelRequirement req;
    if (part.find('/') != std::string_view::npos) {
      req.stacked = true;
      std::string_view stack = part;
      for (int k = 0; k < 3; ++k) {
        const std::size_t slash = stack.find('/');
        if ((k < 2) == (slash == std::string_view::npos)) {
          throw ParseError("stacked level needs exactly three counts in '" + std::string(text) + "'");
        }
        req.class_counts[static_cast<std::size_t>(k)] = parse_int(stack.substr(0, slash));
        if (slash != std::string_view::npos) stack.remove_prefix(slash + 1);
      }
    } else {
      req.count = parse_int(part);
    }
    type.levels.push_back(req);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return type;
}

std::string TypeDescriptor::to_string() const {
  std::ostringstream os;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    if (j > 0) os << ',';
    const auto& req = levels[j];
    if (req.stacked) {
      os << req.class_counts[0] << '/' << req.class_counts[1] << '/' << req.class_counts[2];
    } else {
      os << req.count;
    }
  }
  return os.str();
}

int TypeDescriptor::total() const {
  int sum = 0;
  for (const auto& req : levels) sum += req.total();
  return sum;
}

std::optional<TypeMatch> match_type(const AdditiveForm& f, const TypeDescriptor& type) {
  if (!f.levels_reduced()) throw DomainError("match_type requires reduced levels");
  const int d = f.degree;
  if (static_cast<int>(type.levels.size()) > d) return std::nullopt;
  static constexpr std::array<std::array<int, 3>, 6> kPerms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

  // by_level[l][c]: variables at level l with class index c, by index.
  std::vector<std::array<std::vector<std::size_t>, 3>> by_level(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < f.size(); ++i) {
    by_level[static_cast<std::size_t>(f.level(i))][static_cast<std::size_t>(f.coeffs[i].leading_class().index())]
        .push_back(i);
  }

  for (int t = 0; t < d; ++t) {
    TypeMatch match;
    match.shift = t;
    bool ok = true;
    for (std::size_t j = 0; j < type.levels.size() && ok; ++j) {
      // Descriptor level j corresponds to original level (j - t) mod d.
      const auto lvl = static_cast<std::size_t>(((static_cast<int>(j) - t) % d + d) % d);
      const auto& buckets = by_level[lvl];
      const LevelRequirement& req = type.levels[j];
      std::vector<std::size_t> chosen;
      if (!req.stacked) {
        std::vector<std::size_t> all;
        for (const auto& b : buckets) all.insert(all.end(), b.begin(), b.end());
        std::sort(all.begin(), all.end());
        if (static_cast<int>(all.size()) < req.count) {
          ok = false;
          break;
        }
        chosen.assign(all.begin(), all.begin() + req.count);
      } else {
        bool found = false;
        for (const auto& perm : kPerms) {
          bool fits = true;
          for (int slot = 0; slot < 3; ++slot) {
            if (static_cast<int>(buckets[static_cast<std::size_t>(perm[static_cast<std::size_t>(slot)])].size()) <
                req.class_counts[static_cast<std::size_t>(slot)]) {
              fits = false;
            }
          }
          if (!fits) continue;
          std::array<F4Class, 3> labels{};
          for (int slot = 0; slot < 3; ++slot) {
            const auto& bucket = buckets[static_cast<std::size_t>(perm[static_cast<std::size_t>(slot)])];
            chosen.insert(chosen.end(), bucket.begin(),
                          bucket.begin() + req.class_counts[static_cast<std::size_t>(slot)]);
            labels[static_cast<std::size_t>(slot)] = F4Class::nonzero(perm[static_cast<std::size_t>(slot)]);
          }
          match.class_labels.push_back(labels);
          found = true;
          break;
        }
        if (!found) ok = false;
      }
      match.slots.push_back(std::move(chosen));
    }
    if (ok) return match;
  }
  return std::nullopt;
}

namespace {

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const std::size_t pos = s.find(sep);
    parts.push_back(trim_view(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return parts;
}

int parse_header_int(std::string_view part, std::string_view key) {
  int value = 0;
  const std::string_view digits = trim_view(part.substr(key.size()));
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw ParseError("bad header '" + std::string(part) + "'");
  }
  return value;
}

}  // namespace

AdditiveForm parse_form_text(std::string_view text) {
  const auto sections = split(text, ';');
  int degree = 0;
  int precision = 0;
  std::string_view coeff_section;
  bool have_coeffs = false;
  for (std::string_view section : sections) {
    if (section.empty()) continue;
    std::string key;
    for (char ch : section.substr(0, std::min<std::size_t>(2, section.size()))) key.push_back(static_cast<char>(std::tolower(ch)));
    if (key == "d=") {
      degree = parse_header_int(section, "d=");
    } else if (key == "k=") {
      precision = parse_header_int(section, "K=");
    } else {
      if (have_coeffs) throw ParseError("form text has more than one coefficient list");
      coeff_section = section;
      have_coeffs = true;
    }
  }
  if (degree == 0) throw ParseError("form text is missing 'd=<degree>'");
  if (!have_coeffs) throw ParseError("form text has no coefficients");
  try {
    check_degree_shape(degree);
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  const auto items = split(coeff_section, ',');
  if (precision == 0) {
    // Exact integers: read them wide, then pick the smallest precision that
    // holds every coefficient and leaves d + 2 digits after level reduction.
    precision = default_precision(degree);
    for (std::string_view item : items) {
      const RingElem wide = RingElem::parse(item, kMaxPrecision);
      const Valuation v = wide.valuation();
      if (v.infinite) throw ParseError("zero coefficient '" + std::string(item) + "'");
      const int q = v.value / degree;
      precision = std::max(precision, q * degree + degree + 2);
      const bool negative = trim_view(item).front() == '-';
      if (!negative) {
        const int bits = 64 - std::countl_zero(wide.a() | wide.b());
        precision = std::max(precision, bits);
      }
    }
    if (precision > kMaxPrecision) throw PrecisionError("coefficients need more than 63 digits");
  }
  std::vector<RingElem> coeffs;
  for (std::string_view item : items) coeffs.push_back(RingElem::parse(item, precision));
  return AdditiveForm(degree, precision, std::move(coeffs));
}

std::string format_form_text(const AdditiveForm& f) {
  std::ostringstream os;
  os << "d=" << f.degree << "; K=" << f.precision << "; ";
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i > 0) os << ", ";
    os << f.coeffs[i].to_string();
  }
  return os.str();
}

}  // namespace padicforms
