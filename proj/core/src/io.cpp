#include "padicforms/io.hpp"

#include <algorithm>
#include <cctype>

namespace padicforms {

namespace {

RingElem elem_from_json(const Json& j, int precision) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw ParseError("ring element must be [a, b] with integer entries");
  }
  const auto a = j[0].get<std::int64_t>();
  const auto b = j[1].get<std::int64_t>();
  return RingElem::from_int(a, precision) + RingElem::w(precision) * RingElem::from_int(b, precision);
}

int int_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) throw ParseError(std::string("missing integer field '") + key + "'");
  return j[key].get<int>();
}

Json pair_list(const std::vector<RingElem>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(to_json(x));
  return out;
}

Json step_to_json(const DescentStep& s) {
  return Json{{"base_level", s.base_level},
              {"window", s.window},
              {"forced", s.forced},
              {"window_values", pair_list(s.window_values)}};
}

}  // namespace

Json to_json(const RingElem& x) { return Json::array({x.a(), x.b()}); }

Json to_json(const AdditiveForm& f) {
  return Json{{"degree", f.degree}, {"precision", f.precision}, {"coeffs", pair_list(f.coeffs)}};
}

Json to_json(const Witness& w) {
  return Json{{"assignment", pair_list(w.assignment)},
              {"primitive_index", w.primitive_index},
              {"target_valuation", w.target_valuation}};
}

Json to_json(const ContractionCertificate& cert) {
  // Each node carries the multiplier its parent applied to it.
  std::vector<const MultiplierChoice*> applied(cert.nodes.size(), nullptr);
  for (const auto& n : cert.nodes) {
    for (std::size_t k = 0; k < n.children.size(); ++k) {
      applied.at(static_cast<std::size_t>(n.children[k])) = &n.choices[k];
    }
  }
  Json nodes = Json::array();
  for (const auto& n : cert.nodes) {
    Json j{{"id", n.id}, {"kind", n.kind == NodeKind::kLeaf ? "leaf" : "contraction"}};
    if (n.kind == NodeKind::kLeaf) {
      j["variable"] = n.leaf_index;
      j["scale"] = n.leaf_scale;
    } else {
      j["children"] = n.children;
      j["move"] = to_string(n.move);
    }
    if (const MultiplierChoice* c = applied[static_cast<std::size_t>(n.id)]) {
      const auto it = std::find_if(cert.multipliers.begin(), cert.multipliers.end(), [&](const Multiplier& m) {
        return m.class_index == c->class_index && m.epsilon == c->epsilon;
      });
      j["multiplier"] = it == cert.multipliers.end() ? Json(nullptr) : to_json(it->value);
      j["epsilon"] = c->epsilon;
    }
    j["value"] = to_json(n.coeff.value());
    j["known"] = n.coeff.known();
    j["level"] = n.level ? Json(*n.level) : Json(nullptr);
    nodes.push_back(std::move(j));
  }
  return Json{{"degree", cert.degree}, {"precision", cert.precision}, {"root", cert.root},
              {"anchor", cert.anchor_leaf}, {"anchor_level", cert.anchor_level},
              {"achieved", cert.achieved_level}, {"nodes", std::move(nodes)}};
}

Json to_json(const AnisotropyCertificate& cert) {
  if (cert.kind == AnisotropyCertificate::Kind::kExhaustion) {
    return Json{{"kind", "exhaustion"}, {"M", cert.modulus}, {"statesVisited", cert.states_visited}};
  }
  Json steps = Json::array();
  for (const auto& s : cert.steps) steps.push_back(step_to_json(s));
  return Json{{"kind", "descent"}, {"steps", std::move(steps)}};
}

Json to_json(const IsotropyResult& r, bool timings) {
  Json j{{"verdict", to_string(r.verdict)}, {"stage", to_string(r.stage)}};
  if (r.witness) j["witness"] = to_json(*r.witness);
  if (r.certificate) j["certificate"] = to_json(*r.certificate);
  if (r.anisotropy) j["anisotropy"] = to_json(*r.anisotropy);
  if (r.certificate || r.anisotropy) j["working_form"] = to_json(r.working_form);
  j["above_threshold"] = r.above_threshold;
  j["search_nodes"] = r.search_nodes;
  if (!r.diagnostics.empty()) j["diagnostics"] = r.diagnostics;
  if (timings) {
    j["timings_ms"] = Json{{"normalize", r.timings.normalize_ms},
                           {"search", r.timings.search_ms},
                           {"descent", r.timings.descent_ms},
                           {"oracle", r.timings.oracle_ms}};
  }
  return j;
}

Json to_json(const SweepReport& r, bool timings) {
  Json j{{"lemma", r.lemma},
         {"degree", r.degree},
         {"type", r.type},
         {"mode", to_string(r.mode)},
         {"space", r.space},
         {"configurations", r.configurations}};
  if (r.mode == SweepMode::kSampled) {
    j["samples"] = r.samples;
    j["seed"] = r.seed;
  }
  j["failures"] = r.failure_count;
  j["budget_exhausted"] = r.budget_exhausted;
  j["escalated"] = r.escalated;
  j["extra_digits"] = r.extra_digits;
  j["passed"] = r.passed();
  j["failing_configurations"] = r.failures;
  if (timings) j["seconds"] = r.seconds;
  return j;
}

Json to_json(const GammaStats& g, bool timings) {
  Json archived = Json::array(), examples = Json::array();
  for (const auto& f : g.archived) archived.push_back(to_json(f));
  for (const auto& f : g.anisotropic_examples) examples.push_back(to_json(f));
  Json j{{"degree", g.degree},
         {"s", g.s},
         {"trials", g.trials},
         {"seed", g.seed},
         {"isotropic", g.isotropic},
         {"anisotropic", g.anisotropic},
         {"inconclusive", g.inconclusive},
         {"witness_failures", g.witness_failures},
         {"archived", std::move(archived)},
         {"anisotropic_examples", std::move(examples)}};
  if (timings) j["seconds"] = g.seconds;
  return j;
}

Json to_json(const ReproduceRow& row, bool timings) {
  Json j{{"item", row.item}, {"passed", row.passed}, {"detail", row.detail}};
  if (timings) j["seconds"] = row.seconds;
  return j;
}

AdditiveForm form_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("form must be a JSON object");
  const int degree = int_field(j, "degree");
  const int precision = j.contains("precision") ? int_field(j, "precision") : default_precision(degree);
  check_precision(precision);
  if (!j.contains("coeffs") || !j["coeffs"].is_array() || j["coeffs"].empty()) {
    throw ParseError("form needs a nonempty 'coeffs' array");
  }
  std::vector<RingElem> coeffs;
  for (const auto& c : j["coeffs"]) coeffs.push_back(elem_from_json(c, precision));
  return AdditiveForm(degree, precision, std::move(coeffs));
}

Witness witness_from_json(const Json& j, int precision) {
  if (!j.is_object() || !j.contains("assignment") || !j["assignment"].is_array()) {
    throw ParseError("witness needs an 'assignment' array");
  }
  Witness w;
  for (const auto& x : j["assignment"]) w.assignment.push_back(elem_from_json(x, precision));
  const int idx = int_field(j, "primitive_index");
  if (idx < 0) throw ParseError("primitive_index must be nonnegative");
  w.primitive_index = static_cast<std::size_t>(idx);
  w.target_valuation = j.contains("target_valuation") ? int_field(j, "target_valuation") : precision;
  return w;
}

AdditiveForm read_form(std::string_view text) {
  const auto first = std::find_if(text.begin(), text.end(), [](char c) { return !std::isspace(static_cast<unsigned char>(c)); });
  if (first != text.end() && *first == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return form_from_json(j);
  }
  return parse_form_text(text);
}

}  // namespace padicforms
