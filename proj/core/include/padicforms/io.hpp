#pragma once

// JSON encodings. Ring elements are [a, b] for a + b w; output is
// deterministic unless timings are requested.

#include <string_view>

#include <nlohmann/json.hpp>

#include "padicforms/artifacts.hpp"

namespace padicforms {

using Json = nlohmann::ordered_json;

Json to_json(const RingElem& x);
Json to_json(const AdditiveForm& f);
Json to_json(const Witness& w);
Json to_json(const ContractionCertificate& cert);
Json to_json(const AnisotropyCertificate& cert);
Json to_json(const IsotropyResult& r, bool timings = false);
Json to_json(const SweepReport& r, bool timings = false);
Json to_json(const GammaStats& g, bool timings = false);
Json to_json(const ReproduceRow& row, bool timings = false);

/// {degree, precision, coeffs: [[a, b], ...]}. Throws ParseError.
AdditiveForm form_from_json(const Json& j);
/// {assignment: [[a, b], ...], primitive_index, target_valuation}, at the
/// given precision.
Witness witness_from_json(const Json& j, int precision);

/// JSON when the text starts with '{', else the plain text format.
AdditiveForm read_form(std::string_view text);

}  // namespace padicforms
