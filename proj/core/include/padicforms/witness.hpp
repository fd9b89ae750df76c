#pragma once

#include <cstddef>
#include <vector>

#include "padicforms/forms.hpp"

namespace padicforms {

/// A nontrivial zero modulo 2^target_valuation in some form's own frame.
struct Witness {
  std::vector<RingElem> assignment;
  std::size_t primitive_index = 0;
  int target_valuation = 0;
};

/// Passes iff sum a_i x_i^d vanishes modulo 2^V, x_p is a unit and
/// V >= level(a_p) + 3 (so the zero lifts by Hensel's lemma).
bool verify_witness(const AdditiveForm& f, const Witness& w);

}  // namespace padicforms
