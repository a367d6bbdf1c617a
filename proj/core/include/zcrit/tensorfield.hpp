// Exterior algebra over a torus grid. A TensorField stores one scalar field
// per (holomorphic, antiholomorphic) index-set pair, i.e. the coefficient of
// dz^A wedge dzbar^B with both blocks sorted ascending; wedge products and
// Dolbeault derivatives track the resulting signs. Endomorphism-valued forms
// are square arrays of TensorFields reusing the same scalar algebra.
#pragma once

#include <map>
#include <utility>
#include <vector>

#include "zcrit/torus.hpp"

namespace zcrit {

// Key: bitmasks over the n complex axes for the dz block and the dzbar block.
using FormKey = std::pair<unsigned, unsigned>;

struct TensorField {
  TorusGrid grid;
  std::map<FormKey, Field> comps;

  TensorField() = default;
  explicit TensorField(const TorusGrid& g) : grid(g) {}

  // Coefficient of dz^A wedge dzbar^B; zero field when absent.
  Field component(unsigned holo_mask, unsigned anti_mask) const;
  void add_component(unsigned holo_mask, unsigned anti_mask, const Field& f);
  bool empty() const { return comps.empty(); }
};

// Sign of the permutation that merges two disjoint ascending index blocks.
int merge_sign(unsigned first_mask, unsigned second_mask);

TensorField function_form(const TorusGrid& grid, const Field& f);
TensorField form_add(const TensorField& a, const TensorField& b);
TensorField form_subtract(const TensorField& a, const TensorField& b);
TensorField form_scale(const TensorField& a, Cx s);
TensorField form_scale_field(const TensorField& a, const Field& f,
                             bool dealias);
TensorField form_conjugate(const TensorField& a);

// Wedge product. With dealias set, every component product is band-truncated
// (metric pipelines); without, products are exact polynomial algebra (bundle
// pipelines on band-limited data).
TensorField wedge(const TensorField& a, const TensorField& b, bool dealias);

// Dolbeault operators and their sum d = partial + partial_bar.
TensorField partial(const TensorField& a);
TensorField partial_bar(const TensorField& a);
TensorField exterior_d(const TensorField& a);

// Coefficient of the real volume element dx_1 dy_1 ... dx_n dy_n in a top-
// degree form (other components must be absent or zero).
Field top_coefficient(const TensorField& a);
// Integral of a top-degree form over the unit-volume torus.
Cx form_integral(const TensorField& a);
// Largest absolute component value, for residual checks.
double form_max_abs(const TensorField& a);

// Endomorphism-valued form: r x r array of TensorFields, row-major.
struct EndForm {
  TorusGrid grid;
  int rank = 1;
  std::vector<TensorField> entries;

  EndForm() = default;
  EndForm(const TorusGrid& g, int r)
      : grid(g), rank(r), entries(static_cast<std::size_t>(r) * r, TensorField(g)) {}

  TensorField& at(int i, int j) { return entries[static_cast<std::size_t>(i) * rank + j]; }
  const TensorField& at(int i, int j) const {
    return entries[static_cast<std::size_t>(i) * rank + j];
  }
};

EndForm end_identity(const TorusGrid& grid, int rank);
EndForm end_add(const EndForm& a, const EndForm& b);
EndForm end_subtract(const EndForm& a, const EndForm& b);
EndForm end_scale(const EndForm& a, Cx s);
// Composition-wedge: (a ^ b)[i][j] = sum_k a[i][k] ^ b[k][j].
EndForm end_wedge(const EndForm& a, const EndForm& b, bool dealias);
TensorField end_trace(const EndForm& a);
double end_max_abs(const EndForm& a);

}  // namespace zcrit
