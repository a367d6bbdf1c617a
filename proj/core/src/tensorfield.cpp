// Implementation of the bitmask form algebra. Sign bookkeeping is confined
// to merge_sign and the two Dolbeault operators; everything else reduces to
// component arithmetic.
#include "zcrit/tensorfield.hpp"

#include <bit>
#include <cmath>

namespace zcrit {

namespace {

// epsilon with dz^{1..n} wedge dzbar^{1..n} = eps_factor(n) * dx_1 dy_1 ...
Cx eps_factor(int n) {
  // Reordering into (dz^a wedge dzbar^a) pairs costs (-1)^{n(n-1)/2}; each
  // pair is -2i dx_a dy_a.
  Cx out = (n * (n - 1) / 2) % 2 == 0 ? Cx(1.0, 0.0) : Cx(-1.0, 0.0);
  for (int a = 0; a < n; ++a) out *= Cx(0.0, -2.0);
  return out;
}

}  // namespace

Field TensorField::component(unsigned holo_mask, unsigned anti_mask) const {
  auto it = comps.find({holo_mask, anti_mask});
  return it == comps.end() ? grid.zero_field() : it->second;
}

void TensorField::add_component(unsigned holo_mask, unsigned anti_mask,
                                const Field& f) {
  auto it = comps.find({holo_mask, anti_mask});
  if (it == comps.end())
    comps.emplace(FormKey{holo_mask, anti_mask}, f);
  else
    it->second = add(it->second, f);
}

int merge_sign(unsigned first_mask, unsigned second_mask) {
  // Count inversions: pairs (i in first, j in second) with j < i.
  int inversions = 0;
  for (unsigned j = second_mask; j != 0; j &= j - 1) {
    unsigned bit = j & ~(j - 1);
    unsigned larger_in_first = first_mask & ~(bit | (bit - 1));
    inversions += std::popcount(larger_in_first);
  }
  return inversions % 2 == 0 ? 1 : -1;
}

TensorField function_form(const TorusGrid& grid, const Field& f) {
  TensorField out(grid);
  out.comps[{0u, 0u}] = f;
  return out;
}

TensorField form_add(const TensorField& a, const TensorField& b) {
  TensorField out = a;
  for (const auto& [key, f] : b.comps) out.add_component(key.first, key.second, f);
  return out;
}

TensorField form_subtract(const TensorField& a, const TensorField& b) {
  return form_add(a, form_scale(b, Cx(-1.0, 0.0)));
}

TensorField form_scale(const TensorField& a, Cx s) {
  TensorField out(a.grid);
  for (const auto& [key, f] : a.comps) out.comps[key] = scale(f, s);
  return out;
}

TensorField form_scale_field(const TensorField& a, const Field& f,
                             bool dealias) {
  TensorField out(a.grid);
  for (const auto& [key, comp] : a.comps) {
    Field prod = multiply(comp, f);
    out.comps[key] = dealias ? truncate_band(a.grid, prod) : prod;
  }
  return out;
}

TensorField form_conjugate(const TensorField& a) {
  TensorField out(a.grid);
  for (const auto& [key, f] : a.comps) {
    int pq = std::popcount(key.first) * std::popcount(key.second);
    Field g = conjugate(f);
    out.add_component(key.second, key.first,
                      pq % 2 == 0 ? g : scale(g, Cx(-1.0, 0.0)));
  }
  return out;
}

TensorField wedge(const TensorField& a, const TensorField& b, bool dealias) {
  TensorField out(a.grid);
  for (const auto& [ka, fa] : a.comps) {
    for (const auto& [kb, fb] : b.comps) {
      if ((ka.first & kb.first) != 0 || (ka.second & kb.second) != 0) continue;
      // Move dz^{A2} left past dzbar^{B1}, then merge the two blocks.
      int sign = merge_sign(ka.first, kb.first) *
                 merge_sign(ka.second, kb.second);
      if ((std::popcount(ka.second) * std::popcount(kb.first)) % 2 != 0)
        sign = -sign;
      Field prod = multiply(fa, fb);
      if (dealias) prod = truncate_band(a.grid, prod);
      out.add_component(ka.first | kb.first, ka.second | kb.second,
                        sign > 0 ? prod : scale(prod, Cx(-1.0, 0.0)));
    }
  }
  return out;
}

TensorField partial(const TensorField& a) {
  TensorField out(a.grid);
  for (const auto& [key, f] : a.comps) {
    for (int c = 0; c < a.grid.n; ++c) {
      unsigned bit = 1u << c;
      if (key.first & bit) continue;
      int sign = merge_sign(bit, key.first);
      Field df = dz(a.grid, f, c);
      out.add_component(key.first | bit, key.second,
                        sign > 0 ? df : scale(df, Cx(-1.0, 0.0)));
    }
  }
  return out;
}

TensorField partial_bar(const TensorField& a) {
  TensorField out(a.grid);
  for (const auto& [key, f] : a.comps) {
    for (int c = 0; c < a.grid.n; ++c) {
      unsigned bit = 1u << c;
      if (key.second & bit) continue;
      int sign = merge_sign(bit, key.second);
      if (std::popcount(key.first) % 2 != 0) sign = -sign;
      Field df = dzbar(a.grid, f, c);
      out.add_component(key.first, key.second | bit,
                        sign > 0 ? df : scale(df, Cx(-1.0, 0.0)));
    }
  }
  return out;
}

TensorField exterior_d(const TensorField& a) {
  return form_add(partial(a), partial_bar(a));
}

Field top_coefficient(const TensorField& a) {
  unsigned full = (1u << a.grid.n) - 1u;
  return scale(a.component(full, full), eps_factor(a.grid.n));
}

Cx form_integral(const TensorField& a) { return mean(top_coefficient(a)); }

double form_max_abs(const TensorField& a) {
  double worst = 0.0;
  for (const auto& [key, f] : a.comps) worst = std::max(worst, max_abs(f));
  return worst;
}

EndForm end_identity(const TorusGrid& grid, int rank) {
  EndForm out(grid, rank);
  for (int i = 0; i < rank; ++i)
    out.at(i, i) = function_form(grid, grid.constant_field(Cx(1.0, 0.0)));
  return out;
}

EndForm end_add(const EndForm& a, const EndForm& b) {
  EndForm out = a;
  for (int i = 0; i < a.rank; ++i)
    for (int j = 0; j < a.rank; ++j)
      out.at(i, j) = form_add(a.at(i, j), b.at(i, j));
  return out;
}

EndForm end_subtract(const EndForm& a, const EndForm& b) {
  return end_add(a, end_scale(b, Cx(-1.0, 0.0)));
}

EndForm end_scale(const EndForm& a, Cx s) {
  EndForm out = a;
  for (auto& e : out.entries) e = form_scale(e, s);
  return out;
}

EndForm end_wedge(const EndForm& a, const EndForm& b, bool dealias) {
  EndForm out(a.grid, a.rank);
  for (int i = 0; i < a.rank; ++i)
    for (int j = 0; j < a.rank; ++j)
      for (int k = 0; k < a.rank; ++k)
        out.at(i, j) =
            form_add(out.at(i, j), wedge(a.at(i, k), b.at(k, j), dealias));
  return out;
}

TensorField end_trace(const EndForm& a) {
  TensorField out(a.grid);
  for (int i = 0; i < a.rank; ++i) out = form_add(out, a.at(i, i));
  return out;
}

double end_max_abs(const EndForm& a) {
  double worst = 0.0;
  for (const auto& e : a.entries) worst = std::max(worst, form_max_abs(e));
  return worst;
}

}  // namespace zcrit
