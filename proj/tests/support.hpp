#pragma once

#include <cstdint>
#include <vector>

#include "mcgauge/fixtures.hpp"

namespace mcg::test {

/// Homogeneous form of total parity `parity`, form degree ≤ max_form_degree, polynomial degree ≤ poly_degree.
inline PolyForm random_form(Rng& rng, int n, bool has_t, const AlgebraSpec& spec, Parity parity, int poly_degree = 2,
                            int max_form_degree = 3, int monomials = 2) {
  PolyForm f(n, has_t, spec);
  const int gens = n + 1;
  for (Mask mask = 0; mask < (Mask{1} << gens); ++mask) {
    if (!has_t && (mask & kDt)) continue;
    const int deg = grassmann::degree(mask);
    if (deg > max_form_degree) continue;
    const Parity cp = ((deg + static_cast<int>(parity)) & 1) ? Parity::Odd : Parity::Even;
    for (int k = 0; k < monomials; ++k) {
      Exponents e(n + 1, 0);
      const int total = rng.below(poly_degree + 1);
      const int vars = has_t ? n + 1 : n;
      for (int s = 0; s < total && vars > 0; ++s) ++e[rng.below(vars)];
      f.add_monomial(mask, std::move(e), random_element(rng, spec, cp, 1.0));
    }
  }
  return f;
}

inline Parity random_parity(Rng& rng) { return rng.coin() ? Parity::Odd : Parity::Even; }

inline AlgebraSpec algebra_by_index(int i) {
  switch (i % 4) {
    case 0:
      return AlgebraSpec::gl(1, 1);
    case 1:
      return AlgebraSpec::gl(2, 1);
    case 2:
      return AlgebraSpec::vect_pi(2);
    default:
      return AlgebraSpec::gl(1, 2);
  }
}

/// Jet of an explicitly known gauge form G at x: g = G(x), g⁻¹ = G⁻¹(x), ∂_a g = (∂_a G)(x).
inline GaugeJet jet_of(const PolyForm& G, const PolyForm& G_inv, const Point& x) {
  GaugeJet j{x, evaluate(G, x), evaluate(G_inv, x), {}, std::nullopt, 0.0};
  for (int a = 0; a < G.n(); ++a) j.dg_partials.push_back(evaluate(G.coeff_derivative(a), x));
  return j;
}

inline Matrix unit(int d, int r, int c) {
  Matrix m = Matrix::Zero(d, d);
  m(r, c) = 1.0;
  return m;
}

}  // namespace mcg::test

namespace mcg::test {

/// Polynomial map of degree ≤ 2 from (x¹..x^ns[, t]) to nt coordinates.
inline PolyMap random_map(Rng& rng, int ns, int nt, bool has_t) {
  PolyMap f{ns, has_t, {}};
  const int vars = has_t ? ns + 1 : ns;
  for (int c = 0; c < nt; ++c) {
    ScalarPoly p(ns + 1);
    for (int k = 0; k < 3; ++k) {
      Exponents e(ns + 1, 0);
      const int total = rng.below(3);
      for (int s = 0; s < total && vars > 0; ++s) ++e[rng.below(vars)];
      p.add_term(e, rng.uniform(-1.0, 1.0));
    }
    f.components.push_back(std::move(p));
  }
  return f;
}

}  // namespace mcg::test

namespace mcg::test {

/// A flat fixture together with its symbolic gauge G = exp(ρ_k)···exp(ρ_1) and inverse.
struct KnownGauge {
  PolyForm form, G, G_inv;
  SuperElement C;
};

inline KnownGauge known_gauge(const SuperElement& C, const std::vector<PolyForm>& rhos) {
  const PolyForm& first = rhos.front();
  const int order = first.n() + 2;
  const Matrix one = Matrix::Identity(first.rep_size(), first.rep_size());
  PolyForm G = PolyForm::constant(first.n(), false, first.spec(), 0, one), G_inv = G;
  for (const auto& rho : rhos) {
    G = form_product(symbolic_exp(rho, order), G);
    G_inv = form_product(G_inv, symbolic_exp(-1.0 * rho, order));
  }
  return KnownGauge{gauge_of_constant(C, rhos, order), std::move(G), std::move(G_inv), C};
}

inline KnownGauge random_known_gauge(Rng& rng, int n, const AlgebraSpec& spec) {
  const SuperElement C = random_homological(rng, spec);
  return known_gauge(C, random_nilpotent_rhos(rng, n, spec));
}

}  // namespace mcg::test
