#pragma once

// Seeded random inputs and the fixture families used by the CLI and tests.
//
// Random numbers come from std::mt19937_64 (fully specified by the C++
// standard). A uniform double in [0, 1) is (r >> 11) * 2^-53 for a raw 64-bit
// draw r; integers in [0, k) are r mod k. The library distributions are not
// used because their output is implementation-defined.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mcgauge/algebroid.hpp"

namespace mcg {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int below(int k) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(k)); }
  bool coin() { return (eng_() >> 63) != 0; }

 private:
  std::mt19937_64 eng_;
};

inline std::vector<Point> random_points(Rng& rng, int n, int count, double lo = -1.0, double hi = 1.0) {
  std::vector<Point> out(count, Point(n));
  for (auto& x : out)
    for (auto& v : x) v = rng.uniform(lo, hi);
  return out;
}

/// Tensor lattice with `count` points per axis over [lo, hi].
inline std::vector<Point> lattice_points(int n, double lo, double hi, int count) {
  if (count < 1) throw InputError("lattice: count must be >= 1");
  std::vector<Point> out{Point{}};
  for (int a = 0; a < n; ++a) {
    std::vector<Point> next;
    for (const auto& p : out)
      for (int i = 0; i < count; ++i) {
        Point q = p;
        q.push_back(count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (count - 1));
        next.push_back(std::move(q));
      }
    out = std::move(next);
  }
  return out;
}

/// Random element of the given parity. Vector fields use monomials of degree ≤ 2.
inline Matrix random_element(Rng& rng, const AlgebraSpec& spec, Parity parity, double scale = 1.0) {
  if (spec.kind() == AlgebraSpec::Kind::VectPi) {
    const int m = spec.m();
    std::vector<VectorFieldTerm> terms;
    for (Mask J = 0; J < (Mask{1} << m); ++J) {
      const int d = grassmann::degree(J);
      if (d > 2 || ((d + 1) % 2) != static_cast<int>(parity)) continue;
      for (int k = 0; k < m; ++k) {
        std::vector<int> idx;
        for (int i = 0; i < m; ++i)
          if (J & (Mask{1} << i)) idx.push_back(i);
        terms.push_back({k, idx, scale * rng.uniform(-1.0, 1.0)});
      }
    }
    return vect_field(m, terms).matrix();
  }
  const int d = spec.rep_size();
  Matrix a(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) a(r, c) = scale * rng.uniform(-1.0, 1.0);
  return parity == Parity::Even ? even_projection(spec, a) : odd_projection(spec, a);
}

/// Random odd cylinder form: form degree ≤ 2 in (dt, dx), polynomial degree ≤ `poly_degree` in (x, t).
inline PolyForm random_cylinder_form(Rng& rng, int n, const AlgebraSpec& spec, int poly_degree = 2, double scale = 0.5,
                                     int monomials_per_term = 2) {
  PolyForm f(n, true, spec);
  const Mask all = Mask{1} << (n + 1);
  for (Mask mask = 0; mask < all; ++mask) {
    const int deg = grassmann::degree(mask);
    if (deg > 2) continue;
    const Parity coeff_parity = deg % 2 == 0 ? Parity::Odd : Parity::Even;
    for (int k = 0; k < monomials_per_term; ++k) {
      Exponents e(n + 1, 0);
      const int total = rng.below(poly_degree + 1);
      for (int s = 0; s < total; ++s) ++e[rng.below(n + 1)];
      f.add_monomial(mask, std::move(e), random_element(rng, spec, coeff_parity, scale));
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Homological elements and nilpotent gauge parameters
// ---------------------------------------------------------------------------

/// Odd C with C² = 0 drawn from a small family per algebra; includes C = 0.
inline SuperElement random_homological(Rng& rng, const AlgebraSpec& spec, std::string* label = nullptr) {
  const int d = spec.rep_size();
  Matrix C = Matrix::Zero(d, d);
  const double a = rng.uniform(0.5, 1.5);
  std::string name = "zero";
  if (spec.kind() == AlgebraSpec::Kind::VectPi) {
    const int m = spec.m();
    const int pick = rng.below(4);
    if (pick == 1) {
      C = a * vect_term_matrix(m, 0, 0, 1.0);
      name = "d/dxi1";
    } else if (pick == 2 && m >= 2) {
      StructureConstants S(m, std::vector<std::vector<double>>(m, std::vector<double>(m, 0.0)));
      S[0][1][1] = a;
      S[1][0][1] = -a;
      C = ce_differential(S).matrix();
      name = "aff(1)";
    } else if (pick == 3 && m >= 3) {
      StructureConstants S = heisenberg_constants();
      for (auto& u : S)
        for (auto& v : u)
          for (auto& w : v) w *= a;
      C = ce_differential(S).matrix();
      name = "heisenberg";
    } else if (pick == 3 && m == 2) {
      C = a * vect_term_matrix(m, 0, 1, 1.0);
      name = "d/dxi2";
    }
  } else {
    const int p = spec.p(), q = spec.q();
    const int pick = rng.below(3);
    if (pick == 1 && p > 0 && q > 0) {
      // one odd column: even rows into a single odd index
      const int col = p + rng.below(q);
      for (int r = 0; r < p; ++r) C(r, col) = rng.uniform(-1.0, 1.0) * a;
      name = "odd column";
    } else if (pick == 2 && p > 0 && q > 0) {
      const int row = p + rng.below(q);
      for (int c = 0; c < p; ++c) C(row, c) = rng.uniform(-1.0, 1.0) * a;
      name = "odd row";
    }
  }
  if (label) *label = name;
  return SuperElement(spec, C);
}

/// Even nilpotent constant N with N² = 0, or nullopt when the algebra has none in this family.
inline std::optional<Matrix> even_nilpotent(Rng& rng, const AlgebraSpec& spec) {
  const int d = spec.rep_size();
  Matrix N = Matrix::Zero(d, d);
  if (spec.kind() == AlgebraSpec::Kind::VectPi) {
    if (spec.m() < 2) return std::nullopt;
    N = vect_term_matrix(spec.m(), Mask{1} << 1, 0, rng.uniform(0.5, 1.0));
    return N;
  }
  if (spec.p() >= 2) {
    N(0, 1) = rng.uniform(0.5, 1.0);
    return N;
  }
  if (spec.q() >= 2) {
    N(spec.p(), spec.p() + 1) = rng.uniform(0.5, 1.0);
    return N;
  }
  return std::nullopt;
}

/// Random even gauge parameters whose exponentials terminate: an x-dependent nilpotent
/// 0-form (when available) and a part of positive form degree.
inline std::vector<PolyForm> random_nilpotent_rhos(Rng& rng, int n, const AlgebraSpec& spec, double scale = 0.4) {
  std::vector<PolyForm> rhos;
  if (auto N = even_nilpotent(rng, spec)) {
    PolyForm r(n, false, spec);
    for (int a = 0; a <= n; ++a) {
      Exponents e(n + 1, 0);
      if (a < n) e[a] = 1;
      r.add_monomial(0, e, scale * rng.uniform(-1.0, 1.0) * *N);
    }
    rhos.push_back(std::move(r));
  }
  PolyForm r(n, false, spec);
  const Mask all = Mask{1} << (n + 1);
  for (Mask mask = 2; mask < all; mask += 2) {
    const int deg = grassmann::degree(mask);
    if (deg > 2) continue;
    const Parity par = deg % 2 == 0 ? Parity::Even : Parity::Odd;
    for (int a = 0; a <= n; ++a) {
      Exponents e(n + 1, 0);
      if (a < n) e[a] = 1;
      r.add_monomial(mask, e, random_element(rng, spec, par, scale));
    }
  }
  if (!r.terms().empty()) rhos.push_back(std::move(r));
  return rhos;
}

struct FlatFixture {
  PolyForm form;
  SuperElement C;
  std::string label;
  std::vector<std::string> warnings;
};

inline FlatFixture random_flat_fixture(Rng& rng, int n, const AlgebraSpec& spec) {
  std::string label;
  SuperElement C = random_homological(rng, spec, &label);
  std::vector<std::string> warnings;
  PolyForm w = gauge_of_constant(C, random_nilpotent_rhos(rng, n, spec), -1, &warnings);
  return FlatFixture{std::move(w), std::move(C), std::move(label), std::move(warnings)};
}

// ---------------------------------------------------------------------------
// Named fixtures
// ---------------------------------------------------------------------------

/// C = E₁₂ in gl(1|1), or the first odd unit in another algebra; C² = 0.
inline PolyForm constant_fixture(int n, const AlgebraSpec& spec) {
  const int d = spec.rep_size();
  Matrix C = Matrix::Zero(d, d);
  if (spec.kind() == AlgebraSpec::Kind::VectPi) {
    C = vect_term_matrix(spec.m(), 0, 0, 1.0);
  } else if (spec.p() > 0 && spec.q() > 0) {
    C(0, spec.p()) = 1.0;
  }
  return PolyForm::constant(n, false, spec, 0, C);
}

/// ω = df in gl(1|0) for f = Σ_a (a+1) x^a + x¹x² (or (x¹)² when n = 1).
inline PolyForm abelian_df_fixture(int n) {
  const AlgebraSpec spec = AlgebraSpec::gl(1, 0);
  PolyForm f(n, false, spec);
  for (int a = 0; a < n; ++a) {
    Exponents e(n + 1, 0);
    e[a] = 1;
    f.add_monomial(0, e, Matrix::Constant(1, 1, a + 1.0));
  }
  if (n >= 2) {
    Exponents e(n + 1, 0);
    e[0] = e[1] = 1;
    f.add_monomial(0, e, Matrix::Constant(1, 1, 1.0));
  } else if (n == 1) {
    f.add_monomial(0, {2, 0}, Matrix::Constant(1, 1, 1.0));
  }
  return exterior_d(f);
}

/// Flat form ω = gCg⁻¹ − dg g⁻¹ with random homological C and nilpotent g.
inline FlatFixture nilpotent_gauge_fixture(std::uint64_t seed, int n, const AlgebraSpec& spec) {
  Rng rng(seed);
  return random_flat_fixture(rng, n, spec);
}

/// Curvature-carrying form: ω = C + x¹ dx¹ C with C = E₁₂ + E₂₁ in gl(1|1), C² = 1.
inline PolyForm nonflat_fixture(int n) {
  const AlgebraSpec spec = AlgebraSpec::gl(1, 1);
  Matrix C = Matrix::Zero(2, 2);
  C(0, 1) = C(1, 0) = 1.0;
  PolyForm f = PolyForm::constant(n, false, spec, 0, C);
  if (n >= 1) {
    Exponents e(n + 1, 0);
    e[0] = 1;
    f.add_monomial(dx_bit(0), e, Matrix::Identity(2, 2));
  }
  return f;
}

/// aff(1) over n = 1 twisted by exp(0.7 x ξ²∂₁) and shifted by dx (0.4 + 0.3x) ∂₂.
inline AlgebroidSpec atiyah_aff1_fixture() {
  Matrix X = Matrix::Zero(2, 2);
  X(1, 0) = 1.0;
  ScalarPoly q = ScalarPoly::constant(1, 0.4);
  q.add_term({1}, 0.3);
  return atiyah_twist(1, aff1_constants(), {{ScalarPoly::variable(1, 0, 0.7), X}}, {{0, 1, q}});
}

/// Heisenberg over n = 2 twisted by exp(x¹ (ξ¹∂₂ + ½ξ²∂₃)) and shifted by x² dx¹ ∂₃ + ½ dx² ∂₁.
inline AlgebroidSpec heisenberg_fixture() {
  Matrix Y = Matrix::Zero(3, 3);
  Y(0, 1) = 1.0;
  Y(1, 2) = 0.5;
  return atiyah_twist(2, heisenberg_constants(), {{ScalarPoly::variable(2, 0, 1.0), Y}},
                      {{0, 2, ScalarPoly::variable(2, 1, 1.0)}, {1, 0, ScalarPoly::constant(2, 0.5)}});
}

/// Constant brackets [e₁,e₂] = e₃, [e₂,e₃] = e₁, [e₁,e₃] = e₁, which break the Jacobi identity.
inline AlgebroidSpec jacobi_violation_fixture(int n = 0) {
  AlgebroidSpec s = AlgebroidSpec::zero(n, 3);
  auto set = [&](int i, int j, int k) {
    s.q_xi_xi[i][j][k] = ScalarPoly::constant(n, 1.0);
    s.q_xi_xi[j][i][k] = ScalarPoly::constant(n, -1.0);
  };
  set(0, 1, 2);
  set(1, 2, 0);
  set(0, 2, 0);
  return s;
}

/// Σ_s (C_ij^s C_sl^k + C_jl^s C_si^k + C_li^s C_sj^k): the Jacobiator of constant brackets.
inline double jacobiator_norm(const StructureConstants& C) {
  const int m = static_cast<int>(C.size());
  double worst = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < m; ++l)
        for (int k = 0; k < m; ++k) {
          double s = 0.0;
          for (int r = 0; r < m; ++r)
            s += C[i][j][r] * C[r][l][k] + C[j][l][r] * C[r][i][k] + C[l][i][r] * C[r][j][k];
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

}  // namespace mcg
