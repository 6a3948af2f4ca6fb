#pragma once

// Transitive Lie algebroids over a chart with purely odd standard fiber ΠV:
// structure functions, the homological condition, and Strobl-gauge
// normalisation through the multiplicative primitive.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "mcgauge/poincare.hpp"

namespace mcg {

/// Q_{ij}^k, Q_{ai}^k, Q_{ab}^k as polynomials in x¹..xⁿ (n variables).
/// Indices are 0-based: q_xi_xi[i][j][k], q_dx_xi[a][i][k], q_dx_dx[a][b][k].
struct AlgebroidSpec {
  int n = 0;
  int m = 0;
  std::vector<std::vector<std::vector<ScalarPoly>>> q_xi_xi;
  std::vector<std::vector<std::vector<ScalarPoly>>> q_dx_xi;
  std::vector<std::vector<std::vector<ScalarPoly>>> q_dx_dx;

  static AlgebroidSpec zero(int n, int m) {
    if (n < 0 || m < 1 || n + m > 12) throw IndexError("algebroid: need n >= 0, m >= 1, n + m <= 12");
    auto cube = [](int a, int b, int c, int vars) {
      return std::vector(a, std::vector(b, std::vector<ScalarPoly>(c, ScalarPoly(vars))));
    };
    return AlgebroidSpec{n, m, cube(m, m, m, n), cube(n, m, m, n), cube(n, n, m, n)};
  }

  /// Throws AntisymmetryError unless Q_{ij} = −Q_{ji} and Q_{ab} = −Q_{ba}.
  void validate(double tol = 1e-13) const {
    if (static_cast<int>(q_xi_xi.size()) != m || static_cast<int>(q_dx_xi.size()) != n ||
        static_cast<int>(q_dx_dx.size()) != n)
      throw IndexError("algebroid: structure function arrays have wrong shape");
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          if ((q_xi_xi[i][j][k] + q_xi_xi[j][i][k]).max_abs_coeff() > tol)
            throw AntisymmetryError("Q_xi_xi not antisymmetric at (i,j,k) = (" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + "," + std::to_string(k + 1) + ")");
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int k = 0; k < m; ++k)
          if ((q_dx_dx[a][b][k] + q_dx_dx[b][a][k]).max_abs_coeff() > tol)
            throw AntisymmetryError("Q_dx_dx not antisymmetric at (a,b,k) = (" + std::to_string(a + 1) + "," +
                                    std::to_string(b + 1) + "," + std::to_string(k + 1) + ")");
  }

  /// Constants C_{ij}^k as an x-independent spec.
  static AlgebroidSpec constant(int n, const StructureConstants& C) {
    AlgebroidSpec s = zero(n, static_cast<int>(C.size()));
    for (int i = 0; i < s.m; ++i)
      for (int j = 0; j < s.m; ++j)
        for (int k = 0; k < s.m; ++k) s.q_xi_xi[i][j][k] = ScalarPoly::constant(n, C[i][j][k]);
    return s;
  }

  /// Q_{ij}^k evaluated at a point.
  StructureConstants xi_xi_at(std::span<const double> x) const {
    StructureConstants out(m, std::vector<std::vector<double>>(m, std::vector<double>(m, 0.0)));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) out[i][j][k] = q_xi_xi[i][j][k].evaluate(x, 0.0);
    return out;
  }
};

namespace detail {

/// n-variable polynomial lifted to the n+1 variables of form coefficients (t last).
inline ScalarPoly lift_t(const ScalarPoly& p) {
  ScalarPoly r(p.nvars() + 1);
  for (const auto& [e, c] : p.terms()) {
    Exponents f = e;
    f.push_back(0);
    r.add_term(std::move(f), c);
  }
  return r;
}

inline ScalarPoly drop_t(const ScalarPoly& p) {
  ScalarPoly r(p.nvars() - 1);
  for (const auto& [e, c] : p.terms()) r.add_term(Exponents(e.begin(), e.end() - 1), c);
  return r;
}

inline void add_field(PolyForm& f, Mask mask, const ScalarPoly& coeff, int m, Mask J, int k, double sign) {
  if (coeff.empty()) return;
  const Matrix op = vect_term_matrix(m, J, k, sign);
  f.add_term(mask, lift_t(coeff) * MatrixPoly::constant(f.nvars(), op));
}

}  // namespace detail

/// ω = ½(ξ^iξ^jQ_{ji}^k + 2ξ^i dx^a Q_{ai}^k + dx^a dx^b Q_{ba}^k) ∂/∂ξ^k on the n-chart, valued in VectPi(m).
inline PolyForm algebroid_to_form(const AlgebroidSpec& s) {
  s.validate();
  PolyForm f(s.n, false, AlgebraSpec::vect_pi(s.m));
  for (int i = 0; i < s.m; ++i)
    for (int j = i + 1; j < s.m; ++j)
      for (int k = 0; k < s.m; ++k)
        detail::add_field(f, 0, s.q_xi_xi[j][i][k], s.m, (Mask{1} << i) | (Mask{1} << j), k, 1.0);
  // ξ^i dx^a = −dx^a ξ^i
  for (int a = 0; a < s.n; ++a)
    for (int i = 0; i < s.m; ++i)
      for (int k = 0; k < s.m; ++k) detail::add_field(f, dx_bit(a), s.q_dx_xi[a][i][k], s.m, Mask{1} << i, k, -1.0);
  for (int a = 0; a < s.n; ++a)
    for (int b = a + 1; b < s.n; ++b)
      for (int k = 0; k < s.m; ++k) detail::add_field(f, dx_bit(a) | dx_bit(b), s.q_dx_dx[b][a][k], s.m, 0, k, 1.0);
  return f;
}

/// Largest |coefficient| of the parts of `f` whose weight (form degree + vector-field weight) is not `weight`.
inline double weight_defect(const PolyForm& f, int weight) {
  double worst = 0.0;
  for (const auto& [mask, p] : f.terms())
    for (const auto& [e, c] : p.terms())
      for (int r = 0; r < c.rows(); ++r)
        for (int k = 0; k < c.cols(); ++k) {
          const int w = grassmann::degree(mask) + grassmann::degree(r) - grassmann::degree(k);
          if (w != weight) worst = std::max(worst, std::abs(c(r, k)));
        }
  return worst;
}

/// Inverse of algebroid_to_form for a weight-+1 derivation-valued form.
inline AlgebroidSpec algebroid_from_form(const PolyForm& f, double tol = 1e-12) {
  if (f.spec().kind() != AlgebraSpec::Kind::VectPi) throw SpecMismatch("algebroid form must take values in vect_pi");
  if (f.has_t()) throw SpecMismatch("algebroid form must not depend on t");
  const double wd = weight_defect(f, 1);
  if (wd > tol) throw InputError("algebroid form is not homogeneous of weight +1 (defect " + std::to_string(wd) + ")");
  AlgebroidSpec s = AlgebroidSpec::zero(f.n(), f.spec().m());
  for (const auto& [mask, p] : f.terms()) {
    const int deg = grassmann::degree(mask);
    std::vector<int> dxs;
    for (int a = 0; a < f.n(); ++a)
      if (mask & dx_bit(a)) dxs.push_back(a);
    for (const auto& [e, c] : p.terms()) {
      Exponents ex(e.begin(), e.end() - 1);
      for (const auto& t : decompose_vector_field(SuperElement(f.spec(), c))) {
        if (std::abs(t.c) <= tol) continue;
        ScalarPoly one(f.n());
        one.add_term(ex, t.c);
        if (deg == 0 && t.J.size() == 2) {
          s.q_xi_xi[t.J[1]][t.J[0]][t.k] += one;
          s.q_xi_xi[t.J[0]][t.J[1]][t.k] -= one;
        } else if (deg == 1 && t.J.size() == 1) {
          s.q_dx_xi[dxs[0]][t.J[0]][t.k] -= one;
        } else if (deg == 2 && t.J.empty()) {
          s.q_dx_dx[dxs[1]][dxs[0]][t.k] += one;
          s.q_dx_dx[dxs[0]][dxs[1]][t.k] -= one;
        } else {
          throw InputError("algebroid form has a component outside the transitive algebroid pattern");
        }
      }
    }
  }
  return s;
}

struct HomologicalReport {
  PolyForm curvature;
  double max_coeff = 0.0;
  std::string witness;  ///< empty when the curvature vanishes
};

/// Exact curvature of algebroid_to_form(spec); zero iff Q² = 0.
inline HomologicalReport check_homological(const AlgebroidSpec& s) {
  const PolyForm w = algebroid_to_form(s);
  HomologicalReport rep{curvature(w), 0.0, {}};
  rep.max_coeff = rep.curvature.max_abs_coeff();
  if (rep.max_coeff == 0.0) return rep;
  // locate the worst (monomial, x-power) coefficient and name its vector-field component
  double best = -1.0;
  for (const auto& [mask, p] : rep.curvature.terms())
    for (const auto& [e, c] : p.terms())
      for (const auto& t : decompose_vector_field(SuperElement(w.spec(), c))) {
        if (std::abs(t.c) <= best) continue;
        best = std::abs(t.c);
        std::ostringstream os;
        os << "xi^(";
        for (std::size_t i = 0; i < t.J.size(); ++i) os << (i ? "," : "") << t.J[i] + 1;
        os << ") d/dxi^" << t.k + 1;
        if (mask) {
          os << " on dx^(";
          bool first = true;
          for (int a = 0; a < s.n; ++a)
            if (mask & dx_bit(a)) {
              os << (first ? "" : ",") << a + 1;
              first = false;
            }
          os << ")";
        }
        os << " at x^[";
        for (std::size_t i = 0; i + 1 < e.size(); ++i) os << (i ? "," : "") << e[i];
        os << "] coefficient " << t.c;
        if (mask == 0 && t.J.size() == 3)
          os << " (Jacobi violated for (i,j,l,k) = (" << t.J[0] + 1 << "," << t.J[1] + 1 << "," << t.J[2] + 1 << ","
             << t.k + 1 << "))";
        rep.witness = os.str();
      }
  if (rep.witness.empty()) rep.witness = largest_coefficients(rep.curvature, 1).front().describe();
  return rep;
}

/// The chart data carries no Q^a components: the dx-part of Q is always dx^a ∂/∂x^a,
/// so the projection to (x, dx) is a Q-morphism and the algebroid is transitive.
inline bool anchor_check(const AlgebroidSpec& s, std::string* note = nullptr) {
  s.validate();
  if (note) *note = "anchor is the projection to (x, dx); transitivity is built into the chart representation";
  return true;
}

struct StroblGauge {
  StructureConstants C_struct;
  Point base;
  std::vector<Point> samples;
  std::vector<Matrix> A_samples;     ///< ξ = η·A(x) + β: A(i,k) = A_i^k (m×m)
  std::vector<Matrix> beta_samples;  ///< β(a,k) = coefficient of dx^a in β^k (n×m)
  double jacobi_residual = 0.0;      ///< ‖[C,C]‖ for the recovered constants
  std::vector<double> recon_residuals;
  std::vector<double> chart_residuals;  ///< ‖Q(η^k) − ½η^iη^jC_{ji}^k‖ in the new chart
  std::vector<double> affine_defects;   ///< components of g(ξ^k) off the degree-1 monomials
  std::vector<double> automorphism_defects;
  double base_mismatch = 0.0;  ///< max |C_{ij}^k − Q_{ij}^k(base)|, zero by construction
  double c_square_norm = 0.0;
};

namespace detail {

struct AffinePart {
  Matrix A, beta;
  double defect = 0.0;
};

/// Degree-1 part of the action of an operator on Λ(dx, ξ) on the fiber generators.
inline AffinePart affine_action(const Matrix& G, int n, int m) {
  AffinePart r{Matrix::Zero(m, m), Matrix::Zero(n, m), 0.0};
  for (int k = 0; k < m; ++k) {
    const int col = 1 << (n + k);
    for (int row = 0; row < G.rows(); ++row) {
      const double v = G(row, col);
      if (grassmann::degree(static_cast<Mask>(row)) != 1) {
        r.defect = std::max(r.defect, std::abs(v));
        continue;
      }
      const int bit = std::countr_zero(static_cast<unsigned>(row));
      if (bit >= n)
        r.A(bit - n, k) = v;
      else
        r.beta(bit, k) = v;
    }
  }
  return r;
}

}  // namespace detail

inline constexpr double kAffineTol = 1e-8;

/// Brings Q = d + ω to the form d + C with constant C through the multiplicative
/// primitive based at `base`.
inline StroblGauge strobl_normalize(const AlgebroidSpec& s, const Point& base, const std::vector<Point>& samples,
                                    const IntegratorConfig& cfg, double flat_tol = kDefaultFlatTol) {
  const HomologicalReport hom = check_homological(s);
  if (hom.max_coeff > flat_tol)
    throw NotHomological("structure functions do not satisfy Q^2 = 0 (max curvature coefficient " +
                             std::to_string(hom.max_coeff) + ")",
                         hom.witness);
  const PolyForm w = algebroid_to_form(s);
  const PrimitiveResult prim = poincare_primitive(w, base, samples, cfg, flat_tol);
  const int n = s.n, m = s.m;

  StroblGauge out;
  out.C_struct = structure_constants_of(prim.C);
  out.base = base;
  out.samples = samples;
  out.recon_residuals = prim.recon_residuals;
  out.c_square_norm = prim.c_square_norm;
  const SuperElement Ct = ce_differential(out.C_struct);
  out.jacobi_residual = supercommutator(Ct, Ct).norm();
  const StructureConstants at_base = s.xi_xi_at(base);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        out.base_mismatch = std::max(out.base_mismatch, std::abs(out.C_struct[i][j][k] - at_base[i][j][k]));

  const AlgebraValue Cv = AlgebraValue::monomial(n, w.spec(), 0, prim.C.matrix());
  const Matrix Cop = Cv.to_operator();
  for (std::size_t si = 0; si < samples.size(); ++si) {
    const GaugeJet& j = prim.jets[si];
    const Matrix G = j.g.to_operator();
    const Matrix Ginv = j.g_inv.to_operator();
    const auto fwd = detail::affine_action(G, n, m);
    const auto inv = detail::affine_action(Ginv, n, m);
    if (std::max(fwd.defect, inv.defect) > kAffineTol)
      throw NumericError("strobl_normalize: internal consistency: extracted fiber action is not affine (defect " +
                         std::to_string(std::max(fwd.defect, inv.defect)) + ")");
    out.A_samples.push_back(inv.A);
    out.beta_samples.push_back(inv.beta);
    out.affine_defects.push_back(std::max(fwd.defect, inv.defect));
    out.automorphism_defects.push_back(
        automorphism_defect(SuperElement(AlgebraSpec::vect_pi(n + m), G)));

    // new fiber coordinates η^k = g(ξ^k); Q(η^k) = Σ dx^a ∂_a η^k + ω(x) η^k must equal g(C ξ^k)
    const Matrix Wop = evaluate(w, j.x).to_operator();
    std::vector<Matrix> dG;
    for (int a = 0; a < n; ++a) dG.push_back(j.dg_partials[a].to_operator());
    const int dim = 1 << (n + m);
    double worst = 0.0;
    for (int k = 0; k < m; ++k) {
      const int col = 1 << (n + k);
      std::vector<double> lhs(dim, 0.0);
      for (int a = 0; a < n; ++a) {
        const auto da = grassmann::multiply(basis_vector(dim, Mask{1} << a),
                                            std::vector<double>(dG[a].col(col).data(), dG[a].col(col).data() + dim));
        for (int i = 0; i < dim; ++i) lhs[i] += da[i];
      }
      const Eigen::VectorXd wg = Wop * G.col(col);
      const Eigen::VectorXd rhs = G * (Cop.col(col));
      for (int i = 0; i < dim; ++i) worst = std::max(worst, std::abs(lhs[i] + wg(i) - rhs(i)));
    }
    out.chart_residuals.push_back(worst);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Atiyah-type fixtures
// ---------------------------------------------------------------------------

/// ρ₀ contribution p(x) · Σ_{i,k} X(i,k) ξ^i ∂/∂ξ^k (a weight-0 linear field).
struct LinearTwist {
  ScalarPoly p;  ///< n variables
  Matrix X;      ///< m×m
};

/// ρ₁ contribution dx^a p(x) ∂/∂ξ^k (a weight-0 shift by a 1-form).
struct ShiftTerm {
  int a = 0;
  int k = 0;
  ScalarPoly p;  ///< n variables
};

inline SuperElement linear_field(const Matrix& X) {
  const int m = static_cast<int>(X.rows());
  std::vector<VectorFieldTerm> terms;
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k)
      if (X(i, k) != 0.0) terms.push_back({k, {i}, X(i, k)});
  return vect_field(m, terms);
}

/// Structure functions of d + C after the fiber change ξ ↦ exp(ρ₀(x)) exp(ρ₁(x,dx)),
/// expanded exactly. Both exponentials must terminate.
inline AlgebroidSpec atiyah_twist(int n, const StructureConstants& C, const std::vector<LinearTwist>& twist,
                                  const std::vector<ShiftTerm>& shift) {
  const int m = static_cast<int>(C.size());
  const SuperElement Ce = ce_differential(C);
  const double c2 = (Ce * Ce).norm();
  if (c2 > 1e-12) {
    const auto terms = decompose_vector_field(Ce * Ce);
    std::string w = "||C^2|| = " + std::to_string(c2);
    if (!terms.empty()) {
      const auto& t = terms.front();
      w += "; e.g. xi^(";
      for (std::size_t i = 0; i < t.J.size(); ++i) w += (i ? "," : "") + std::to_string(t.J[i] + 1);
      w += ") d/dxi^" + std::to_string(t.k + 1);
    }
    throw NotHomological("atiyah_twist: structure constants violate the Jacobi identity", w);
  }
  const AlgebraSpec spec = AlgebraSpec::vect_pi(m);
  PolyForm rho0(n, false, spec), rho1(n, false, spec);
  for (const auto& tw : twist) {
    if (tw.X.rows() != m || tw.X.cols() != m) throw SpecMismatch("atiyah_twist: twist matrix must be m x m");
    if (static_cast<int>(tw.p.nvars()) != n) throw SpecMismatch("atiyah_twist: twist polynomial variable count");
    rho0.add_term(0, detail::lift_t(tw.p) * MatrixPoly::constant(n + 1, linear_field(tw.X).matrix()));
  }
  for (const auto& sh : shift) {
    if (sh.a < 0 || sh.a >= n || sh.k < 0 || sh.k >= m) throw IndexError("atiyah_twist: shift index out of range");
    detail::add_field(rho1, dx_bit(sh.a), sh.p, m, 0, sh.k, 1.0);
  }
  const int order = m * m + n + 2;
  PolyForm w = PolyForm::constant(n, false, spec, 0, Ce.matrix());
  for (const PolyForm* rho : {&rho1, &rho0}) {
    if (rho->terms().empty()) continue;
    if (!series_terminates(*rho, order)) throw InputError("atiyah_twist: gauge exponential does not terminate; use nilpotent twists");
    w = gauge_transform(w, symbolic_exp(*rho, order), symbolic_exp(-1.0 * *rho, order));
  }
  return algebroid_from_form(w);
}

/// Structure constants of aff(1): [e₁, e₂] = e₂.
inline StructureConstants aff1_constants() {
  StructureConstants C(2, std::vector<std::vector<double>>(2, std::vector<double>(2, 0.0)));
  C[0][1][1] = 1.0;
  C[1][0][1] = -1.0;
  return C;
}

/// Heisenberg algebra: [e₁, e₂] = e₃.
inline StructureConstants heisenberg_constants() {
  StructureConstants C(3, std::vector<std::vector<double>>(3, std::vector<double>(3, 0.0)));
  C[0][1][2] = 1.0;
  C[1][0][2] = -1.0;
  return C;
}

}  // namespace mcg
