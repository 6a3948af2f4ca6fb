#pragma once

// Non-Abelian homotopy formula and multiplicative primitives of flat forms.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mcgauge/forms.hpp"
#include "mcgauge/product_integral.hpp"

namespace mcg {

using Point = std::vector<double>;

// ---------------------------------------------------------------------------
// Coefficient witnesses
// ---------------------------------------------------------------------------

/// One matrix entry of one coefficient of a form.
struct CoefficientWitness {
  Mask mask = 0;
  Exponents exponents;
  int row = 0, col = 0;
  double value = 0.0;

  /// Human-readable, 1-based: "dt dx1 dx3 · x^[1,0] t^0 [r,c] = v".
  std::string describe() const {
    std::ostringstream os;
    if (mask & kDt) os << "dt ";
    for (int a = 0; a < 31; ++a)
      if (mask & dx_bit(a)) os << "dx" << a + 1 << " ";
    if (mask == 0) os << "1 ";
    os << "* x^[";
    for (std::size_t i = 0; i + 1 < exponents.size(); ++i) os << (i ? "," : "") << exponents[i];
    os << "] t^" << (exponents.empty() ? 0 : exponents.back()) << " entry (" << row + 1 << "," << col + 1
       << ") = " << value;
    return os.str();
  }
};

/// The `count` largest coefficient entries in absolute value, largest first.
inline std::vector<CoefficientWitness> largest_coefficients(const PolyForm& f, std::size_t count) {
  std::vector<CoefficientWitness> all;
  for (const auto& [mask, p] : f.terms())
    for (const auto& [e, c] : p.terms())
      for (int r = 0; r < c.rows(); ++r)
        for (int k = 0; k < c.cols(); ++k)
          if (c(r, k) != 0.0) all.push_back({mask, e, r, k, c(r, k)});
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return std::abs(a.value) > std::abs(b.value); });
  if (all.size() > count) all.resize(count);
  return all;
}

// ---------------------------------------------------------------------------
// Homotopy formula
// ---------------------------------------------------------------------------

struct HomotopyReport {
  Point x;
  AlgebraValue lhs, rhs;
  double residual = 0.0;
  AlgebraValue darboux_term;   ///< −dg g⁻¹
  AlgebraValue integral_term;  ///< ∫ g g(t)⁻¹ Ω g(t) g⁻¹
  AlgebraValue t1_term;        ///< ω₀ at t = 1
  AlgebraValue t0_term;        ///< g (ω₀ at t = 0) g⁻¹
  double conjugated_residual = 0.0;  ///< residual of −g⁻¹dg + ∫ g(t)⁻¹Ωg(t) = g⁻¹ω₀|₁g − ω₀|₀
  double group_defect = 0.0;
};

namespace detail {

inline HomotopyReport homotopy_at(const CylinderIntegrand& f, const Point& x, const IntegratorConfig& cfg) {
  const GaugeJet j = texpint_jet(f, x, cfg, true);
  const AlgebraValue w0_end = evaluate(f.w0(), x, cfg.t_end);
  const AlgebraValue w0_start = evaluate(f.w0(), x, 0.0);
  const AlgebraValue& I = *j.fiber_integral;

  AlgebraValue dar = darboux(j);
  AlgebraValue integral = j.g * I * j.g_inv;
  AlgebraValue t0 = j.g * w0_start * j.g_inv;
  AlgebraValue lhs = dar + integral;
  AlgebraValue rhs = w0_end - t0;
  const double residual = (lhs - rhs).norm();

  const AlgebraValue lhs2 = -(j.g_inv * j.dg()) + I;
  const AlgebraValue rhs2 = j.g_inv * w0_end * j.g - w0_start;
  return HomotopyReport{x,        std::move(lhs), std::move(rhs), residual,
                        std::move(dar), std::move(integral), w0_end, std::move(t0),
                        (lhs2 - rhs2).norm(), j.group_defect};
}

}  // namespace detail

/// Both sides of −dg g⁻¹ + ∫₀¹ g g(t)⁻¹ Ω g(t) g⁻¹ = ω₀|_{t=1} − g (ω₀|_{t=0}) g⁻¹ at each sample.
inline std::vector<HomotopyReport> homotopy_check(const PolyForm& w, const std::vector<Point>& samples,
                                                  const IntegratorConfig& cfg) {
  const CylinderIntegrand f(w, true);
  std::vector<HomotopyReport> out;
  out.reserve(samples.size());
  for (const auto& x : samples) out.push_back(detail::homotopy_at(f, x, cfg));
  return out;
}

/// f₁*ω − g (f₀*ω) g⁻¹ = −dg g⁻¹ + ∫ g g(t)⁻¹ F*(dω + ω²) g(t) g⁻¹ with g(t) = texp∫₀ᵗ(−F*ω).
/// Here t1_term = f₁*ω and t0_term = g (f₀*ω) g⁻¹, built from the end maps directly,
/// and the integrand uses the pulled-back curvature.
inline std::vector<HomotopyReport> homotopy_compare_maps(const PolyMap& F, const PolyForm& w,
                                                         const std::vector<Point>& samples,
                                                         const IntegratorConfig& cfg) {
  if (!F.source_has_t) throw SpecMismatch("homotopy: map must depend on t");
  const PolyForm Fw = pullback(F, w);
  const PolyForm FOmega = pullback(F, curvature(w));
  const CylinderIntegrand f(Fw, FOmega);
  const PolyForm f1w = pullback(F.at_time(cfg.t_end), w);
  const PolyForm f0w = pullback(F.at_time(0.0), w);

  std::vector<HomotopyReport> out;
  for (const auto& x : samples) {
    const GaugeJet j = texpint_jet(f, x, cfg, true);
    AlgebraValue dar = darboux(j);
    AlgebraValue integral = j.g * *j.fiber_integral * j.g_inv;
    AlgebraValue t1 = evaluate(f1w, x);
    const AlgebraValue f0 = evaluate(f0w, x);
    AlgebraValue t0 = j.g * f0 * j.g_inv;
    AlgebraValue lhs = t1 - t0;
    AlgebraValue rhs = dar + integral;
    const double residual = (lhs - rhs).norm();
    const AlgebraValue lhs2 = j.g_inv * t1 * j.g - f0;
    const AlgebraValue rhs2 = -(j.g_inv * j.dg()) + *j.fiber_integral;
    out.push_back(HomotopyReport{x, std::move(lhs), std::move(rhs), residual, std::move(dar), std::move(integral),
                                 std::move(t1), std::move(t0), (lhs2 - rhs2).norm(), j.group_defect});
  }
  return out;
}

struct ConvergenceRow {
  int steps = 0;
  double max_residual = 0.0;
  double ratio_to_next = 0.0;  ///< residual(steps) / residual(2·steps); 0 for the last row
};

/// Max homotopy residual over the samples for each step count.
inline std::vector<ConvergenceRow> homotopy_convergence(const PolyForm& w, const std::vector<Point>& samples,
                                                        IntegratorConfig cfg, const std::vector<int>& steps) {
  const CylinderIntegrand f(w, true);
  std::vector<ConvergenceRow> rows;
  for (int s : steps) {
    cfg.steps = s;
    double worst = 0.0;
    for (const auto& x : samples) worst = std::max(worst, detail::homotopy_at(f, x, cfg).residual);
    rows.push_back({s, worst, 0.0});
  }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    rows[i].ratio_to_next = rows[i + 1].max_residual > 0.0 ? rows[i].max_residual / rows[i + 1].max_residual : 0.0;
  return rows;
}

// ---------------------------------------------------------------------------
// Poincaré primitive
// ---------------------------------------------------------------------------

inline constexpr double kDefaultFlatTol = 1e-10;

struct PrimitiveResult {
  SuperElement C;
  Point base;
  std::vector<Point> samples;
  std::vector<GaugeJet> jets;
  std::vector<double> recon_residuals;  ///< ‖ω(x) − (gCg⁻¹ − dg g⁻¹)‖
  double c_square_norm = 0.0;
};

/// Throws NotFlat when some curvature coefficient exceeds `tol`.
inline void require_flat(const PolyForm& w, double tol) {
  const PolyForm Omega = curvature(w);
  const double worst = Omega.max_abs_coeff();
  if (worst > tol) {
    const auto wit = largest_coefficients(Omega, 1);
    throw NotFlat("form is not flat: max curvature coefficient " + std::to_string(worst), wit.front().describe());
  }
}

/// Value of the gauge action g C g⁻¹ − dg g⁻¹ at one jet.
inline AlgebraValue gauge_of_constant_at(const GaugeJet& j, const SuperElement& C) {
  const AlgebraValue Cv = AlgebraValue::monomial(j.g.n(), j.g.spec(), 0, C.matrix());
  return j.g * Cv * j.g_inv - j.dg() * j.g_inv;
}

/// g = texp∫(−H*ω) for H(x,t) = base + t(x − base) and C = ω(base) with dx stripped.
inline PrimitiveResult poincare_primitive(const PolyForm& w, const Point& base, const std::vector<Point>& samples,
                                          const IntegratorConfig& cfg, double flat_tol = kDefaultFlatTol) {
  if (w.has_t()) throw SpecMismatch("poincare_primitive: form must not depend on t");
  if (static_cast<int>(base.size()) != w.n()) throw SpecMismatch("poincare_primitive: base point dimension");
  require_flat(w, flat_tol);
  IntegratorConfig full = cfg;
  full.t_end = 1.0;

  SuperElement C(w.spec(), evaluate(w, base)[0]);
  const PolyForm Hw = pullback(PolyMap::contraction(base), w);
  const CylinderIntegrand f(Hw, false);

  PrimitiveResult res{C, base, samples, {}, {}, (C * C).norm()};
  for (const auto& x : samples) {
    GaugeJet j = texpint_jet(f, x, full, false);
    res.recon_residuals.push_back((evaluate(w, x) - gauge_of_constant_at(j, C)).norm());
    res.jets.push_back(std::move(j));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Gauge action on polynomial forms (fixture generator)
// ---------------------------------------------------------------------------

/// Σ_{k≤order} ρ^k / k!.
inline PolyForm symbolic_exp(const PolyForm& rho, int order) {
  PolyForm one = PolyForm::constant(rho.n(), rho.has_t(), rho.spec(), 0,
                                    Matrix::Identity(rho.rep_size(), rho.rep_size()));
  PolyForm sum = one, term = one;
  for (int k = 1; k <= order; ++k) {
    term = (1.0 / k) * form_product(term, rho);
    if (term.terms().empty()) break;
    sum += term;
  }
  return sum;
}

/// Whether ρ^{order+1} vanishes exactly, i.e. the truncated series is the exponential.
inline bool series_terminates(const PolyForm& rho, int order) {
  PolyForm p = rho;
  for (int k = 1; k <= order; ++k) {
    if (p.terms().empty()) return true;
    p = form_product(p, rho);
  }
  return p.terms().empty();
}

/// g ω g⁻¹ − dg g⁻¹ for polynomial g with polynomial inverse.
inline PolyForm gauge_transform(const PolyForm& w, const PolyForm& g, const PolyForm& g_inv) {
  return form_product(form_product(g, w), g_inv) - form_product(exterior_d(g), g_inv);
}

/// ω = g C g⁻¹ − dg g⁻¹ with g = exp(ρ_k)···exp(ρ_1), each exponential expanded
/// to `order` (default n + 2). Warnings about non-terminating series go to
/// `warnings` when given, otherwise to stderr.
inline PolyForm gauge_of_constant(const SuperElement& C, const std::vector<PolyForm>& rhos, int order = -1,
                                  std::vector<std::string>* warnings = nullptr) {
  if (rhos.empty()) throw InputError("gauge_of_constant: need at least one gauge generator");
  const auto cp = C.parity();
  if (!cp || (*cp != Parity::Odd && C.norm() != 0.0)) throw ParityError("gauge_of_constant: C must be odd");
  const double c2 = (C * C).norm();
  if (c2 > 1e-12) throw NotHomological("gauge_of_constant: C^2 != 0", "||C^2|| = " + std::to_string(c2));
  const PolyForm& first = rhos.front();
  if (!(first.spec() == C.spec())) throw SpecMismatch("gauge_of_constant: algebra mismatch");
  const int ord = order < 0 ? first.n() + 2 : order;

  PolyForm w = PolyForm::constant(first.n(), first.has_t(), first.spec(), 0, C.matrix());
  for (const auto& rho : rhos) {
    rho.check_same(w);
    const auto rp = rho.parity();
    if (!rp || *rp != Parity::Even) throw ParityError("gauge_of_constant: gauge generator must be even");
    if (!series_terminates(rho, ord)) {
      const std::string msg = "gauge_of_constant: exponential truncated at order " + std::to_string(ord) +
                              "; the 0-form part is not nilpotent, so the fixture is only approximately flat";
      if (warnings)
        warnings->push_back(msg);
      else
        std::cerr << "[gauge_of_constant] warning: " << msg << "\n";
    }
    w = gauge_transform(w, symbolic_exp(rho, ord), symbolic_exp(-1.0 * rho, ord));
  }
  return w;
}

inline PolyForm gauge_of_constant(const SuperElement& C, const PolyForm& rho, int order = -1,
                                  std::vector<std::string>* warnings = nullptr) {
  return gauge_of_constant(C, std::vector<PolyForm>{rho}, order, warnings);
}

// ---------------------------------------------------------------------------
// Relations between primitives
// ---------------------------------------------------------------------------

struct GaugeRelation {
  double conjugation_residual = 0.0;  ///< ‖C − (k C′ k⁻¹ − dk k⁻¹)‖
  double homological_residual = 0.0;  ///< ‖[C, dk k⁻¹] + (dk k⁻¹)²‖
};

/// k = g⁻¹h for ω = gCg⁻¹ − dg g⁻¹ = hC′h⁻¹ − dh h⁻¹ at one point.
inline GaugeRelation gauge_relate(const GaugeJet& jg, const GaugeJet& jh, const SuperElement& C,
                                  const SuperElement& Cprime, double point_tol = 1e-12) {
  if (jg.x.size() != jh.x.size()) throw SpecMismatch("gauge_relate: jets at different points");
  for (std::size_t i = 0; i < jg.x.size(); ++i)
    if (std::abs(jg.x[i] - jh.x[i]) > point_tol) throw SpecMismatch("gauge_relate: jets at different points");
  const int n = jg.g.n();
  const AlgebraSpec& spec = jg.g.spec();
  const AlgebraValue k = jg.g_inv * jh.g;
  const AlgebraValue k_inv = jh.g_inv * jg.g;
  AlgebraValue dk = AlgebraValue::zero(n, spec);
  for (int a = 0; a < n; ++a) {
    const AlgebraValue dka = jg.g_inv * jh.dg_partials[a] - jg.g_inv * jg.dg_partials[a] * jg.g_inv * jh.g;
    dk += AlgebraValue::dx(n, spec, a) * dka;
  }
  const AlgebraValue Cv = AlgebraValue::monomial(n, spec, 0, C.matrix());
  const AlgebraValue Cpv = AlgebraValue::monomial(n, spec, 0, Cprime.matrix());
  const AlgebraValue theta = dk * k_inv;
  return GaugeRelation{(Cv - (k * Cpv * k_inv - theta)).norm(), (supercommutator(Cv, theta) + theta * theta).norm()};
}

struct SplitReport {
  std::vector<double> zero_part_residuals;  ///< ‖ω₀ − g₀ C g₀⁻¹‖
  std::vector<double> covariant_residuals;  ///< ‖dω₀ + [θ, ω₀]‖, θ = −dg₀ g₀⁻¹
  double max_zero_part = 0.0;
  double max_covariant = 0.0;
};

/// Checks the 0-form part ω₀ = g₀Cg₀⁻¹ and its covariant constancy at each sample.
inline SplitReport split_check(const PolyForm& w, const PrimitiveResult& res) {
  const int n = w.n();
  const AlgebraSpec& spec = w.spec();
  const PolyForm w0 = w.zero_form_part();
  const PolyForm dw0 = exterior_d(w0);
  SplitReport rep;
  for (std::size_t s = 0; s < res.jets.size(); ++s) {
    const GaugeJet& j = res.jets[s];
    const AlgebraValue g0 = AlgebraValue::monomial(n, spec, 0, j.g[0]);
    const AlgebraValue g0_inv = AlgebraValue::monomial(n, spec, 0, j.g_inv[0]);
    AlgebraValue dg0 = AlgebraValue::zero(n, spec);
    for (int a = 0; a < n; ++a)
      dg0 += AlgebraValue::dx(n, spec, a) * AlgebraValue::monomial(n, spec, 0, j.dg_partials[a][0]);
    const AlgebraValue theta = -(dg0 * g0_inv);
    const AlgebraValue w0x = evaluate(w0, j.x);
    const AlgebraValue conj = g0 * AlgebraValue::monomial(n, spec, 0, res.C.matrix()) * g0_inv;
    rep.zero_part_residuals.push_back((w0x - conj).norm());
    rep.covariant_residuals.push_back((evaluate(dw0, j.x) + supercommutator(theta, w0x)).norm());
    rep.max_zero_part = std::max(rep.max_zero_part, rep.zero_part_residuals.back());
    rep.max_covariant = std::max(rep.max_covariant, rep.covariant_residuals.back());
  }
  return rep;
}

}  // namespace mcg
