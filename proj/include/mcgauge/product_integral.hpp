#pragma once

// Multiplicative fiber integral: pointwise solution of g(0) = 1,
// dg/dt = −ω₁ g for an odd cylinder form ω = ω₀ + dt ω₁, together with the
// spatial derivatives ∂_a g, the inverse, and the conjugated curvature integral.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcgauge/forms.hpp"

namespace mcg {

enum class Scheme { RK4, CF4 };

inline std::string to_string(Scheme s) { return s == Scheme::RK4 ? "rk4" : "cf4"; }

struct IntegratorConfig {
  Scheme scheme = Scheme::CF4;
  int steps = 256;
  double t_end = 1.0;

  void validate() const {
    if (steps < 1) throw InputError("integrator: steps must be >= 1");
    if (!(t_end >= 0.0 && t_end <= 1.0)) throw InputError("integrator: t_end must lie in [0, 1]");
  }
};

struct GaugeJet {
  std::vector<double> x;
  AlgebraValue g;
  AlgebraValue g_inv;
  std::vector<AlgebraValue> dg_partials;       ///< ∂_a g
  std::optional<AlgebraValue> fiber_integral;  ///< ∫ g(t)⁻¹ Ω₁ g(t) dt
  double group_defect = 0.0;                   ///< max over the grid of ‖g·g⁻¹ − 1‖

  /// dg = Σ_a dx^a ∂_a g.
  AlgebraValue dg() const {
    AlgebraValue r = AlgebraValue::zero(g.n(), g.spec());
    for (int a = 0; a < g.n(); ++a) r += AlgebraValue::dx(g.n(), g.spec(), a) * dg_partials[a];
    return r;
  }
};

/// Δ(g) = −dg g⁻¹.
inline AlgebraValue darboux(const GaugeJet& j) { return -(j.dg() * j.g_inv); }

namespace detail {

/// Element of A[ε₁..ε_k]/(ε_iε_j): first-order perturbations of a base value.
struct DualValue {
  AlgebraValue base;
  std::vector<AlgebraValue> eps;

  friend DualValue operator*(const DualValue& x, const DualValue& y) {
    DualValue r{x.base * y.base, {}};
    r.eps.reserve(x.eps.size());
    for (std::size_t i = 0; i < x.eps.size(); ++i) r.eps.push_back(x.base * y.eps[i] + x.eps[i] * y.base);
    return r;
  }
  friend DualValue operator+(DualValue x, const DualValue& y) {
    x.base += y.base;
    for (std::size_t i = 0; i < x.eps.size(); ++i) x.eps[i] += y.eps[i];
    return x;
  }
  friend DualValue operator*(double s, DualValue x) {
    x.base = s * std::move(x.base);
    for (auto& e : x.eps) e = s * std::move(e);
    return x;
  }
  double eps_bound() const {
    double b = 0.0;
    for (const auto& e : eps) b += e.operator_bound();
    return b;
  }
  static DualValue identity(const AlgebraValue& like, std::size_t k) {
    DualValue r{AlgebraValue::identity(like.n(), like.spec()), {}};
    r.eps.assign(k, AlgebraValue::zero(like.n(), like.spec()));
    return r;
  }
};

inline DualValue exp(const DualValue& x) {
  return scaled_exp<DualValue>(x, x.base.operator_bound(), DualValue::identity(x.base, x.eps.size()), x.eps_bound());
}

inline void check_finite(const AlgebraValue& v, const char* what) {
  if (!v.data().allFinite()) throw NumericError(std::string(what) + ": non-finite value");
}

}  // namespace detail

/// ω split into the pieces the integrator needs; built once per form.
class CylinderIntegrand {
 public:
  explicit CylinderIntegrand(const PolyForm& w, bool with_curvature = true) : w0_(w.n(), true, w.spec()), w1_(w0_), omega1_(w0_) {
    if (!w.has_t()) throw SpecMismatch("multiplicative integral needs a cylinder form");
    const auto par = w.parity();
    if (!par || (*par != Parity::Odd && !w.terms().empty())) throw ParityError("multiplicative integral: form must be odd");
    if (!std::isfinite(w.max_abs_coeff())) throw NumericError("multiplicative integral: non-finite coefficients");
    auto s = split_dt(w);
    w0_ = std::move(s.w0);
    w1_ = std::move(s.w1);
    for (int a = 0; a < w.n(); ++a) dw1_.push_back(w1_.coeff_derivative(a));
    if (with_curvature) omega1_ = split_dt(curvature(w)).w1;
  }

  /// Use a supplied cylinder curvature instead of dω + ω², e.g. a pulled-back one.
  CylinderIntegrand(const PolyForm& w, const PolyForm& curvature_form) : CylinderIntegrand(w, false) {
    curvature_form.check_same(w);
    omega1_ = split_dt(curvature_form).w1;
  }

  int n() const { return w1_.n(); }
  const AlgebraSpec& spec() const { return w1_.spec(); }
  const PolyForm& w0() const { return w0_; }
  const PolyForm& w1() const { return w1_; }
  const PolyForm& dw1(int a) const { return dw1_.at(a); }
  const PolyForm& curvature_dt_part() const { return omega1_; }

 private:
  PolyForm w0_, w1_, omega1_;
  std::vector<PolyForm> dw1_;
};

namespace detail {

/// Generator X(t) of Y' = X Y in the dual algebra: base −ω₁, ε_a ↦ −∂_aω₁,
/// and (optionally) a final ε ↦ Ω₁ whose solution component is g·∫g⁻¹Ω₁g.
class Generator {
 public:
  Generator(const CylinderIntegrand& f, std::span<const double> x, bool jet, bool fiber)
      : w1_(f.w1(), x) {
    if (jet)
      for (int a = 0; a < f.n(); ++a) parts_.emplace_back(f.dw1(a), x, -1.0);
    if (fiber) parts_.emplace_back(f.curvature_dt_part(), x, 1.0);
  }

  std::size_t eps_count() const { return parts_.size(); }

  DualValue at(double t) const {
    DualValue r{-w1_.at(t), {}};
    for (const auto& p : parts_) r.eps.push_back(p.sign * p.slice.at(t));
    return r;
  }

 private:
  struct Part {
    Part(const PolyForm& f, std::span<const double> x, double s) : slice(f, x), sign(s) {}
    TimeSlice slice;
    double sign;
  };
  TimeSlice w1_;
  std::vector<Part> parts_;
};

struct Trajectory {
  std::vector<AlgebraValue> g;  ///< on the grid, only when recorded
  DualValue y;
  AlgebraValue h;
  double group_defect = 0.0;
};

inline Trajectory integrate(const Generator& gen, const AlgebraValue& like, double t0, double t1, const IntegratorConfig& cfg,
                            bool record) {
  cfg.validate();
  const double step = (t1 - t0) / cfg.steps;
  const AlgebraValue one = AlgebraValue::identity(like.n(), like.spec());
  Trajectory tr{{}, DualValue::identity(like, gen.eps_count()), one, 0.0};
  if (record) tr.g.push_back(tr.y.base);

  // Gauss–Legendre nodes and commutator-free weights
  const double r3 = std::sqrt(3.0);
  const double c1 = 0.5 - r3 / 6.0, c2 = 0.5 + r3 / 6.0;
  const double a1 = (3.0 - 2.0 * r3) / 12.0, a2 = (3.0 + 2.0 * r3) / 12.0;

  for (int k = 0; k < cfg.steps; ++k) {
    const double t = t0 + k * step;
    if (cfg.scheme == Scheme::CF4) {
      const DualValue X1 = gen.at(t + c1 * step), X2 = gen.at(t + c2 * step);
      const DualValue late = step * (a1 * X1 + a2 * X2);
      const DualValue early = step * (a2 * X1 + a1 * X2);
      tr.y = exp(late) * (exp(early) * tr.y);
      // inverse: h' = h ω₁ = −h X, stepped with the same exponentials reversed
      tr.h = tr.h * (mcg::exp(-early.base) * mcg::exp(-late.base));
    } else {
      const DualValue X0 = gen.at(t), Xm = gen.at(t + 0.5 * step), X1 = gen.at(t + step);
      const DualValue k1 = X0 * tr.y;
      const DualValue k2 = Xm * (tr.y + (0.5 * step) * k1);
      const DualValue k3 = Xm * (tr.y + (0.5 * step) * k2);
      const DualValue k4 = X1 * (tr.y + step * k3);
      tr.y = tr.y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      // h' = h ω₁ with ω₁ = −X
      const AlgebraValue l1 = -(tr.h * X0.base);
      const AlgebraValue l2 = -((tr.h + (0.5 * step) * l1) * Xm.base);
      const AlgebraValue l3 = -((tr.h + (0.5 * step) * l2) * Xm.base);
      const AlgebraValue l4 = -((tr.h + step * l3) * X1.base);
      tr.h = tr.h + (step / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    }
    tr.group_defect = std::max(tr.group_defect, (tr.y.base * tr.h - one).norm());
    if (record) tr.g.push_back(tr.y.base);
  }
  detail::check_finite(tr.y.base, "multiplicative integral");
  detail::check_finite(tr.h, "multiplicative integral");
  return tr;
}

}  // namespace detail

/// g(t_k) = texp∫₀^{t_k}(−ω) on the grid t_k = k·t_end/steps, k = 0..steps.
inline std::vector<AlgebraValue> texpint(const PolyForm& w, std::span<const double> x, const IntegratorConfig& cfg) {
  const CylinderIntegrand f(w, false);
  const detail::Generator gen(f, x, false, false);
  return detail::integrate(gen, AlgebraValue::zero(w.n(), w.spec()), 0.0, cfg.t_end, cfg, true).g;
}

/// The transport texp∫_{t0}^{t1}(−ω) over a sub-interval.
inline AlgebraValue texpint_interval(const PolyForm& w, std::span<const double> x, double t0, double t1,
                                     const IntegratorConfig& cfg) {
  const CylinderIntegrand f(w, false);
  const detail::Generator gen(f, x, false, false);
  return detail::integrate(gen, AlgebraValue::zero(w.n(), w.spec()), t0, t1, cfg, false).y.base;
}

inline GaugeJet texpint_jet(const CylinderIntegrand& f, std::span<const double> x, const IntegratorConfig& cfg,
                            bool want_fiber_integral) {
  if (static_cast<int>(x.size()) != f.n()) throw SpecMismatch("texpint_jet: point has wrong dimension");
  const detail::Generator gen(f, x, true, want_fiber_integral);
  auto tr = detail::integrate(gen, AlgebraValue::zero(f.n(), f.spec()), 0.0, cfg.t_end, cfg, false);
  GaugeJet j{std::vector<double>(x.begin(), x.end()), tr.y.base, tr.h, {}, std::nullopt, tr.group_defect};
  for (int a = 0; a < f.n(); ++a) j.dg_partials.push_back(tr.y.eps[a]);
  if (want_fiber_integral) j.fiber_integral = tr.h * tr.y.eps.back();
  return j;
}

inline GaugeJet texpint_jet(const PolyForm& w, std::span<const double> x, const IntegratorConfig& cfg,
                            bool want_fiber_integral) {
  return texpint_jet(CylinderIntegrand(w, want_fiber_integral), x, cfg, want_fiber_integral);
}

}  // namespace mcg
