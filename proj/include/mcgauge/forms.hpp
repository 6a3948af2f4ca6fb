#pragma once

// Inhomogeneous differential forms on a chart U ⊆ ℝⁿ (optionally the
// cylinder U × I) with polynomial coefficients in a matrix superalgebra.
//
// Coefficients sit to the right of differential monomials. A monomial is a
// bitmask over the odd generators in canonical order: bit 0 is dt, bit a is
// dx^a (a = 1..n). Every sign in this file follows from
//   (e_I a)(e_J b) = (−1)^{p(a)|J|} sgn(I,J) e_{I∪J} ab.
// Coefficient polynomials always carry n+1 variables, the last one being t.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcgauge/grassmann.hpp"
#include "mcgauge/polynomial.hpp"
#include "mcgauge/superalgebra.hpp"

namespace mcg {

using grassmann::Mask;

inline constexpr Mask kDt = 1;
inline Mask dx_bit(int a) { return Mask{1} << (a + 1); }  // a is 0-based

// ---------------------------------------------------------------------------
// AlgebraValue: a point of Λ(dx¹..dxⁿ) ⊗ A
// ---------------------------------------------------------------------------

/// Pointwise value of a dt-free form. Component I (bit a = dx^{a+1}) is the
/// coefficient of dx^I; components are stored side by side in one d × d·2ⁿ block.
class AlgebraValue {
  using Block = Eigen::Block<Matrix, Eigen::Dynamic, Eigen::Dynamic, true>;
  using ConstBlock = Eigen::Block<const Matrix, Eigen::Dynamic, Eigen::Dynamic, true>;
  Block block(Mask I) { return data_.middleCols(static_cast<Eigen::Index>(I) * d_, d_); }
  ConstBlock block(Mask I) const { return data_.middleCols(static_cast<Eigen::Index>(I) * d_, d_); }

 public:
  AlgebraValue(int n, AlgebraSpec spec) : n_(n), d_(spec.rep_size()), spec_(spec) {
    if (n < 0 || n > 10) throw IndexError("chart dimension out of range");
    data_ = Matrix::Zero(d_, d_ * (Eigen::Index{1} << n));
  }

  static AlgebraValue zero(int n, const AlgebraSpec& spec) { return AlgebraValue(n, spec); }
  static AlgebraValue identity(int n, const AlgebraSpec& spec) {
    AlgebraValue v(n, spec);
    v.block(0).setIdentity();
    return v;
  }
  /// dx^I · a.
  static AlgebraValue monomial(int n, const AlgebraSpec& spec, Mask I, const Matrix& a) {
    AlgebraValue v(n, spec);
    v.set(I, a);
    return v;
  }
  /// The 1-form dx^a with unit coefficient (a 0-based).
  static AlgebraValue dx(int n, const AlgebraSpec& spec, int a) {
    return monomial(n, spec, Mask{1} << a, Matrix::Identity(spec.rep_size(), spec.rep_size()));
  }

  int n() const { return n_; }
  const AlgebraSpec& spec() const { return spec_; }
  std::size_t size() const { return std::size_t{1} << n_; }
  Matrix operator[](Mask I) const {
    if (I >= size()) throw IndexError("dx index set out of range");
    return block(I);
  }
  /// All components, side by side.
  const Matrix& data() const { return data_; }

  void set(Mask I, const Matrix& a) {
    if (I >= size()) throw IndexError("dx index set out of range");
    if (a.rows() != d_ || a.cols() != d_) throw SpecMismatch("component size");
    block(I) = a;
  }

  double norm() const { return max_norm(data_); }

  /// Upper bound on the ∞-norm of left multiplication, for exp scaling.
  double operator_bound() const {
    double s = 0.0;
    for (Mask I = 0; I < size(); ++I) s += block(I).cwiseAbs().rowwise().sum().maxCoeff();
    return s;
  }

  /// Part of total parity p (|I| + coefficient parity ≡ p).
  AlgebraValue parity_part(Parity p) const {
    AlgebraValue r(n_, spec_);
    for (Mask I = 0; I < size(); ++I) {
      const bool want_odd_coeff = ((grassmann::degree(I) + static_cast<int>(p)) & 1) != 0;
      const Matrix c = block(I);
      r.block(I) = want_odd_coeff ? odd_projection(spec_, c) : even_projection(spec_, c);
    }
    return r;
  }

  std::optional<Parity> parity() const {
    const double e = parity_part(Parity::Even).norm();
    const double o = parity_part(Parity::Odd).norm();
    if (e > 0.0 && o > 0.0) return std::nullopt;
    return o > 0.0 ? Parity::Odd : Parity::Even;
  }

  AlgebraValue& operator+=(const AlgebraValue& o) {
    check_same(o);
    data_ += o.data_;
    return *this;
  }
  AlgebraValue& operator-=(const AlgebraValue& o) {
    check_same(o);
    data_ -= o.data_;
    return *this;
  }
  friend AlgebraValue operator+(AlgebraValue a, const AlgebraValue& b) { return a += b; }
  friend AlgebraValue operator-(AlgebraValue a, const AlgebraValue& b) { return a -= b; }
  friend AlgebraValue operator*(double s, AlgebraValue a) {
    a.data_ *= s;
    return a;
  }
  friend AlgebraValue operator-(AlgebraValue a) { return -1.0 * std::move(a); }

  friend AlgebraValue operator*(const AlgebraValue& x, const AlgebraValue& y) {
    x.check_same(y);
    const Mask N = static_cast<Mask>(x.size());
    const Eigen::Index d = x.d_, dd = d * d;
    AlgebraValue r(x.n_, x.spec_);
    auto nonzero = [dd](const double* p) {
      for (Eigen::Index i = 0; i < dd; ++i)
        if (p[i] != 0.0) return true;
      return false;
    };
    std::vector<char> nx(N), ny(N);
    bool odd_y = false;
    for (Mask I = 0; I < N; ++I) {
      nx[I] = nonzero(x.data_.data() + I * dd);
      ny[I] = nonzero(y.data_.data() + I * dd);
      if (ny[I] && (grassmann::degree(I) & 1)) odd_y = true;
    }
    // σ(a): odd entries negated
    Matrix graded;
    if (odd_y) {
      std::vector<int> par(d);
      for (Eigen::Index i = 0; i < d; ++i) par[i] = x.spec_.basis_parity(static_cast<int>(i));
      graded = x.data_;
      for (Eigen::Index c = 0; c < graded.cols(); ++c)
        for (Eigen::Index row = 0; row < d; ++row)
          if (par[row] != par[c % d]) graded(row, c) = -graded(row, c);
    }
    for (Mask I = 0; I < N; ++I) {
      if (!nx[I]) continue;
      for (Mask J = 0; J < N; ++J) {
        if (!ny[J] || (I & J)) continue;
        const double s = grassmann::shuffle_sign(I, J);
        const double* A = ((grassmann::degree(J) & 1) ? graded : x.data_).data() + I * dd;
        const double* B = y.data_.data() + J * dd;
        double* C = r.data_.data() + (I | J) * dd;
        // column-major d×d: C += s·A·B
        for (Eigen::Index c = 0; c < d; ++c)
          for (Eigen::Index k = 0; k < d; ++k) {
            const double b = s * B[k + c * d];
            if (b == 0.0) continue;
            const double* a = A + k * d;
            double* out = C + c * d;
            for (Eigen::Index i = 0; i < d; ++i) out[i] += a[i] * b;
          }
      }
    }
    return r;
  }

  /// Left-multiplication operator on Λ(dx) ⊗ V; basis index J | (v << n).
  /// Faithful, and for vect_pi it is an operator on Λ(dx, ξ).
  Matrix to_operator() const {
    const int d = d_;
    const int N = static_cast<int>(size());
    Matrix L = Matrix::Zero(N * d, N * d);
    for (Mask I = 0; I < size(); ++I) {
      const Matrix c = block(I);
      if (coeff_is_zero(c)) continue;
      const Matrix g = grading(spec_, c);
      for (Mask J = 0; J < size(); ++J) {
        const int s = grassmann::shuffle_sign(I, J);
        if (s == 0) continue;
        const Matrix& a = (grassmann::degree(J) & 1) ? g : c;
        for (int r = 0; r < d; ++r)
          for (int k = 0; k < d; ++k) L(static_cast<int>(I | J) + (r << n_), static_cast<int>(J) + (k << n_)) += s * a(r, k);
      }
    }
    return L;
  }

  void check_same(const AlgebraValue& o) const {
    if (n_ != o.n_ || !(spec_ == o.spec_)) throw SpecMismatch("algebra values over different charts or algebras");
  }

 private:
  int n_;
  int d_;
  AlgebraSpec spec_;
  Matrix data_;
};

/// [X,Y] = XY − (−1)^{p(X)p(Y)} YX on total parity parts.
inline AlgebraValue supercommutator(const AlgebraValue& x, const AlgebraValue& y) {
  const AlgebraValue x1 = x.parity_part(Parity::Odd), y1 = y.parity_part(Parity::Odd);
  return x * y - y * x + 2.0 * (y1 * x1);
}

inline AlgebraValue exp(const AlgebraValue& x) {
  return scaled_exp<AlgebraValue>(x, x.operator_bound(), AlgebraValue::identity(x.n(), x.spec()));
}

/// The 0-form x as an element of VectPi(n+m) acting on Λ(dx, ξ).
inline SuperElement as_total_space_operator(const AlgebraValue& v) {
  if (v.spec().kind() != AlgebraSpec::Kind::VectPi) throw SpecMismatch("total-space operator needs vect_pi");
  return SuperElement(AlgebraSpec::vect_pi(v.n() + v.spec().m()), v.to_operator());
}

// ---------------------------------------------------------------------------
// PolyForm
// ---------------------------------------------------------------------------

class PolyForm {
 public:
  using Terms = std::map<Mask, MatrixPoly>;

  PolyForm(int n, bool has_t, AlgebraSpec spec) : n_(n), has_t_(has_t), spec_(spec) {
    if (n < 0 || n > 10) throw IndexError("chart dimension out of range");
  }

  /// Constant coefficient `a` on the monomial `mask`.
  static PolyForm constant(int n, bool has_t, const AlgebraSpec& spec, Mask mask, const Matrix& a) {
    PolyForm f(n, has_t, spec);
    f.add_term(mask, MatrixPoly::constant(n + 1, a));
    return f;
  }

  int n() const { return n_; }
  bool has_t() const { return has_t_; }
  const AlgebraSpec& spec() const { return spec_; }
  const Terms& terms() const { return terms_; }
  std::size_t nvars() const { return static_cast<std::size_t>(n_) + 1; }
  int rep_size() const { return spec_.rep_size(); }
  Matrix zero_matrix() const { return Matrix::Zero(rep_size(), rep_size()); }

  void add_term(Mask mask, const MatrixPoly& p) {
    if (mask >> (n_ + 1)) throw IndexError("differential monomial uses dx index beyond chart dimension");
    if ((mask & kDt) && !has_t_) throw IndexError("dt used on a form without cylinder variable");
    if (p.nvars() != nvars()) throw SpecMismatch("coefficient polynomial has wrong variable count");
    for (const auto& [e, c] : p.terms()) {
      if (!has_t_ && e.back() != 0) throw IndexError("t used on a form without cylinder variable");
      if (c.rows() != rep_size() || c.cols() != rep_size()) throw SpecMismatch("coefficient matrix has wrong size");
    }
    auto it = terms_.find(mask);
    if (it == terms_.end()) {
      if (!p.empty()) terms_.emplace(mask, p);
      return;
    }
    it->second += p;
    if (it->second.empty()) terms_.erase(it);
  }

  /// Add c · x^e (t^{e.back()}) · a on `mask`.
  void add_monomial(Mask mask, Exponents e, const Matrix& a) {
    MatrixPoly p(nvars());
    p.add_term(std::move(e), a);
    add_term(mask, p);
  }

  PolyForm& operator+=(const PolyForm& o) {
    check_same(o);
    for (const auto& [m, p] : o.terms_) add_term(m, p);
    return *this;
  }
  PolyForm& operator-=(const PolyForm& o) {
    check_same(o);
    for (const auto& [m, p] : o.terms_) add_term(m, -1.0 * p);
    return *this;
  }
  friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
  friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a -= b; }
  friend PolyForm operator*(double s, const PolyForm& a) {
    PolyForm r(a.n_, a.has_t_, a.spec_);
    for (const auto& [m, p] : a.terms_) r.add_term(m, s * p);
    return r;
  }

  /// Largest |coefficient entry| over all terms and monomials.
  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [mask, p] : terms_) m = std::max(m, p.max_abs_coeff());
    return m;
  }

  /// Total parity if homogeneous; zero counts as even.
  std::optional<Parity> parity() const {
    bool has_even = false, has_odd = false;
    for (const auto& [mask, p] : terms_)
      for (const auto& [e, c] : p.terms()) {
        const auto cp = matrix_parity(spec_, c);
        if (!cp) return std::nullopt;
        ((grassmann::degree(mask) + static_cast<int>(*cp)) & 1 ? has_odd : has_even) = true;
      }
    if (has_even && has_odd) return std::nullopt;
    return has_odd ? Parity::Odd : Parity::Even;
  }

  /// Only the terms whose monomial is dx-free and dt-free.
  PolyForm zero_form_part() const {
    PolyForm r(n_, has_t_, spec_);
    if (auto it = terms_.find(0); it != terms_.end()) r.add_term(0, it->second);
    return r;
  }

  /// ∂/∂x^a applied to every coefficient (a 0-based); not the exterior derivative.
  PolyForm coeff_derivative(int a) const {
    PolyForm r(n_, has_t_, spec_);
    for (const auto& [m, p] : terms_) r.add_term(m, p.derivative(static_cast<std::size_t>(a)));
    return r;
  }

  void check_same(const PolyForm& o) const {
    if (n_ != o.n_ || has_t_ != o.has_t_ || !(spec_ == o.spec_))
      throw SpecMismatch("forms live on different charts or take values in different algebras");
  }

  friend bool coefficientwise_close(const PolyForm& a, const PolyForm& b, double tol) {
    return (a - b).max_abs_coeff() <= tol;
  }

 private:
  int n_;
  bool has_t_;
  AlgebraSpec spec_;
  Terms terms_;
};

inline PolyForm form_product(const PolyForm& a, const PolyForm& b) {
  a.check_same(b);
  PolyForm r(a.n(), a.has_t(), a.spec());
  const AlgebraSpec& spec = a.spec();
  for (const auto& [I, pa] : a.terms()) {
    const MatrixPoly graded = pa.map_coeffs([&](const Matrix& c) { return grading(spec, c); });
    for (const auto& [J, pb] : b.terms()) {
      const int s = grassmann::shuffle_sign(I, J);
      if (s == 0) continue;
      const MatrixPoly& left = (grassmann::degree(J) & 1) ? graded : pa;
      r.add_term(I | J, static_cast<double>(s) * (left * pb));
    }
  }
  return r;
}

/// d = dt ∂_t + Σ_b dx^b ∂_b acting from the left.
inline PolyForm exterior_d(const PolyForm& a) {
  PolyForm r(a.n(), a.has_t(), a.spec());
  const int nv = a.n() + 1;
  for (const auto& [I, p] : a.terms()) {
    for (int g = 0; g < nv; ++g) {
      if (g == 0 && !a.has_t()) continue;
      const Mask bit = Mask{1} << g;
      const int s = grassmann::shuffle_sign(bit, I);
      if (s == 0) continue;
      // generator 0 is dt ↔ variable n; generator b+1 is dx^b ↔ variable b
      const std::size_t var = g == 0 ? static_cast<std::size_t>(a.n()) : static_cast<std::size_t>(g - 1);
      r.add_term(I | bit, static_cast<double>(s) * p.derivative(var));
    }
  }
  return r;
}

/// Ω = dω + ω² for odd ω.
inline PolyForm curvature(const PolyForm& w) {
  const auto par = w.parity();
  if (!par || (*par != Parity::Odd && !w.terms().empty())) throw ParityError("curvature: form must be odd");
  return exterior_d(w) + form_product(w, w);
}

struct DtSplit {
  PolyForm w0;  ///< dt-free part
  PolyForm w1;  ///< ω = ω₀ + dt∧ω₁
};

inline DtSplit split_dt(const PolyForm& w) {
  if (!w.has_t()) throw SpecMismatch("split_dt: form has no cylinder variable");
  DtSplit s{PolyForm(w.n(), true, w.spec()), PolyForm(w.n(), true, w.spec())};
  for (const auto& [m, p] : w.terms()) {
    if (m & kDt)
      s.w1.add_term(m & ~kDt, p);
    else
      s.w0.add_term(m, p);
  }
  return s;
}

/// Substitute x and t. dt-terms must have been split off.
inline AlgebraValue evaluate(const PolyForm& a, std::span<const double> x, double t = 0.0) {
  if (static_cast<int>(x.size()) != a.n()) throw SpecMismatch("evaluate: point has wrong dimension");
  std::vector<double> point(x.begin(), x.end());
  point.push_back(a.has_t() ? t : 0.0);
  AlgebraValue v(a.n(), a.spec());
  const Matrix zero = a.zero_matrix();
  for (const auto& [m, p] : a.terms()) {
    if (m & kDt) throw SplitRequired("evaluate: split off dt-terms first");
    v.set(m >> 1, p.evaluate(point, zero));
  }
  return v;
}

/// A dt-free form restricted to a fixed x, kept polynomial in t for fast
/// repeated evaluation along the fiber.
class TimeSlice {
 public:
  TimeSlice(const PolyForm& a, std::span<const double> x) : n_(a.n()), spec_(a.spec()) {
    if (static_cast<int>(x.size()) != a.n()) throw SpecMismatch("time slice: point has wrong dimension");
    std::vector<double> vals(x.begin(), x.end());
    vals.push_back(0.0);
    std::vector<bool> fixed(vals.size(), true);
    fixed.back() = false;
    for (const auto& [m, p] : a.terms()) {
      if (m & kDt) throw SplitRequired("time slice: split off dt-terms first");
      const MatrixPoly q = p.partial_evaluate(vals, fixed);
      std::vector<Matrix> coeffs;
      for (const auto& [e, c] : q.terms()) {
        const std::size_t k = static_cast<std::size_t>(e.back());
        if (coeffs.size() <= k) coeffs.resize(k + 1, Matrix::Zero(spec_.rep_size(), spec_.rep_size()));
        coeffs[k] += c;
      }
      if (!coeffs.empty()) parts_.emplace_back(m >> 1, std::move(coeffs));
    }
  }

  AlgebraValue at(double t) const {
    AlgebraValue v(n_, spec_);
    for (const auto& [I, coeffs] : parts_) {
      Matrix acc = coeffs.back();
      for (std::size_t k = coeffs.size() - 1; k-- > 0;) acc = (acc * t + coeffs[k]).eval();
      v.set(I, acc);
    }
    return v;
  }

 private:
  int n_;
  AlgebraSpec spec_;
  std::vector<std::pair<Mask, std::vector<Matrix>>> parts_;
};

// ---------------------------------------------------------------------------
// Polynomial maps and pullback
// ---------------------------------------------------------------------------

/// Target coordinates as polynomials in the source coordinates (x¹..xⁿ, t).
struct PolyMap {
  int n_source = 0;
  bool source_has_t = false;
  std::vector<ScalarPoly> components;  ///< each in n_source + 1 variables

  int n_target() const { return static_cast<int>(components.size()); }

  static PolyMap identity(int n, bool has_t = false) {
    PolyMap f{n, has_t, {}};
    for (int a = 0; a < n; ++a) f.components.push_back(ScalarPoly::variable(n + 1, a, 1.0));
    return f;
  }

  /// H(x,t) = base + t(x − base).
  static PolyMap contraction(std::span<const double> base) {
    const int n = static_cast<int>(base.size());
    PolyMap f{n, true, {}};
    for (int a = 0; a < n; ++a) {
      ScalarPoly c = ScalarPoly::constant(n + 1, base[a]);
      Exponents xt(n + 1, 0), tt(n + 1, 0);
      xt[a] = 1;
      xt[n] = 1;
      tt[n] = 1;
      c.add_term(xt, 1.0);
      c.add_term(tt, -base[a]);
      f.components.push_back(std::move(c));
    }
    return f;
  }

  /// The map at a frozen time, as a map without cylinder variable.
  PolyMap at_time(double t) const {
    PolyMap f{n_source, false, {}};
    std::vector<double> vals(n_source + 1, 0.0);
    vals.back() = t;
    std::vector<bool> fixed(n_source + 1, false);
    fixed.back() = true;
    for (const auto& c : components) f.components.push_back(c.partial_evaluate(vals, fixed));
    return f;
  }
};

/// φ*α: x^a ↦ φ^a, dx^a ↦ Σ dx'^b ∂_b φ^a + dt ∂_t φ^a.
inline PolyForm pullback(const PolyMap& phi, const PolyForm& a) {
  if (a.has_t()) throw SpecMismatch("pullback: target form must not depend on t");
  if (phi.n_target() != a.n()) throw SpecMismatch("pullback: map target dimension differs from form chart");
  for (const auto& c : phi.components)
    if (static_cast<int>(c.nvars()) != phi.n_source + 1) throw SpecMismatch("pullback: map component variable count");
  const int ns = phi.n_source;
  const AlgebraSpec& spec = a.spec();
  const Matrix one = Matrix::Identity(spec.rep_size(), spec.rep_size());

  // images for substitution: target variables (y¹..yᵐ, t_target) ↦ (φ¹..φᵐ, 0)
  std::vector<ScalarPoly> images = phi.components;
  images.push_back(ScalarPoly(ns + 1));

  std::vector<PolyForm> dy;
  for (const auto& c : phi.components) {
    PolyForm f(ns, phi.source_has_t, spec);
    for (int b = 0; b < ns; ++b) f.add_term(dx_bit(b), c.derivative(b) * MatrixPoly::constant(ns + 1, one));
    if (phi.source_has_t) f.add_term(kDt, c.derivative(ns) * MatrixPoly::constant(ns + 1, one));
    dy.push_back(std::move(f));
  }

  PolyForm r(ns, phi.source_has_t, spec);
  for (const auto& [I, p] : a.terms()) {
    PolyForm term = PolyForm::constant(ns, phi.source_has_t, spec, 0, one);
    for (int b = 0; b < a.n(); ++b)
      if (I & dx_bit(b)) term = form_product(term, dy[b]);
    PolyForm coeff(ns, phi.source_has_t, spec);
    coeff.add_term(0, substitute(p, images));
    r += form_product(term, coeff);
  }
  return r;
}

/// ω₁ of H*ω for H(x,t) = base + t(x − base), computed directly as
/// Σ_a (x^a − base^a) (∂ω/∂dx^a)(H(x,t), t dx).
inline PolyForm euler_contraction(const PolyForm& w, std::span<const double> base) {
  if (w.has_t()) throw SpecMismatch("euler_contraction: form must not depend on t");
  const int n = w.n();
  if (static_cast<int>(base.size()) != n) throw SpecMismatch("euler_contraction: base point dimension");
  const PolyMap H = PolyMap::contraction(base);
  std::vector<ScalarPoly> images = H.components;
  images.push_back(ScalarPoly(n + 1));

  PolyForm r(n, true, w.spec());
  for (const auto& [I, p] : w.terms()) {
    const int deg = grassmann::degree(I);
    if (deg == 0) continue;
    const MatrixPoly moved = substitute(p, images);
    Exponents tpow(n + 1, 0);
    tpow[n] = deg - 1;
    int position = 0;
    for (int a = 0; a < n; ++a) {
      if (!(I & dx_bit(a))) continue;
      ScalarPoly lever = ScalarPoly::variable(n + 1, a, 1.0);
      lever.add_term(Exponents(n + 1, 0), -base[a]);
      ScalarPoly scalar(n + 1);
      scalar.add_term(tpow, (position & 1) ? -1.0 : 1.0);
      const Matrix one = Matrix::Identity(w.rep_size(), w.rep_size());
      r.add_term(I & ~dx_bit(a), (lever * scalar) * MatrixPoly::constant(n + 1, one) * moved);
      ++position;
    }
  }
  return r;
}

}  // namespace mcg
