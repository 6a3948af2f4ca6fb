#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mcgauge/error.hpp"

namespace mcg {

using Matrix = Eigen::MatrixXd;

/// Exponent vector of a monomial; one entry per variable.
using Exponents = std::vector<int>;

inline bool coeff_is_zero(double v) { return v == 0.0; }
inline bool coeff_is_zero(const Matrix& m) { return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0; }

inline double coeff_max_abs(double v) { return std::abs(v); }
inline double coeff_max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// x^e evaluated by repeated multiplication so every caller gets bit-identical values.
inline double monomial_value(const Exponents& e, std::span<const double> point) {
  double v = 1.0;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (int k = 0; k < e[i]; ++k) v *= point[i];
  return v;
}

/// Sparse multivariate polynomial with coefficients in T (double or Matrix).
/// Keys are unique, exact zeros are pruned.
template <class T>
class Polynomial {
 public:
  using Terms = std::map<Exponents, T>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const T& c) {
    Polynomial p(nvars);
    p.add_term(Exponents(nvars, 0), c);
    return p;
  }

  /// The single variable x_i with coefficient c.
  static Polynomial variable(std::size_t nvars, std::size_t i, const T& c) {
    Polynomial p(nvars);
    Exponents e(nvars, 0);
    e.at(i) = 1;
    p.add_term(std::move(e), c);
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add_term(Exponents e, const T& c) {
    if (e.size() != nvars_) throw SpecMismatch("polynomial: exponent vector has wrong length");
    if (coeff_is_zero(c)) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(std::move(e), c);
      return;
    }
    it->second = T(it->second + c);
    if (coeff_is_zero(it->second)) terms_.erase(it);
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_vars(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_vars(o);
    for (const auto& [e, c] : o.terms_) add_term(e, T((-1.0) * c));
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

  friend Polynomial operator*(double s, const Polynomial& p) {
    Polynomial r(p.nvars_);
    if (s == 0.0) return r;
    for (const auto& [e, c] : p.terms_) r.add_term(e, T(s * c));
    return r;
  }

  /// Coefficient-wise map (e.g. parity projection of matrix coefficients).
  template <class F>
  Polynomial map_coeffs(F&& f) const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) r.add_term(e, T(f(c)));
    return r;
  }

  /// ∂/∂x_i.
  Polynomial derivative(std::size_t i) const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e.at(i) == 0) continue;
      Exponents f = e;
      const double k = f[i]--;
      r.add_term(std::move(f), T(k * c));
    }
    return r;
  }

  /// Substitute numeric values for every variable.
  T evaluate(std::span<const double> point, const T& zero) const {
    if (point.size() != nvars_) throw SpecMismatch("polynomial: evaluation point has wrong dimension");
    T acc = zero;
    for (const auto& [e, c] : terms_) acc = T(acc + monomial_value(e, point) * c);
    return acc;
  }

  /// Substitute numbers for a subset of variables; the others are kept.
  /// `values[i]` is used when `fixed[i]` is set.
  Polynomial partial_evaluate(std::span<const double> values, const std::vector<bool>& fixed) const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) {
      double s = 1.0;
      Exponents f = e;
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (!fixed[i]) continue;
        for (int k = 0; k < e[i]; ++k) s *= values[i];
        f[i] = 0;
      }
      r.add_term(std::move(f), T(s * c));
    }
    return r;
  }

  int total_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (int v : e) s += v;
      d = std::max(d, s);
    }
    return d;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, coeff_max_abs(c));
    return m;
  }

 private:
  void check_vars(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw SpecMismatch("polynomial: variable count mismatch");
  }

  std::size_t nvars_ = 0;
  Terms terms_;
};

/// Product with coefficient multiplication a*b in order (non-commutative for matrices).
template <class A, class B>
struct ProductCoeff {
  using type = Matrix;
};
template <>
struct ProductCoeff<double, double> {
  using type = double;
};

template <class A, class B>
Polynomial<typename ProductCoeff<A, B>::type> operator*(const Polynomial<A>& a, const Polynomial<B>& b) {
  using R = typename ProductCoeff<A, B>::type;
  if (a.nvars() != b.nvars()) throw SpecMismatch("polynomial: variable count mismatch");
  Polynomial<R> r(a.nvars());
  for (const auto& [ea, ca] : a.terms()) {
    for (const auto& [eb, cb] : b.terms()) {
      Exponents e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r.add_term(std::move(e), R(ca * cb));
    }
  }
  return r;
}

using ScalarPoly = Polynomial<double>;
using MatrixPoly = Polynomial<Matrix>;

/// Replace variable i of `p` by `images[i]`; all images share one variable set.
template <class T>
Polynomial<T> substitute(const Polynomial<T>& p, std::span<const ScalarPoly> images) {
  if (images.size() != p.nvars()) throw SpecMismatch("substitute: need one image per variable");
  if (images.empty()) return p;
  const std::size_t out_vars = images[0].nvars();
  // powers[i][k] = images[i]^k, grown on demand
  std::vector<std::vector<ScalarPoly>> powers(images.size());
  for (auto& pw : powers) pw.push_back(ScalarPoly::constant(out_vars, 1.0));
  auto power = [&](std::size_t i, int k) -> const ScalarPoly& {
    while (static_cast<int>(powers[i].size()) <= k) powers[i].push_back(powers[i].back() * images[i]);
    return powers[i][k];
  };
  Polynomial<T> r(out_vars);
  for (const auto& [e, c] : p.terms()) {
    ScalarPoly m = ScalarPoly::constant(out_vars, 1.0);
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] > 0) m = m * power(i, e[i]);
    for (const auto& [em, cm] : m.terms()) r.add_term(em, T(cm * c));
  }
  return r;
}

}  // namespace mcg
