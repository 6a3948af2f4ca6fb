#pragma once

// Finite-dimensional Z2-graded associative algebras realised as matrix
// superalgebras: gl(p|q) and the associative envelope End(Λξ) of the
// vector fields on ΠV (Grassmann monomials indexed by bitmasks).

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcgauge/error.hpp"
#include "mcgauge/grassmann.hpp"
#include "mcgauge/polynomial.hpp"
#include "mcgauge/series_exp.hpp"

namespace mcg {

enum class Parity { Even = 0, Odd = 1 };

inline Parity operator+(Parity a, Parity b) {
  return static_cast<Parity>((static_cast<int>(a) + static_cast<int>(b)) & 1);
}

class AlgebraSpec {
 public:
  enum class Kind { MatrixSuper, VectPi };

  static AlgebraSpec gl(int p, int q) {
    if (p < 0 || q < 0 || p + q == 0) throw IndexError("gl(p|q) needs p, q >= 0 and p + q > 0");
    return AlgebraSpec(Kind::MatrixSuper, p, q, 0);
  }
  static AlgebraSpec vect_pi(int m) {
    if (m < 0 || m > 12) throw IndexError("vect_pi(m) needs 0 <= m <= 12");
    return AlgebraSpec(Kind::VectPi, 0, 0, m);
  }

  Kind kind() const { return kind_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int m() const { return m_; }

  /// Side length of the representing matrices: p + q, or 2^m.
  int rep_size() const { return kind_ == Kind::MatrixSuper ? p_ + q_ : (1 << m_); }

  /// (p+q)² for gl(p|q); 2^m for VectPi (size of the function algebra Λξ it acts on).
  int dimension() const { return kind_ == Kind::MatrixSuper ? rep_size() * rep_size() : rep_size(); }

  /// Parity of the i-th basis vector of the module the matrices act on.
  int basis_parity(int i) const {
    return kind_ == Kind::MatrixSuper ? (i >= p_ ? 1 : 0) : grassmann::parity(static_cast<grassmann::Mask>(i));
  }

  std::string name() const {
    return kind_ == Kind::MatrixSuper ? "gl(" + std::to_string(p_) + "|" + std::to_string(q_) + ")"
                                      : "vect_pi(" + std::to_string(m_) + ")";
  }

  friend bool operator==(const AlgebraSpec&, const AlgebraSpec&) = default;

 private:
  AlgebraSpec(Kind k, int p, int q, int m) : kind_(k), p_(p), q_(q), m_(m) {}

  Kind kind_ = Kind::MatrixSuper;
  int p_ = 1, q_ = 0, m_ = 0;
};

/// Mask of odd entries (1.0 where row and column parities differ).
inline Matrix odd_entry_mask(const AlgebraSpec& spec) {
  const int d = spec.rep_size();
  Matrix mask(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) mask(r, c) = spec.basis_parity(r) != spec.basis_parity(c) ? 1.0 : 0.0;
  return mask;
}

inline Matrix even_projection(const AlgebraSpec& spec, const Matrix& a) {
  return a.cwiseProduct((Matrix::Ones(a.rows(), a.cols()) - odd_entry_mask(spec)));
}
inline Matrix odd_projection(const AlgebraSpec& spec, const Matrix& a) { return a.cwiseProduct(odd_entry_mask(spec)); }

/// Grading automorphism a ↦ (−1)^{p(a)} a, i.e. S a S with S the parity operator.
inline Matrix grading(const AlgebraSpec& spec, const Matrix& a) {
  Matrix r = a;
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j)
      if (spec.basis_parity(i) != spec.basis_parity(j)) r(i, j) = -r(i, j);
  return r;
}

/// Entrywise max |·|.
inline double max_norm(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

/// Parity of a matrix; nullopt if it has both even and odd entries. Zero counts as even.
inline std::optional<Parity> matrix_parity(const AlgebraSpec& spec, const Matrix& a) {
  bool has_even = false, has_odd = false;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0.0) continue;
      (spec.basis_parity(i) != spec.basis_parity(j) ? has_odd : has_even) = true;
    }
  if (has_even && has_odd) return std::nullopt;
  return has_odd ? Parity::Odd : Parity::Even;
}

/// Element of the associative superalgebra; immutable value.
class SuperElement {
 public:
  SuperElement(AlgebraSpec spec, Matrix m) : spec_(spec), mat_(std::move(m)) {
    if (mat_.rows() != spec_.rep_size() || mat_.cols() != spec_.rep_size())
      throw SpecMismatch("element matrix must be " + std::to_string(spec_.rep_size()) + "x" +
                         std::to_string(spec_.rep_size()) + " for " + spec_.name());
  }

  /// Build from separate parity parts; each must respect the block pattern.
  static SuperElement from_parts(const AlgebraSpec& spec, const Matrix& even, const Matrix& odd) {
    const double tol = 0.0;
    if (max_norm(odd_projection(spec, even)) > tol) throw ParityError("even part has entries in odd blocks");
    if (max_norm(even_projection(spec, odd)) > tol) throw ParityError("odd part has entries in even blocks");
    return SuperElement(spec, even + odd);
  }

  static SuperElement zero(const AlgebraSpec& spec) {
    return SuperElement(spec, Matrix::Zero(spec.rep_size(), spec.rep_size()));
  }
  static SuperElement identity(const AlgebraSpec& spec) {
    return SuperElement(spec, Matrix::Identity(spec.rep_size(), spec.rep_size()));
  }

  const AlgebraSpec& spec() const { return spec_; }
  const Matrix& matrix() const { return mat_; }
  Matrix even_part() const { return even_projection(spec_, mat_); }
  Matrix odd_part() const { return odd_projection(spec_, mat_); }
  std::optional<Parity> parity() const { return matrix_parity(spec_, mat_); }
  double norm() const { return max_norm(mat_); }

  friend SuperElement operator+(const SuperElement& a, const SuperElement& b) {
    a.check_same(b);
    return SuperElement(a.spec_, a.mat_ + b.mat_);
  }
  friend SuperElement operator-(const SuperElement& a, const SuperElement& b) {
    a.check_same(b);
    return SuperElement(a.spec_, a.mat_ - b.mat_);
  }
  friend SuperElement operator*(const SuperElement& a, const SuperElement& b) {
    a.check_same(b);
    return SuperElement(a.spec_, a.mat_ * b.mat_);
  }
  friend SuperElement operator*(double s, const SuperElement& a) { return SuperElement(a.spec_, s * a.mat_); }

  void check_same(const SuperElement& o) const {
    if (!(spec_ == o.spec_)) throw SpecMismatch("elements of " + spec_.name() + " and " + o.spec_.name());
  }

 private:
  AlgebraSpec spec_;
  Matrix mat_;
};

/// [a,b] = ab − (−1)^{p(a)p(b)} ba, extended bilinearly over parity parts.
inline SuperElement supercommutator(const SuperElement& a, const SuperElement& b) {
  a.check_same(b);
  const Matrix a0 = a.even_part(), a1 = a.odd_part();
  const Matrix b0 = b.even_part(), b1 = b.odd_part();
  const Matrix& A = a.matrix();
  const Matrix& B = b.matrix();
  // everything commutes with sign +1 except the odd-odd piece
  Matrix r = A * B - B * A + 2.0 * (b1 * a1);
  return SuperElement(a.spec(), r);
}

/// Operator ∞-norm bound used to pick the scaling in exponentials.
inline double row_sum_norm(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff(); }

/// exp(a) for even a.
inline SuperElement alg_exp(const SuperElement& a) {
  const auto par = a.parity();
  if (!par || *par != Parity::Even) throw ParityError("alg_exp: argument must be even");
  const int d = a.spec().rep_size();
  const Matrix one = Matrix::Identity(d, d);
  return SuperElement(a.spec(), scaled_exp<Matrix>(a.matrix(), row_sum_norm(a.matrix()), one));
}

// ---------------------------------------------------------------------------
// Vector fields on ΠV as operators on Λ(ξ¹..ξᵐ)
// ---------------------------------------------------------------------------

/// One summand c·ξ^J ∂/∂ξ^k. Indices are 0-based, J strictly increasing.
struct VectorFieldTerm {
  int k = 0;
  std::vector<int> J;
  double c = 0.0;
};

inline grassmann::Mask index_mask(const std::vector<int>& idx, int m) {
  grassmann::Mask s = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= m) throw IndexError("xi index " + std::to_string(idx[i]) + " out of range");
    if (i > 0 && idx[i] <= idx[i - 1]) throw IndexError("xi multi-index must be strictly increasing");
    s |= grassmann::Mask{1} << idx[i];
  }
  return s;
}

/// Matrix of the derivation c ξ^J ∂_k acting on Λξ (rows: result monomial).
inline Matrix vect_term_matrix(int m, grassmann::Mask J, int k, double c) {
  const int d = 1 << m;
  Matrix r = Matrix::Zero(d, d);
  const grassmann::Mask kbit = grassmann::Mask{1} << k;
  for (grassmann::Mask col = 0; col < static_cast<grassmann::Mask>(d); ++col) {
    if (!(col & kbit)) continue;
    const grassmann::Mask rest = col & ~kbit;
    const int s2 = grassmann::shuffle_sign(J, rest);
    if (s2 == 0) continue;
    r(J | rest, col) += c * grassmann::left_derivative_sign(col, k) * s2;
  }
  return r;
}

/// Σ c ξ^J ∂/∂ξ^k as an element of VectPi(m).
inline SuperElement vect_field(int m, const std::vector<VectorFieldTerm>& terms) {
  const AlgebraSpec spec = AlgebraSpec::vect_pi(m);
  Matrix r = Matrix::Zero(spec.rep_size(), spec.rep_size());
  for (const auto& t : terms) {
    if (t.k < 0 || t.k >= m) throw IndexError("vector field target index " + std::to_string(t.k) + " out of range");
    r += vect_term_matrix(m, index_mask(t.J, m), t.k, t.c);
  }
  return SuperElement(spec, r);
}

/// Split an operator on Λξ by weight: entry (S,T) has weight |S| − |T|,
/// so ξ^J ∂_k lands in weight |J| − 1.
inline std::map<int, Matrix> weight_components(const SuperElement& a) {
  if (a.spec().kind() != AlgebraSpec::Kind::VectPi) throw SpecMismatch("weights are defined for vect_pi only");
  std::map<int, Matrix> out;
  const Matrix& M = a.matrix();
  for (int r = 0; r < M.rows(); ++r)
    for (int c = 0; c < M.cols(); ++c) {
      if (M(r, c) == 0.0) continue;
      const int w = grassmann::degree(r) - grassmann::degree(c);
      auto it = out.find(w);
      if (it == out.end()) it = out.emplace(w, Matrix::Zero(M.rows(), M.cols())).first;
      it->second(r, c) = M(r, c);
    }
  return out;
}

/// Coefficients of a derivation D = Σ_k D(ξ^k) ∂_k; valid when D is a derivation.
inline std::vector<VectorFieldTerm> decompose_vector_field(const SuperElement& a) {
  if (a.spec().kind() != AlgebraSpec::Kind::VectPi) throw SpecMismatch("decompose_vector_field needs vect_pi");
  const int m = a.spec().m();
  std::vector<VectorFieldTerm> out;
  for (int k = 0; k < m; ++k) {
    const int col = 1 << k;
    for (int row = 0; row < a.spec().rep_size(); ++row) {
      const double v = a.matrix()(row, col);
      if (v == 0.0) continue;
      VectorFieldTerm t;
      t.k = k;
      for (int i = 0; i < m; ++i)
        if (row & (1 << i)) t.J.push_back(i);
      t.c = v;
      out.push_back(std::move(t));
    }
  }
  return out;
}

inline std::vector<double> basis_vector(int size, grassmann::Mask s) {
  std::vector<double> v(size, 0.0);
  v[s] = 1.0;
  return v;
}

inline std::vector<double> apply_operator(const Matrix& a, const std::vector<double>& v) {
  std::vector<double> r(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r[i] += a(i, j) * v[j];
  return r;
}

/// Worst Leibniz defect ‖D(uv) − D(u)v − (−1)^{p(D)|u|} u D(v)‖ over basis pairs,
/// taken separately on the parity parts.
inline double derivation_defect(const SuperElement& a) {
  if (a.spec().kind() != AlgebraSpec::Kind::VectPi) throw SpecMismatch("derivation_defect needs vect_pi");
  const int d = a.spec().rep_size();
  double worst = 0.0;
  for (int par = 0; par < 2; ++par) {
    const Matrix D = par == 0 ? a.even_part() : a.odd_part();
    for (grassmann::Mask s = 0; s < static_cast<grassmann::Mask>(d); ++s) {
      const auto u = basis_vector(d, s);
      const auto Du = apply_operator(D, u);
      for (grassmann::Mask t = 0; t < static_cast<grassmann::Mask>(d); ++t) {
        const auto v = basis_vector(d, t);
        const auto lhs = apply_operator(D, grassmann::multiply(u, v));
        const auto r1 = grassmann::multiply(Du, v);
        const auto r2 = grassmann::multiply(u, apply_operator(D, v));
        const double sign = (par == 1 && grassmann::parity(s)) ? -1.0 : 1.0;
        for (int i = 0; i < d; ++i) worst = std::max(worst, std::abs(lhs[i] - r1[i] - sign * r2[i]));
      }
    }
  }
  return worst;
}

/// Worst multiplicativity defect ‖g(uv) − g(u)g(v)‖ over basis pairs of Λξ.
inline double automorphism_defect(const SuperElement& g) {
  if (g.spec().kind() != AlgebraSpec::Kind::VectPi) throw SpecMismatch("automorphism check needs vect_pi");
  const int d = g.spec().rep_size();
  const Matrix& G = g.matrix();
  std::vector<std::vector<double>> images(d);
  for (int s = 0; s < d; ++s) images[s] = std::vector<double>(G.col(s).data(), G.col(s).data() + d);
  double worst = 0.0;
  for (grassmann::Mask s = 0; s < static_cast<grassmann::Mask>(d); ++s) {
    for (grassmann::Mask t = 0; t < static_cast<grassmann::Mask>(d); ++t) {
      const auto prod = grassmann::multiply(images[s], images[t]);
      const int sg = grassmann::shuffle_sign(s, t);
      for (int i = 0; i < d; ++i) {
        const double lhs = sg == 0 ? 0.0 : sg * G(i, s | t);
        worst = std::max(worst, std::abs(lhs - prod[i]));
      }
    }
  }
  return worst;
}

inline bool is_automorphism(const SuperElement& g, double tol) { return automorphism_defect(g) <= tol; }

/// Chevalley–Eilenberg differential ½ ξ^i ξ^j C_{ji}^k ∂/∂ξ^k of structure
/// constants [e_i, e_j] = C_{ij}^k e_k, stored as C[i][j][k].
using StructureConstants = std::vector<std::vector<std::vector<double>>>;

inline SuperElement ce_differential(const StructureConstants& C) {
  const int m = static_cast<int>(C.size());
  std::vector<VectorFieldTerm> terms;
  // ½ Σ_{i,j} ξ^i ξ^j C_{ji}^k = Σ_{i<j} ξ^i ξ^j ½(C_{ji}^k − C_{ij}^k)
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const double c = 0.5 * (C[j][i][k] - C[i][j][k]);
        if (c != 0.0) terms.push_back({k, {i, j}, c});
      }
  return vect_field(m, terms);
}

/// Structure constants read back from a weight-+1 odd vector field; inverse of ce_differential
/// on antisymmetric tensors.
inline StructureConstants structure_constants_of(const SuperElement& C) {
  const int m = C.spec().m();
  StructureConstants out(m, std::vector<std::vector<double>>(m, std::vector<double>(m, 0.0)));
  for (const auto& t : decompose_vector_field(C)) {
    if (t.J.size() != 2) continue;
    // coefficient of ξ^i ξ^j ∂_k (i<j) is C_{ji}^k
    out[t.J[1]][t.J[0]][t.k] = t.c;
    out[t.J[0]][t.J[1]][t.k] = -t.c;
  }
  return out;
}

}  // namespace mcg
