#pragma once

// JSON encodings of algebras, elements, forms, integrator settings and
// algebroid chart data. Files use 1-based indices.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcgauge/algebroid.hpp"

namespace mcg::io {

using nlohmann::json;
using Warnings = std::vector<std::string>;

namespace detail {

inline void warn(Warnings* w, std::string msg) {
  if (w) w->push_back(std::move(msg));
}

inline const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw InputError(path + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(path + ": missing key \"" + key + "\"");
  return *it;
}

inline int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw InputError(path + ": expected an integer");
  return j.get<int>();
}

inline double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw InputError(path + ": expected a number");
  return j.get<double>();
}

inline bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw InputError(path + ": expected true or false");
  return j.get<bool>();
}

inline const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw InputError(path + ": expected an array");
  return j;
}

inline std::string at(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }
inline std::string at(const std::string& path, const char* key) { return path + "/" + key; }

}  // namespace detail

/// Parses text; syntax errors become InputError with the byte offset.
inline json parse(const std::string& text, const std::string& origin = "input") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ": JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Algebras and elements
// ---------------------------------------------------------------------------

inline json to_json(const AlgebraSpec& s) {
  if (s.kind() == AlgebraSpec::Kind::VectPi) return json{{"kind", "vect_pi"}, {"m", s.m()}};
  return json{{"kind", "gl"}, {"p", s.p()}, {"q", s.q()}};
}

inline AlgebraSpec algebra_from_json(const json& j, const std::string& path = "") {
  using namespace detail;
  const json& kind = field(j, "kind", path);
  if (!kind.is_string()) throw InputError(at(path, "kind") + ": expected a string");
  try {
    if (kind == "gl") return AlgebraSpec::gl(as_int(field(j, "p", path), at(path, "p")), as_int(field(j, "q", path), at(path, "q")));
    if (kind == "vect_pi") return AlgebraSpec::vect_pi(as_int(field(j, "m", path), at(path, "m")));
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what());
  }
  throw InputError(at(path, "kind") + ": unknown algebra kind " + kind.dump());
}

inline json matrix_to_json(const Matrix& a) {
  json rows = json::array();
  for (int r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < a.cols(); ++c) row.push_back(a(r, c) + 0.0);  // no -0.0 in files
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, int rows, int cols, const std::string& path) {
  using namespace detail;
  as_array(j, path);
  if (static_cast<int>(j.size()) != rows)
    throw InputError(path + ": expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  Matrix a(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const std::string rp = at(path, r);
    const json& row = as_array(j[r], rp);
    if (static_cast<int>(row.size()) != cols)
      throw InputError(rp + ": expected " + std::to_string(cols) + " columns, got " + std::to_string(row.size()));
    for (int c = 0; c < cols; ++c) a(r, c) = as_double(row[c], at(rp, c));
  }
  return a;
}

/// {"even":[[...]],"odd":[[...]]}, each a full rep_size × rep_size matrix.
inline json element_to_json(const AlgebraSpec& spec, const Matrix& a) {
  return json{{"even", matrix_to_json(even_projection(spec, a))}, {"odd", matrix_to_json(odd_projection(spec, a))}};
}

inline json to_json(const SuperElement& e) { return element_to_json(e.spec(), e.matrix()); }

/// Missing parts are zero; entries placed in the wrong parity block are rejected.
inline Matrix element_from_json(const json& j, const AlgebraSpec& spec, const std::string& path) {
  using namespace detail;
  if (!j.is_object()) throw InputError(path + ": expected an element object");
  const int d = spec.rep_size();
  Matrix total = Matrix::Zero(d, d);
  const Matrix odd_mask = odd_entry_mask(spec);
  for (const char* part : {"even", "odd"}) {
    const auto it = j.find(part);
    if (it == j.end()) continue;
    const Matrix a = matrix_from_json(*it, d, d, at(path, part));
    const bool want_odd = std::string(part) == "odd";
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        if (a(r, c) != 0.0 && (odd_mask(r, c) != 0.0) != want_odd)
          throw InputError(at(at(at(path, part), r), c) + ": entry lies in the " + (want_odd ? "even" : "odd") +
                           " block");
    total += a;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Forms
// ---------------------------------------------------------------------------

inline json to_json(const PolyForm& f) {
  json terms = json::array();
  for (const auto& [mask, p] : f.terms()) {
    json dx = json::array();
    for (int a = 0; a < f.n(); ++a)
      if (mask & dx_bit(a)) dx.push_back(a + 1);
    json coeff = json::array();
    for (const auto& [e, c] : p.terms())
      coeff.push_back(json{{"x_pow", Exponents(e.begin(), e.end() - 1)},
                           {"t_pow", e.back()},
                           {"value", element_to_json(f.spec(), c)}});
    terms.push_back(json{{"dt", (mask & kDt) != 0}, {"dx", std::move(dx)}, {"coeff", std::move(coeff)}});
  }
  return json{{"n", f.n()}, {"has_t", f.has_t()}, {"algebra", to_json(f.spec())}, {"terms", std::move(terms)}};
}

/// Unsorted dx lists are brought to ascending order with the Koszul sign; repeated indices give zero.
inline PolyForm form_from_json(const json& j, Warnings* warnings = nullptr, const std::string& path = "") {
  using namespace detail;
  const int n = as_int(field(j, "n", path), at(path, "n"));
  if (n < 0 || n > 20) throw InputError(at(path, "n") + ": out of range");
  const bool has_t = as_bool(field(j, "has_t", path), at(path, "has_t"));
  const AlgebraSpec spec = algebra_from_json(field(j, "algebra", path), at(path, "algebra"));
  PolyForm f(n, has_t, spec);
  const std::string tp = at(path, "terms");
  const json& terms = as_array(field(j, "terms", path), tp);
  for (std::size_t ti = 0; ti < terms.size(); ++ti) {
    const std::string p = at(tp, ti);
    const json& term = terms[ti];
    const bool dt = term.contains("dt") ? as_bool(term["dt"], at(p, "dt")) : false;
    if (dt && !has_t) throw InputError(at(p, "dt") + ": dt term in a form without t");
    std::vector<int> dx;
    const json& dxj = as_array(field(term, "dx", p), at(p, "dx"));
    for (std::size_t k = 0; k < dxj.size(); ++k) {
      const int a = as_int(dxj[k], at(at(p, "dx"), k));
      if (a < 1 || a > n) throw InputError(at(at(p, "dx"), k) + ": index out of range 1.." + std::to_string(n));
      dx.push_back(a);
    }
    double sign = 1.0;
    for (std::size_t i = 0; i < dx.size(); ++i)
      for (std::size_t k = i + 1; k < dx.size(); ++k)
        if (dx[i] > dx[k]) sign = -sign;
    std::vector<int> sorted = dx;
    std::sort(sorted.begin(), sorted.end());
    const bool repeated = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
    if (sorted != dx && !repeated) warn(warnings, at(p, "dx") + ": reordered to ascending with sign " + (sign > 0 ? "+" : "-"));
    if (repeated) {
      warn(warnings, at(p, "dx") + ": repeated index, term is zero and was dropped");
      continue;
    }
    Mask mask = dt ? kDt : 0;
    for (int a : sorted) mask |= dx_bit(a - 1);
    const std::string cp = at(p, "coeff");
    const json& coeff = as_array(field(term, "coeff", p), cp);
    for (std::size_t ci = 0; ci < coeff.size(); ++ci) {
      const std::string mp = at(cp, ci);
      const json& mono = coeff[ci];
      const json& xp = as_array(field(mono, "x_pow", mp), at(mp, "x_pow"));
      if (static_cast<int>(xp.size()) != n)
        throw InputError(at(mp, "x_pow") + ": expected " + std::to_string(n) + " exponents");
      Exponents e;
      for (std::size_t k = 0; k < xp.size(); ++k) {
        const int v = as_int(xp[k], at(at(mp, "x_pow"), k));
        if (v < 0) throw InputError(at(at(mp, "x_pow"), k) + ": negative exponent");
        e.push_back(v);
      }
      const int tpow = mono.contains("t_pow") ? as_int(mono["t_pow"], at(mp, "t_pow")) : 0;
      if (tpow < 0) throw InputError(at(mp, "t_pow") + ": negative exponent");
      if (tpow > 0 && !has_t) throw InputError(at(mp, "t_pow") + ": t power in a form without t");
      e.push_back(tpow);
      f.add_monomial(mask, std::move(e), sign * element_from_json(field(mono, "value", mp), spec, at(mp, "value")));
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Integrator settings
// ---------------------------------------------------------------------------

inline json to_json(const IntegratorConfig& c) {
  return json{{"scheme", to_string(c.scheme)}, {"steps", c.steps}, {"t_end", c.t_end}};
}

inline Scheme scheme_from_string(const std::string& s, const std::string& path = "scheme") {
  if (s == "cf4") return Scheme::CF4;
  if (s == "rk4") return Scheme::RK4;
  throw InputError(path + ": unknown scheme \"" + s + "\" (expected cf4 or rk4)");
}

inline IntegratorConfig config_from_json(const json& j, const std::string& path = "") {
  using namespace detail;
  IntegratorConfig c;
  if (!j.is_object()) throw InputError(path + ": expected an object");
  if (j.contains("scheme")) {
    if (!j["scheme"].is_string()) throw InputError(at(path, "scheme") + ": expected a string");
    c.scheme = scheme_from_string(j["scheme"].get<std::string>(), at(path, "scheme"));
  }
  if (j.contains("steps")) c.steps = as_int(j["steps"], at(path, "steps"));
  if (j.contains("t_end")) c.t_end = as_double(j["t_end"], at(path, "t_end"));
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Algebroid chart data
// ---------------------------------------------------------------------------

/// Polynomial in x as [{"x_pow":[...],"value":v}].
inline json to_json(const ScalarPoly& p) {
  json out = json::array();
  for (const auto& [e, c] : p.terms()) out.push_back(json{{"x_pow", e}, {"value", c}});
  return out;
}

inline ScalarPoly poly_from_json(const json& j, int n, const std::string& path) {
  using namespace detail;
  as_array(j, path);
  ScalarPoly p(n);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string mp = at(path, i);
    const json& xp = as_array(field(j[i], "x_pow", mp), at(mp, "x_pow"));
    if (static_cast<int>(xp.size()) != n) throw InputError(at(mp, "x_pow") + ": expected " + std::to_string(n) + " exponents");
    Exponents e;
    for (std::size_t k = 0; k < xp.size(); ++k) {
      const int v = as_int(xp[k], at(at(mp, "x_pow"), k));
      if (v < 0) throw InputError(at(at(mp, "x_pow"), k) + ": negative exponent");
      e.push_back(v);
    }
    p.add_term(std::move(e), as_double(field(j[i], "value", mp), at(mp, "value")));
  }
  return p;
}

namespace detail {

using Tensor = std::vector<std::vector<std::vector<ScalarPoly>>>;

inline json tensor_entries(const Tensor& T, bool lower_half_only) {
  json out = json::array();
  for (std::size_t i = 0; i < T.size(); ++i)
    for (std::size_t j = 0; j < T[i].size(); ++j) {
      if (lower_half_only && j <= i) continue;
      for (std::size_t k = 0; k < T[i][j].size(); ++k)
        if (!T[i][j][k].empty())
          out.push_back(json{{"i", i + 1}, {"j", j + 1}, {"k", k + 1}, {"poly", to_json(T[i][j][k])}});
    }
  return out;
}

/// Reads (i,j,k,poly) entries. For antisymmetric slots a lone (i,j) entry implies (j,i) = −(i,j);
/// when both are present any symmetric part is removed with a warning.
inline Tensor read_tensor(const json& j, int di, int dj, int dk, int n, bool antisymmetric, const std::string& path,
                          Warnings* warnings) {
  as_array(j, path);
  Tensor T(di, std::vector(dj, std::vector<ScalarPoly>(dk, ScalarPoly(n))));
  std::vector<std::vector<std::vector<bool>>> given(di, std::vector(dj, std::vector<bool>(dk, false)));
  for (std::size_t e = 0; e < j.size(); ++e) {
    const std::string p = at(path, e);
    auto index = [&](const char* key, int hi) {
      const int v = as_int(field(j[e], key, p), at(p, key));
      if (v < 1 || v > hi) throw InputError(at(p, key) + ": index out of range 1.." + std::to_string(hi));
      return v - 1;
    };
    const int a = index("i", di), b = index("j", dj), k = index("k", dk);
    T[a][b][k] += poly_from_json(field(j[e], "poly", p), n, at(p, "poly"));
    given[a][b][k] = true;
  }
  if (!antisymmetric) return T;
  for (int a = 0; a < di; ++a)
    for (int k = 0; k < dk; ++k) {
      if (!T[a][a][k].empty()) {
        warn(warnings, path + ": diagonal entry (" + std::to_string(a + 1) + "," + std::to_string(a + 1) + "," +
                           std::to_string(k + 1) + ") is a symmetric part and was dropped");
        T[a][a][k] = ScalarPoly(n);
      }
      for (int b = a + 1; b < dj; ++b) {
        if (given[a][b][k] && given[b][a][k]) {
          const ScalarPoly sym = T[a][b][k] + T[b][a][k];
          if (sym.max_abs_coeff() > 0.0) {
            warn(warnings, path + ": entries (" + std::to_string(a + 1) + "," + std::to_string(b + 1) + "," +
                               std::to_string(k + 1) + ") and (" + std::to_string(b + 1) + "," + std::to_string(a + 1) +
                               "," + std::to_string(k + 1) + ") have a symmetric part (max coefficient " +
                               std::to_string(sym.max_abs_coeff()) + "); antisymmetrized");
            ScalarPoly anti = 0.5 * (T[a][b][k] - T[b][a][k]);
            T[a][b][k] = anti;
            T[b][a][k] = -1.0 * anti;
          }
        } else if (given[a][b][k]) {
          T[b][a][k] = -1.0 * T[a][b][k];
        } else if (given[b][a][k]) {
          T[a][b][k] = -1.0 * T[b][a][k];
        }
      }
    }
  return T;
}

}  // namespace detail

/// Antisymmetric tensors list only their i < j entries.
inline json to_json(const AlgebroidSpec& s) {
  return json{{"n", s.n},
              {"m", s.m},
              {"q_xixi", detail::tensor_entries(s.q_xi_xi, true)},
              {"q_dxxi", detail::tensor_entries(s.q_dx_xi, false)},
              {"q_dxdx", detail::tensor_entries(s.q_dx_dx, true)}};
}

inline AlgebroidSpec algebroid_from_json(const json& j, Warnings* warnings = nullptr, const std::string& path = "") {
  using namespace detail;
  const int n = as_int(field(j, "n", path), at(path, "n"));
  const int m = as_int(field(j, "m", path), at(path, "m"));
  if (n < 0 || m < 1 || n + m > 12) throw InputError(path + ": need n >= 0, m >= 1 and n + m <= 12");
  AlgebroidSpec s = AlgebroidSpec::zero(n, m);
  auto opt = [&](const char* key) -> json { return j.contains(key) ? j[key] : json::array(); };
  s.q_xi_xi = read_tensor(opt("q_xixi"), m, m, m, n, true, at(path, "q_xixi"), warnings);
  s.q_dx_xi = read_tensor(opt("q_dxxi"), n, m, m, n, false, at(path, "q_dxxi"), warnings);
  s.q_dx_dx = read_tensor(opt("q_dxdx"), n, n, m, n, true, at(path, "q_dxdx"), warnings);
  s.validate();
  return s;
}

/// C[i][j][k] as nested arrays.
inline json to_json(const StructureConstants& C) {
  json out = json::array();
  for (const auto& u : C) {
    json row = json::array();
    for (const auto& v : u) {
      json col = json::array();
      for (double w : v) col.push_back(w + 0.0);
      row.push_back(std::move(col));
    }
    out.push_back(std::move(row));
  }
  return out;
}

inline json point_to_json(const Point& x) { return json(x); }

}  // namespace mcg::io
