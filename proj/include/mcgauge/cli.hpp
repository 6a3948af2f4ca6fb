#pragma once

// Command-line front end: manifests, the six subcommands and the exit-code contract.
//   0 success, 1 tolerance failure, 2 input error, 3 hypothesis violation.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcgauge/fixtures.hpp"
#include "mcgauge/io.hpp"

namespace mcg::cli {

using io::json;

enum ExitCode : int { kOk = 0, kToleranceFailure = 1, kInputError = 2, kHypothesisViolation = 3 };

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

struct SampleSpec {
  enum class Kind { Random, Lattice, Explicit };
  Kind kind = Kind::Random;
  int count = 8;
  double lo = -1.0, hi = 1.0;
  std::vector<Point> points;  ///< explicit only
  std::string text = "random:8";

  /// random:N[:lo:hi] | lattice:lo:hi:count | explicit:x1,x2;y1,y2 | N
  static SampleSpec parse(const std::string& s) {
    SampleSpec out;
    out.text = s;
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    auto num = [&](const std::string& v) {
      try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
      } catch (const std::exception&) {
        throw InputError("--samples: cannot read number \"" + v + "\" in \"" + s + "\"");
      }
    };
    auto count = [&](const std::string& v) {
      const double d = num(v);
      if (d < 1 || d != static_cast<int>(d)) throw InputError("--samples: count must be a positive integer in \"" + s + "\"");
      return static_cast<int>(d);
    };
    if (parts.size() == 1 && !parts[0].empty() && std::isdigit(static_cast<unsigned char>(parts[0][0]))) {
      out.count = count(parts[0]);
    } else if (!parts.empty() && parts[0] == "random" && (parts.size() == 2 || parts.size() == 4)) {
      out.count = count(parts[1]);
      if (parts.size() == 4) {
        out.lo = num(parts[2]);
        out.hi = num(parts[3]);
      }
    } else if (!parts.empty() && parts[0] == "lattice" && parts.size() == 4) {
      out.kind = Kind::Lattice;
      out.lo = num(parts[1]);
      out.hi = num(parts[2]);
      out.count = count(parts[3]);
    } else if (!parts.empty() && parts[0] == "explicit" && parts.size() == 2) {
      out.kind = Kind::Explicit;
      std::stringstream ps(parts[1]);
      for (std::string pt; std::getline(ps, pt, ';');) {
        Point x;
        std::stringstream cs(pt);
        for (std::string c; std::getline(cs, c, ',');)
          if (!c.empty()) x.push_back(num(c));
        out.points.push_back(std::move(x));
      }
      if (out.points.empty()) throw InputError("--samples: explicit list is empty");
      out.count = static_cast<int>(out.points.size());
    } else {
      throw InputError("--samples: expected random:N[:lo:hi], lattice:lo:hi:count, explicit:x,y;... or N, got \"" + s + "\"");
    }
    if (!(out.lo <= out.hi)) throw InputError("--samples: empty box in \"" + s + "\"");
    return out;
  }

  std::vector<Point> realize(int n, std::uint64_t seed) const {
    switch (kind) {
      case Kind::Random: {
        Rng rng(seed);
        return random_points(rng, n, count, lo, hi);
      }
      case Kind::Lattice:
        return lattice_points(n, lo, hi, count);
      case Kind::Explicit:
        for (std::size_t i = 0; i < points.size(); ++i)
          if (static_cast<int>(points[i].size()) != n)
            throw InputError("--samples: explicit point " + std::to_string(i + 1) + " has " +
                             std::to_string(points[i].size()) + " coordinates, chart has " + std::to_string(n));
        return points;
    }
    return {};
  }
};

struct RunManifest {
  std::string command;
  std::string input_path;
  std::string output_path;
  SampleSpec samples;
  std::uint64_t seed = 1;
  IntegratorConfig integrator;
  double flat_tol = kDefaultFlatTol;
  double residual_tol = 1e-6;
  std::string base;  ///< comma-separated base point; empty means the origin
  bool dump_jets = false;
  // fixtures
  std::string kind;
  std::string algebra = "gl:1:1";
  int n = 2;

  json to_json() const {
    json j{{"command", command},
           {"input", input_path},
           {"samples", samples.text},
           {"seed", seed},
           {"integrator", io::to_json(integrator)},
           {"flat_tol", flat_tol},
           {"residual_tol", residual_tol}};
    if (!base.empty()) j["base"] = base;
    return j;
  }
};

struct Outcome {
  int code = kOk;
  json report;
  std::string summary;
};

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

namespace detail {

inline std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

inline double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline AlgebraSpec parse_algebra(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  try {
    if (parts.size() == 3 && parts[0] == "gl") return AlgebraSpec::gl(std::stoi(parts[1]), std::stoi(parts[2]));
    if (parts.size() == 2 && parts[0] == "vect_pi") return AlgebraSpec::vect_pi(std::stoi(parts[1]));
  } catch (const std::invalid_argument&) {
  } catch (const IndexError& e) {
    throw InputError("--algebra: " + std::string(e.what()));
  }
  throw InputError("--algebra: expected gl:p:q or vect_pi:m, got \"" + s + "\"");
}

inline Point parse_base(const std::string& s, int n) {
  if (s.empty()) return Point(n, 0.0);
  Point x;
  std::stringstream ss(s);
  for (std::string c; std::getline(ss, c, ',');) {
    try {
      x.push_back(std::stod(c));
    } catch (const std::exception&) {
      throw InputError("--base: cannot read \"" + c + "\"");
    }
  }
  if (static_cast<int>(x.size()) != n)
    throw InputError("--base: expected " + std::to_string(n) + " coordinates, got " + std::to_string(x.size()));
  return x;
}

inline PolyForm with_t(const PolyForm& w) {
  if (w.has_t()) return w;
  PolyForm r(w.n(), true, w.spec());
  for (const auto& [mask, p] : w.terms()) r.add_term(mask, p);
  return r;
}

inline json value_to_json(const AlgebraValue& v) {
  json comps = json::array();
  for (Mask I = 0; I < v.size(); ++I) {
    const Matrix c = v[I];
    if (coeff_is_zero(c)) continue;
    json dx = json::array();
    for (int a = 0; a < v.n(); ++a)
      if (I & (Mask{1} << a)) dx.push_back(a + 1);
    comps.push_back(json{{"dx", dx}, {"value", io::element_to_json(v.spec(), c)}});
  }
  return json{{"n", v.n()}, {"components", comps}};
}

inline json witnesses_json(const std::vector<CoefficientWitness>& ws) {
  json out = json::array();
  for (const auto& w : ws) {
    json dx = json::array();
    for (int a = 0; a < 31; ++a)
      if (w.mask & dx_bit(a)) dx.push_back(a + 1);
    out.push_back(json{{"dt", (w.mask & kDt) != 0},
                       {"dx", dx},
                       {"x_pow", Exponents(w.exponents.begin(), w.exponents.end() - 1)},
                       {"t_pow", w.exponents.back()},
                       {"entry", {w.row + 1, w.col + 1}},
                       {"value", w.value},
                       {"text", w.describe()}});
  }
  return out;
}

inline void add_warnings(json& report, std::ostringstream& summary, const io::Warnings& w) {
  if (w.empty()) return;
  report["warnings"] = w;
  for (const auto& s : w) summary << "warning: " << s << "\n";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline Outcome cmd_check_flat(const RunManifest& m) {
  io::Warnings warnings;
  const PolyForm w = io::form_from_json(io::load_file(m.input_path), &warnings);
  const PolyForm Omega = curvature(w);
  const double worst = Omega.max_abs_coeff();
  const auto top = largest_coefficients(Omega, 5);
  Outcome o;
  o.code = worst <= m.flat_tol ? kOk : kToleranceFailure;
  o.report = json{{"manifest", m.to_json()},
                  {"algebra", io::to_json(w.spec())},
                  {"n", w.n()},
                  {"max_curvature_coefficient", worst},
                  {"flat", o.code == kOk},
                  {"worst_coefficients", detail::witnesses_json(top)}};
  std::ostringstream s;
  s << "check-flat: " << w.spec().name() << " on n = " << w.n() << "\n";
  detail::add_warnings(o.report, s, warnings);
  s << "max curvature coefficient: " << detail::sci(worst) << " (tolerance " << detail::sci(m.flat_tol) << ")\n";
  for (const auto& c : top) s << "  " << c.describe() << "\n";
  s << (o.code == kOk ? "FLAT" : "NOT FLAT") << "\n";
  o.summary = s.str();
  return o;
}

inline Outcome cmd_homotopy_verify(const RunManifest& m) {
  io::Warnings warnings;
  const PolyForm w = detail::with_t(io::form_from_json(io::load_file(m.input_path), &warnings));
  const auto samples = m.samples.realize(w.n(), m.seed);
  const CylinderIntegrand f(w, true);
  IntegratorConfig fine = m.integrator;
  fine.steps = 2 * m.integrator.steps;

  json records = json::array();
  std::vector<double> res, res_fine;
  double worst_group = 0.0;
  for (const auto& x : samples) {
    const HomotopyReport r = ::mcg::detail::homotopy_at(f, x, m.integrator);
    const HomotopyReport r2 = ::mcg::detail::homotopy_at(f, x, fine);
    res.push_back(r.residual);
    res_fine.push_back(r2.residual);
    worst_group = std::max(worst_group, r.group_defect);
    records.push_back(json{{"x", x},
                           {"residual", r.residual},
                           {"residual_2x_steps", r2.residual},
                           {"conjugated_residual", r.conjugated_residual},
                           {"group_defect", r.group_defect},
                           {"norm_darboux", r.darboux_term.norm()},
                           {"norm_integral", r.integral_term.norm()},
                           {"norm_t1", r.t1_term.norm()},
                           {"norm_t0", r.t0_term.norm()}});
  }
  const double a = detail::max_of(res), b = detail::max_of(res_fine);
  const double ratio = b > 0.0 ? a / b : 0.0;
  Outcome o;
  o.code = a <= m.residual_tol ? kOk : kToleranceFailure;
  o.report = json{{"manifest", m.to_json()},
                  {"algebra", io::to_json(w.spec())},
                  {"n", w.n()},
                  {"samples", records},
                  {"summary",
                   {{"max_residual", a}, {"median_residual", detail::median_of(res)}, {"max_group_defect", worst_group}}},
                  {"convergence",
                   json::array({json{{"steps", m.integrator.steps}, {"max_residual", a}, {"ratio_to_next", ratio}},
                                json{{"steps", fine.steps}, {"max_residual", b}, {"ratio_to_next", 0.0}}})}};
  std::ostringstream s;
  s << "homotopy-verify: " << w.spec().name() << " on n = " << w.n() << ", " << samples.size() << " samples, "
    << to_string(m.integrator.scheme) << "\n";
  detail::add_warnings(o.report, s, warnings);
  s << "max residual: " << detail::sci(a) << " (median " << detail::sci(detail::median_of(res)) << ", tolerance "
    << detail::sci(m.residual_tol) << ")\n";
  s << "convergence: steps " << m.integrator.steps << " -> " << detail::sci(a) << ", steps " << fine.steps << " -> "
    << detail::sci(b) << ", ratio " << std::fixed << std::setprecision(2) << ratio << "\n";
  s << "max |g g^-1 - 1|: " << detail::sci(worst_group) << "\n";
  s << (o.code == kOk ? "PASS" : "FAIL") << "\n";
  o.summary = s.str();
  return o;
}

inline Outcome cmd_primitive(const RunManifest& m) {
  io::Warnings warnings;
  const PolyForm w = io::form_from_json(io::load_file(m.input_path), &warnings);
  if (w.has_t()) throw InputError("primitive: input form must not depend on t (has_t = false)");
  const auto samples = m.samples.realize(w.n(), m.seed);
  const Point base = detail::parse_base(m.base, w.n());
  const PrimitiveResult pr = poincare_primitive(w, base, samples, m.integrator, m.flat_tol);
  const SplitReport split = split_check(w, pr);

  json records = json::array();
  double worst_group = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const GaugeJet& j = pr.jets[i];
    worst_group = std::max(worst_group, j.group_defect);
    json r{{"x", samples[i]},
           {"reconstruction_residual", pr.recon_residuals[i]},
           {"zero_form_residual", split.zero_part_residuals[i]},
           {"covariant_residual", split.covariant_residuals[i]},
           {"group_defect", j.group_defect}};
    if (m.dump_jets) {
      r["g"] = detail::value_to_json(j.g);
      r["g_inv"] = detail::value_to_json(j.g_inv);
      json dg = json::array();
      for (const auto& p : j.dg_partials) dg.push_back(detail::value_to_json(p));
      r["dg"] = dg;
    }
    records.push_back(std::move(r));
  }
  const double worst = detail::max_of(pr.recon_residuals);
  Outcome o;
  o.code = worst <= m.residual_tol ? kOk : kToleranceFailure;
  o.report = json{{"manifest", m.to_json()},
                  {"algebra", io::to_json(w.spec())},
                  {"n", w.n()},
                  {"base", base},
                  {"C", io::to_json(pr.C)},
                  {"C_square_norm", pr.c_square_norm},
                  {"samples", records},
                  {"summary",
                   {{"max_reconstruction_residual", worst},
                    {"median_reconstruction_residual", detail::median_of(pr.recon_residuals)},
                    {"max_group_defect", worst_group}}}};
  std::ostringstream s;
  s << "primitive: " << w.spec().name() << " on n = " << w.n() << ", " << samples.size() << " samples\n";
  detail::add_warnings(o.report, s, warnings);
  s << "|C^2|: " << detail::sci(pr.c_square_norm) << "\n";
  s << "max reconstruction residual: " << detail::sci(worst) << " (tolerance " << detail::sci(m.residual_tol) << ")\n";
  s << "max |g g^-1 - 1|: " << detail::sci(worst_group) << "\n";
  s << (o.code == kOk ? "PASS" : "FAIL") << "\n";
  o.summary = s.str();
  return o;
}

inline Outcome cmd_algebroid_normalize(const RunManifest& m) {
  io::Warnings warnings;
  const AlgebroidSpec spec = io::algebroid_from_json(io::load_file(m.input_path), &warnings);
  const auto samples = m.samples.realize(spec.n, m.seed);
  const Point base = detail::parse_base(m.base, spec.n);
  const StroblGauge g = strobl_normalize(spec, base, samples, m.integrator, m.flat_tol);

  json records = json::array();
  for (std::size_t i = 0; i < samples.size(); ++i)
    records.push_back(json{{"x", samples[i]},
                           {"A", io::matrix_to_json(g.A_samples[i])},
                           {"beta", io::matrix_to_json(g.beta_samples[i])},
                           {"reconstruction_residual", g.recon_residuals[i]},
                           {"chart_residual", g.chart_residuals[i]},
                           {"affine_defect", g.affine_defects[i]},
                           {"automorphism_defect", g.automorphism_defects[i]}});
  const double recon = detail::max_of(g.recon_residuals), chart = detail::max_of(g.chart_residuals);
  const bool ok = recon <= m.residual_tol && chart <= m.residual_tol && g.jacobi_residual <= m.flat_tol &&
                  g.base_mismatch == 0.0;
  Outcome o;
  o.code = ok ? kOk : kToleranceFailure;
  o.report = json{{"manifest", m.to_json()},
                  {"n", spec.n},
                  {"m", spec.m},
                  {"base", base},
                  {"C_struct", io::to_json(g.C_struct)},
                  {"jacobi_residual", g.jacobi_residual},
                  {"base_mismatch", g.base_mismatch},
                  {"samples", records},
                  {"summary",
                   {{"max_reconstruction_residual", recon},
                    {"max_chart_residual", chart},
                    {"max_affine_defect", detail::max_of(g.affine_defects)},
                    {"max_automorphism_defect", detail::max_of(g.automorphism_defects)}}}};
  std::ostringstream s;
  s << "algebroid-normalize: n = " << spec.n << ", m = " << spec.m << ", " << samples.size() << " samples\n";
  detail::add_warnings(o.report, s, warnings);
  s << "structure constants C_ij^k (nonzero, i < j):\n";
  for (int i = 0; i < spec.m; ++i)
    for (int j = i + 1; j < spec.m; ++j)
      for (int k = 0; k < spec.m; ++k)
        if (g.C_struct[i][j][k] != 0.0)
          s << "  C_" << i + 1 << j + 1 << "^" << k + 1 << " = " << g.C_struct[i][j][k] << "\n";
  s << "Jacobi residual: " << detail::sci(g.jacobi_residual) << "\n";
  s << "max reconstruction residual: " << detail::sci(recon) << ", max chart residual: " << detail::sci(chart)
    << " (tolerance " << detail::sci(m.residual_tol) << ")\n";
  s << "max affine defect: " << detail::sci(detail::max_of(g.affine_defects)) << "\n";
  s << (o.code == kOk ? "PASS" : "FAIL") << "\n";
  o.summary = s.str();
  return o;
}

inline const std::vector<std::string>& fixture_kinds() {
  static const std::vector<std::string> k{"constant",   "abelian-df",      "nilpotent-gauge",  "atiyah-aff1",
                                          "heisenberg", "nonflat-witness", "jacobi-violation", "random-cylinder"};
  return k;
}

inline Outcome cmd_fixtures(const RunManifest& m) {
  if (m.output_path.empty()) throw InputError("fixtures: --output is required");
  if (m.n < 0 || m.n > 6) throw InputError("fixtures: --n must lie in 0..6");
  Outcome o;
  std::ostringstream s;
  if (m.kind == "constant") {
    o.report = io::to_json(constant_fixture(m.n, detail::parse_algebra(m.algebra)));
  } else if (m.kind == "abelian-df") {
    o.report = io::to_json(abelian_df_fixture(m.n));
  } else if (m.kind == "nilpotent-gauge") {
    const FlatFixture fx = nilpotent_gauge_fixture(m.seed, m.n, detail::parse_algebra(m.algebra));
    for (const auto& w : fx.warnings) s << "warning: " << w << "\n";
    s << "homological constant: " << fx.label << "\n";
    o.report = io::to_json(fx.form);
  } else if (m.kind == "atiyah-aff1") {
    o.report = io::to_json(atiyah_aff1_fixture());
  } else if (m.kind == "heisenberg") {
    o.report = io::to_json(heisenberg_fixture());
  } else if (m.kind == "nonflat-witness") {
    o.report = io::to_json(nonflat_fixture(m.n));
  } else if (m.kind == "jacobi-violation") {
    o.report = io::to_json(jacobi_violation_fixture(m.n));
  } else if (m.kind == "random-cylinder") {
    Rng rng(m.seed);
    o.report = io::to_json(random_cylinder_form(rng, m.n, detail::parse_algebra(m.algebra)));
  } else {
    std::string known;
    for (const auto& k : fixture_kinds()) known += (known.empty() ? "" : ", ") + k;
    throw InputError("fixtures: unknown kind \"" + m.kind + "\" (known: " + known + ")");
  }
  s << "fixture " << m.kind << " written to " << m.output_path << "\n";
  o.summary = s.str();
  return o;
}

/// Small end-to-end checks of every module.
inline Outcome cmd_selftest(const RunManifest& m) {
  std::ostringstream s;
  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool pass, double value) {
    all = all && pass;
    checks.push_back(json{{"name", name}, {"pass", pass}, {"value", value}});
    s << (pass ? "PASS " : "FAIL ") << name << " (" << detail::sci(value) << ")\n";
  };
  Rng rng(m.seed);
  const AlgebraSpec g11 = AlgebraSpec::gl(1, 1), v2 = AlgebraSpec::vect_pi(2);

  {
    const double v = exterior_d(exterior_d(random_cylinder_form(rng, 2, g11))).max_abs_coeff();
    record("d^2 = 0", v <= 1e-12, v);
  }
  {
    const PolyForm f = random_cylinder_form(rng, 2, v2);
    const auto rep = homotopy_check(f, random_points(rng, 2, 2), IntegratorConfig{Scheme::CF4, 128, 1.0});
    double worst = 0.0;
    for (const auto& r : rep) worst = std::max(worst, r.residual);
    record("homotopy formula, vect_pi(2), 128 steps", worst <= 1e-8, worst);
  }
  {
    const FlatFixture fx = random_flat_fixture(rng, 2, AlgebraSpec::gl(2, 1));
    const auto pr = poincare_primitive(fx.form, Point(2, 0.0), random_points(rng, 2, 2), IntegratorConfig{});
    record("Poincare primitive reconstruction, gl(2|1)", detail::max_of(pr.recon_residuals) <= 1e-8,
           detail::max_of(pr.recon_residuals));
  }
  {
    const StroblGauge g = strobl_normalize(atiyah_aff1_fixture(), {0.0}, {{0.5}, {-0.5}}, IntegratorConfig{});
    const double v = std::max(detail::max_of(g.recon_residuals), g.jacobi_residual);
    record("Strobl gauge, Atiyah-twisted aff(1)", v <= 1e-8 && g.base_mismatch == 0.0, v);
  }
  {
    bool refused = false;
    try {
      poincare_primitive(nonflat_fixture(1), {0.0}, {{0.5}}, IntegratorConfig{});
    } catch (const NotFlat&) {
      refused = true;
    }
    record("non-flat input refused", refused, 0.0);
  }
  {
    bool refused = false;
    try {
      strobl_normalize(jacobi_violation_fixture(), {}, {{}}, IntegratorConfig{});
    } catch (const NotHomological&) {
      refused = true;
    }
    record("Jacobi-violating structure refused", refused, 0.0);
  }
  s << (all ? "selftest: all checks passed" : "selftest: FAILED") << "\n";
  return Outcome{all ? kOk : kToleranceFailure, json{{"manifest", m.to_json()}, {"checks", checks}}, s.str()};
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

inline int execute(const RunManifest& m, std::ostream& out, std::ostream& err) {
  Outcome o;
  try {
    m.integrator.validate();
    if (m.command == "check-flat")
      o = cmd_check_flat(m);
    else if (m.command == "homotopy-verify")
      o = cmd_homotopy_verify(m);
    else if (m.command == "primitive")
      o = cmd_primitive(m);
    else if (m.command == "algebroid-normalize")
      o = cmd_algebroid_normalize(m);
    else if (m.command == "fixtures")
      o = cmd_fixtures(m);
    else if (m.command == "selftest")
      o = cmd_selftest(m);
    else
      throw InputError("unknown command \"" + m.command + "\"");
  } catch (const NotFlat& e) {
    o = Outcome{kHypothesisViolation,
                json{{"manifest", m.to_json()}, {"error", e.what()}, {"witness", e.witness}},
                std::string("hypothesis violation: ") + e.what() + "\nwitness: " + e.witness + "\n"};
  } catch (const NotHomological& e) {
    o = Outcome{kHypothesisViolation,
                json{{"manifest", m.to_json()}, {"error", e.what()}, {"witness", e.witness}},
                std::string("hypothesis violation: ") + e.what() + "\nwitness: " + e.witness + "\n"};
  } catch (const NumericError& e) {
    o = Outcome{kToleranceFailure, json{{"manifest", m.to_json()}, {"error", e.what()}},
                std::string("numerical failure: ") + e.what() + "\n"};
  } catch (const Error& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  }
  try {
    if (!m.output_path.empty()) write_text(m.output_path, io::dump(o.report));
  } catch (const Error& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  }
  (o.code == kHypothesisViolation ? err : out) << o.summary;
  return o.code;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Graded exterior calculus, multiplicative fiber integrals and Strobl-gauge normalization"};
  app.require_subcommand(1);
  RunManifest m;
  std::string samples = "random:8", scheme = "cf4";

  auto common = [&](CLI::App* sub, bool integrator) {
    sub->add_option("--input", m.input_path, "input JSON file")->required();
    sub->add_option("--output", m.output_path, "JSON report path");
    sub->add_option("--samples", samples, "random:N[:lo:hi] | lattice:lo:hi:count | explicit:x,y;... | N");
    sub->add_option("--seed", m.seed, "seed for random sampling");
    sub->add_option("--flat-tol", m.flat_tol, "curvature tolerance");
    sub->add_option("--residual-tol", m.residual_tol, "residual tolerance");
    if (integrator) {
      sub->add_option("--steps", m.integrator.steps, "integrator steps");
      sub->add_option("--scheme", scheme, "cf4 or rk4");
      sub->add_option("--t-end", m.integrator.t_end, "end of the fiber interval");
    }
  };
  auto* flat = app.add_subcommand("check-flat", "curvature of a form");
  common(flat, false);
  auto* hom = app.add_subcommand("homotopy-verify", "non-Abelian homotopy formula at sample points");
  common(hom, true);
  auto* prim = app.add_subcommand("primitive", "multiplicative Poincare primitive of a flat form");
  common(prim, true);
  prim->add_option("--base", m.base, "base point x1,x2,...");
  prim->add_flag("--dump-jets", m.dump_jets, "include g, g^-1 and dg in the report");
  auto* alg = app.add_subcommand("algebroid-normalize", "Strobl gauge of a transitive algebroid chart");
  common(alg, true);
  alg->add_option("--base", m.base, "base point x1,x2,...");
  auto* fix = app.add_subcommand("fixtures", "write a fixture file");
  fix->add_option("--kind", m.kind, "fixture family")->required();
  fix->add_option("--output", m.output_path, "output path")->required();
  fix->add_option("--algebra", m.algebra, "gl:p:q or vect_pi:m");
  fix->add_option("--n", m.n, "chart dimension");
  fix->add_option("--seed", m.seed, "seed");
  auto* self = app.add_subcommand("selftest", "quick end-to-end checks");
  self->add_option("--seed", m.seed, "seed");
  self->add_option("--output", m.output_path, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    if (!app.get_subcommands().empty()) msg += "\n" + app.get_subcommands().front()->help();
    err << "input error: " << msg << "\n";
    return kInputError;
  }
  m.command = app.get_subcommands().front()->get_name();
  try {
    m.samples = SampleSpec::parse(samples);
    m.integrator.scheme = io::scheme_from_string(scheme, "--scheme");
  } catch (const Error& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  }
  return execute(m, out, err);
}

}  // namespace mcg::cli
