#include <gtest/gtest.h>

#include "support.hpp"

using namespace mcg;

namespace {

IntegratorConfig cfg(int steps) { return IntegratorConfig{Scheme::CF4, steps, 1.0}; }

ScalarPoly random_poly(Rng& rng, int n) {
  ScalarPoly p(n);
  for (int k = 0; k < 2; ++k) {
    Exponents e(n, 0);
    const int total = rng.below(3);
    for (int s = 0; s < total && n > 0; ++s) ++e[rng.below(n)];
    p.add_term(e, rng.uniform(-1.0, 1.0));
  }
  return p;
}

AlgebroidSpec random_spec(Rng& rng, int n, int m) {
  AlgebroidSpec s = AlgebroidSpec::zero(n, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        s.q_xi_xi[i][j][k] = random_poly(rng, n);
        s.q_xi_xi[j][i][k] = -1.0 * s.q_xi_xi[i][j][k];
      }
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) s.q_dx_xi[a][i][k] = random_poly(rng, n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int k = 0; k < m; ++k) {
        s.q_dx_dx[a][b][k] = random_poly(rng, n);
        s.q_dx_dx[b][a][k] = -1.0 * s.q_dx_dx[a][b][k];
      }
  return s;
}

StructureConstants random_constants(Rng& rng, int m) {
  StructureConstants C(m, std::vector<std::vector<double>>(m, std::vector<double>(m, 0.0)));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        C[i][j][k] = rng.coin() ? rng.uniform(-1.0, 1.0) : 0.0;
        C[j][i][k] = -C[i][j][k];
      }
  return C;
}

StructureConstants so3_constants() {
  StructureConstants C(3, std::vector<std::vector<double>>(3, std::vector<double>(3, 0.0)));
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    C[i][j][k] = 1.0;
    C[j][i][k] = -1.0;
  }
  return C;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

void expect_specs_equal(const AlgebroidSpec& a, const AlgebroidSpec& b, double tol) {
  ASSERT_EQ(a.n, b.n);
  ASSERT_EQ(a.m, b.m);
  for (int i = 0; i < a.m; ++i)
    for (int j = 0; j < a.m; ++j)
      for (int k = 0; k < a.m; ++k) EXPECT_LE((a.q_xi_xi[i][j][k] - b.q_xi_xi[i][j][k]).max_abs_coeff(), tol);
  for (int x = 0; x < a.n; ++x)
    for (int i = 0; i < a.m; ++i)
      for (int k = 0; k < a.m; ++k) EXPECT_LE((a.q_dx_xi[x][i][k] - b.q_dx_xi[x][i][k]).max_abs_coeff(), tol);
  for (int x = 0; x < a.n; ++x)
    for (int y = 0; y < a.n; ++y)
      for (int k = 0; k < a.m; ++k) EXPECT_LE((a.q_dx_dx[x][y][k] - b.q_dx_dx[x][y][k]).max_abs_coeff(), tol);
}

}  // namespace

TEST(AlgebroidForm, ConstantBracketsGiveChevalleyEilenberg) {
  Rng rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    const StructureConstants C = random_constants(rng, 3);
    const PolyForm w = algebroid_to_form(AlgebroidSpec::constant(0, C));
    EXPECT_LE(max_norm(evaluate(w, std::vector<double>{})[0] - ce_differential(C).matrix()), 1e-15);
  }
}

TEST(AlgebroidForm, RoundTrip) {
  Rng rng(72);
  for (int trial = 0; trial < 6; ++trial) {
    const AlgebroidSpec s = random_spec(rng, 1 + trial % 2, 2 + trial % 2);
    const PolyForm w = algebroid_to_form(s);
    EXPECT_EQ(*w.parity(), Parity::Odd);
    EXPECT_EQ(weight_defect(w, 1), 0.0);
    expect_specs_equal(algebroid_from_form(w), s, 1e-15);
  }
}

TEST(AlgebroidForm, RejectsWrongWeight) {
  const AlgebraSpec s = AlgebraSpec::vect_pi(2);
  PolyForm w = PolyForm::constant(1, false, s, 0, vect_term_matrix(2, 0, 0, 1.0));
  EXPECT_GT(weight_defect(w, 1), 0.0);
  EXPECT_THROW(algebroid_from_form(w), InputError);
  EXPECT_THROW(algebroid_from_form(PolyForm(1, false, AlgebraSpec::gl(1, 1))), SpecMismatch);
}

TEST(AlgebroidSpec, AntisymmetryEnforced) {
  AlgebroidSpec s = AlgebroidSpec::zero(1, 2);
  s.q_xi_xi[0][1][0] = ScalarPoly::constant(1, 1.0);
  EXPECT_THROW(s.validate(), AntisymmetryError);
  EXPECT_THROW(algebroid_to_form(s), AntisymmetryError);
  s.q_xi_xi[1][0][0] = ScalarPoly::constant(1, -1.0);
  EXPECT_NO_THROW(s.validate());
  AlgebroidSpec t = AlgebroidSpec::zero(2, 1);
  t.q_dx_dx[0][1][0] = ScalarPoly::variable(2, 0, 1.0);
  EXPECT_THROW(t.validate(), AntisymmetryError);
}

TEST(AlgebroidSpec, SizeLimits) {
  EXPECT_THROW(AlgebroidSpec::zero(6, 7), IndexError);
  EXPECT_THROW(AlgebroidSpec::zero(1, 0), IndexError);
}

TEST(Homological, AgreesWithJacobiatorOnConstants) {
  Rng rng(73);
  std::vector<StructureConstants> cases{aff1_constants(), heisenberg_constants(), so3_constants()};
  for (int i = 0; i < 20; ++i) cases.push_back(random_constants(rng, 2 + i % 3));
  for (const auto& C : cases) {
    const HomologicalReport rep = check_homological(AlgebroidSpec::constant(1, C));
    const bool lie = jacobiator_norm(C) <= 1e-14;
    EXPECT_EQ(rep.max_coeff <= 1e-14, lie);
    EXPECT_EQ(rep.witness.empty(), rep.max_coeff == 0.0);
  }
}

TEST(Homological, JacobiViolationWitness) {
  const HomologicalReport rep = check_homological(jacobi_violation_fixture(1));
  EXPECT_GT(rep.max_coeff, 0.5);
  EXPECT_NE(rep.witness.find("Jacobi violated"), std::string::npos) << rep.witness;
  EXPECT_GT(jacobiator_norm(jacobi_violation_fixture(0).xi_xi_at(std::vector<double>{})), 0.5);
}

TEST(Homological, AtiyahFixturesAreHomological) {
  for (const AlgebroidSpec& s : {atiyah_aff1_fixture(), heisenberg_fixture()}) {
    EXPECT_EQ(check_homological(s).max_coeff, 0.0);
    // the twist produces genuine mixed components
    double mixed = 0.0;
    for (const auto& a : s.q_dx_xi)
      for (const auto& i : a)
        for (const auto& p : i) mixed = std::max(mixed, p.max_abs_coeff());
    EXPECT_GT(mixed, 0.1);
  }
}

TEST(Homological, XDependentRandomSpecUsuallyFails) {
  Rng rng(74);
  const AlgebroidSpec s = random_spec(rng, 2, 2);
  EXPECT_GT(check_homological(s).max_coeff, 1e-6);
}

TEST(Anchor, AlwaysTransitiveInChart) {
  std::string note;
  EXPECT_TRUE(anchor_check(atiyah_aff1_fixture(), &note));
  EXPECT_FALSE(note.empty());
}

TEST(AtiyahTwist, RejectsNonLieConstants) {
  StructureConstants C = jacobi_violation_fixture(0).xi_xi_at(std::vector<double>{});
  EXPECT_THROW(atiyah_twist(1, C, {}, {}), NotHomological);
}

TEST(AtiyahTwist, RejectsNonNilpotentTwist) {
  EXPECT_THROW(atiyah_twist(1, aff1_constants(), {{ScalarPoly::variable(1, 0, 1.0), Matrix::Identity(2, 2)}}, {}),
               InputError);
}

TEST(AtiyahTwist, NoTwistKeepsConstants) {
  const AlgebroidSpec s = atiyah_twist(2, heisenberg_constants(), {}, {});
  expect_specs_equal(s, AlgebroidSpec::constant(2, heisenberg_constants()), 0.0);
}

TEST(Strobl, ConstantSpecNeedsNoGauge) {
  const AlgebroidSpec s = AlgebroidSpec::constant(2, aff1_constants());
  const StroblGauge g = strobl_normalize(s, {0.0, 0.0}, lattice_points(2, -1, 1, 4), cfg(16));
  for (std::size_t i = 0; i < g.A_samples.size(); ++i) {
    EXPECT_EQ(max_norm(g.A_samples[i] - Matrix::Identity(2, 2)), 0.0);
    EXPECT_EQ(max_norm(g.beta_samples[i]), 0.0);
  }
  EXPECT_EQ(g.C_struct, aff1_constants());
}

TEST(Strobl, Aff1AtiyahFixture) {
  const AlgebroidSpec s = atiyah_aff1_fixture();
  for (const Point& base : {Point{0.0}, Point{0.3}}) {
    const StroblGauge g = strobl_normalize(s, base, lattice_points(1, -1, 1, 9), cfg(256));
    EXPECT_EQ(g.base_mismatch, 0.0);
    EXPECT_EQ(g.C_struct, s.xi_xi_at(base));
    EXPECT_LE(g.jacobi_residual, 1e-9);
    EXPECT_LE(g.c_square_norm, 1e-12);
    EXPECT_LE(max_of(g.recon_residuals), 1e-9);
    EXPECT_LE(max_of(g.chart_residuals), 1e-9);
    EXPECT_LE(max_of(g.affine_defects), 1e-8);
    EXPECT_LE(max_of(g.automorphism_defects), 1e-8);
    for (const auto& A : g.A_samples) EXPECT_GT(std::abs(A.determinant()), 1e-6);
  }
  // at the origin the twist is trivial, so the constants are those of aff(1)
  const StroblGauge g0 = strobl_normalize(s, {0.0}, {{0.5}}, cfg(64));
  EXPECT_EQ(g0.C_struct, aff1_constants());
}

TEST(Strobl, HeisenbergFixture) {
  const AlgebroidSpec s = heisenberg_fixture();
  const StroblGauge g = strobl_normalize(s, {0.0, 0.0}, lattice_points(2, -1, 1, 9), cfg(256));
  EXPECT_EQ(g.base_mismatch, 0.0);
  EXPECT_LE(jacobiator_norm(g.C_struct), 1e-12);
  EXPECT_LE(g.jacobi_residual, 1e-9);
  EXPECT_LE(max_of(g.recon_residuals), 1e-9);
  EXPECT_LE(max_of(g.chart_residuals), 1e-9);
  EXPECT_LE(max_of(g.affine_defects), 1e-8);
  EXPECT_LE(max_of(g.automorphism_defects), 1e-8);
}

TEST(Strobl, RejectsJacobiViolation) {
  try {
    strobl_normalize(jacobi_violation_fixture(1), {0.0}, {{0.0}}, cfg(16));
    FAIL() << "expected NotHomological";
  } catch (const NotHomological& e) {
    EXPECT_NE(e.witness.find("Jacobi"), std::string::npos);
  }
}
