#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace mcg;
using test::unit;

namespace {

SuperElement random_homogeneous(Rng& rng, const AlgebraSpec& spec, Parity p) {
  return SuperElement(spec, random_element(rng, spec, p));
}

double sign_of(Parity a, Parity b) { return (a == Parity::Odd && b == Parity::Odd) ? -1.0 : 1.0; }

}  // namespace

TEST(Supercommutator, OddUnitsInGl11GiveIdentity) {
  const AlgebraSpec s = AlgebraSpec::gl(1, 1);
  const SuperElement a(s, unit(2, 0, 1)), b(s, unit(2, 1, 0));
  EXPECT_EQ(supercommutator(a, b).matrix(), Matrix::Identity(2, 2));
}

TEST(Supercommutator, OddSelfBracketIsTwiceSquare) {
  Rng rng(3);
  const AlgebraSpec s = AlgebraSpec::gl(2, 1);
  const SuperElement a = random_homogeneous(rng, s, Parity::Odd);
  EXPECT_LE(max_norm(supercommutator(a, a).matrix() - 2.0 * (a * a).matrix()), 1e-15);
}

TEST(Supercommutator, EvenSelfBracketVanishes) {
  Rng rng(4);
  const AlgebraSpec s = AlgebraSpec::gl(2, 1);
  const SuperElement a = random_homogeneous(rng, s, Parity::Even);
  EXPECT_EQ(supercommutator(a, a).norm(), 0.0);
}

TEST(Supercommutator, MixedSpecsRejected) {
  EXPECT_THROW(supercommutator(SuperElement::zero(AlgebraSpec::gl(1, 1)), SuperElement::zero(AlgebraSpec::gl(2, 0))),
               SpecMismatch);
}

TEST(SuperElement, WrongSizeRejected) { EXPECT_THROW(SuperElement(AlgebraSpec::gl(1, 1), Matrix::Zero(3, 3)), SpecMismatch); }

TEST(SuperElement, FromPartsChecksBlocks) {
  const AlgebraSpec s = AlgebraSpec::gl(1, 1);
  EXPECT_THROW(SuperElement::from_parts(s, unit(2, 0, 1), Matrix::Zero(2, 2)), ParityError);
  EXPECT_THROW(SuperElement::from_parts(s, Matrix::Zero(2, 2), unit(2, 0, 0)), ParityError);
  const SuperElement e = SuperElement::from_parts(s, unit(2, 1, 1), unit(2, 1, 0));
  EXPECT_FALSE(e.parity().has_value());
}

TEST(AlgExp, ZeroIsIdentity) {
  const AlgebraSpec s = AlgebraSpec::gl(2, 1);
  EXPECT_EQ(alg_exp(SuperElement::zero(s)).matrix(), Matrix::Identity(3, 3));
}

TEST(AlgExp, NilpotentSeriesTerminates) {
  const AlgebraSpec s = AlgebraSpec::gl(2, 0);
  const Matrix N = 0.8 * unit(2, 0, 1);
  EXPECT_LE(max_norm(alg_exp(SuperElement(s, N)).matrix() - (Matrix::Identity(2, 2) + N)), 1e-15);
}

TEST(AlgExp, Diagonal) {
  const AlgebraSpec s = AlgebraSpec::gl(2, 0);
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 2.0;
  const Matrix E = alg_exp(SuperElement(s, D)).matrix();
  EXPECT_NEAR(E(0, 0), std::exp(1.0), 1e-14);
  EXPECT_NEAR(E(1, 1), std::exp(2.0), 1e-13);
  EXPECT_EQ(E(0, 1), 0.0);
}

TEST(AlgExp, RotationGenerator) {
  const AlgebraSpec s = AlgebraSpec::gl(2, 0);
  Matrix J(2, 2);
  J << 0, -3.0, 3.0, 0;
  const Matrix E = alg_exp(SuperElement(s, J)).matrix();
  EXPECT_NEAR(E(0, 0), std::cos(3.0), 1e-13);
  EXPECT_NEAR(E(1, 0), std::sin(3.0), 1e-13);
}

TEST(AlgExp, OddArgumentRejected) {
  EXPECT_THROW(alg_exp(SuperElement(AlgebraSpec::gl(1, 1), unit(2, 0, 1))), ParityError);
}

TEST(AlgExp, InverseProperty) {
  Rng rng(11);
  for (int i = 0; i < 4; ++i) {
    const AlgebraSpec s = test::algebra_by_index(i);
    const SuperElement a = SuperElement(s, random_element(rng, s, Parity::Even, 2.0));
    const SuperElement e = alg_exp(a) * alg_exp(-1.0 * a);
    EXPECT_LE(max_norm(e.matrix() - Matrix::Identity(s.rep_size(), s.rep_size())), 1e-12) << s.name();
  }
}

TEST(AlgExp, MatchesEigenvalueRuleOnCommutingSum) {
  Rng rng(12);
  const AlgebraSpec s = AlgebraSpec::gl(2, 1);
  const SuperElement a(s, random_element(rng, s, Parity::Even));
  const SuperElement twice = alg_exp(2.0 * a);
  const SuperElement sq = alg_exp(a) * alg_exp(a);
  EXPECT_LE(max_norm(twice.matrix() - sq.matrix()), 1e-12);
}

TEST(VectorField, PartialXiOnOneGenerator) {
  const SuperElement d = vect_field(1, {{0, {}, 1.0}});
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 1) = 1.0;
  EXPECT_EQ(d.matrix(), expect);
  EXPECT_EQ(*d.parity(), Parity::Odd);
}

TEST(VectorField, EulerFieldCountsDegree) {
  const int m = 3;
  std::vector<VectorFieldTerm> terms;
  for (int k = 0; k < m; ++k) terms.push_back({k, {k}, 1.0});
  const SuperElement E = vect_field(m, terms);
  for (Mask s = 0; s < 8; ++s) EXPECT_EQ(E.matrix()(s, s), grassmann::degree(s));
  EXPECT_EQ(*E.parity(), Parity::Even);
}

TEST(VectorField, IndicesOutOfRangeRejected) {
  EXPECT_THROW(vect_field(2, {{2, {}, 1.0}}), IndexError);
  EXPECT_THROW(vect_field(2, {{0, {5}, 1.0}}), IndexError);
}

TEST(VectorField, DecomposeRoundTrips) {
  Rng rng(5);
  const AlgebraSpec s = AlgebraSpec::vect_pi(3);
  const SuperElement v(s, random_element(rng, s, Parity::Odd));
  EXPECT_LE(max_norm(vect_field(3, decompose_vector_field(v)).matrix() - v.matrix()), 1e-15);
}

TEST(VectorField, WeightComponents) {
  const SuperElement v = vect_field(2, {{0, {}, 1.0}, {1, {0, 1}, 2.0}});
  const auto w = weight_components(v);
  ASSERT_TRUE(w.count(-1));
  ASSERT_TRUE(w.count(1));
  EXPECT_LE(max_norm(w.at(-1) - vect_term_matrix(2, 0, 0, 1.0)), 0.0);
}

TEST(VectorField, DerivationProperty) {
  Rng rng(6);
  for (int m = 1; m <= 3; ++m)
    for (int p = 0; p < 2; ++p) {
      const AlgebraSpec s = AlgebraSpec::vect_pi(m);
      const SuperElement v(s, random_element(rng, s, p ? Parity::Odd : Parity::Even));
      EXPECT_LE(derivation_defect(v), 1e-13) << "m = " << m;
    }
}

TEST(VectorField, NonDerivationDetected) {
  const AlgebraSpec s = AlgebraSpec::vect_pi(2);
  EXPECT_GT(derivation_defect(SuperElement(s, unit(4, 0, 0))), 0.5);
}

TEST(ChevalleyEilenberg, AbelianIsZero) {
  StructureConstants C(2, std::vector<std::vector<double>>(2, std::vector<double>(2, 0.0)));
  EXPECT_EQ(ce_differential(C).norm(), 0.0);
}

TEST(ChevalleyEilenberg, Aff1MatchesHandBuiltField) {
  // −ξ¹ξ²∂₂ on the basis 1, ξ¹, ξ², ξ¹ξ² sends ξ² to −ξ¹ξ² and kills the rest
  Matrix expect = Matrix::Zero(4, 4);
  expect(3, 2) = -1.0;
  const SuperElement Q = ce_differential(aff1_constants());
  EXPECT_LE(max_norm(Q.matrix() - expect), 1e-15);
  EXPECT_EQ((Q * Q).norm(), 0.0);
}

TEST(ChevalleyEilenberg, StructureConstantsRoundTrip) {
  Rng rng(7);
  const int m = 3;
  StructureConstants C(m, std::vector<std::vector<double>>(m, std::vector<double>(m, 0.0)));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        C[i][j][k] = rng.uniform(-1, 1);
        C[j][i][k] = -C[i][j][k];
      }
  const StructureConstants back = structure_constants_of(ce_differential(C));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) EXPECT_NEAR(back[i][j][k], C[i][j][k], 1e-15);
}

TEST(ChevalleyEilenberg, SquareVanishesIffJacobi) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 3;
    StructureConstants C(m, std::vector<std::vector<double>>(m, std::vector<double>(m, 0.0)));
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          C[i][j][k] = trial % 2 ? rng.uniform(-1, 1) : 0.0;
          C[j][i][k] = -C[i][j][k];
        }
    if (trial % 2 == 0) C = trial % 4 ? heisenberg_constants() : C;
    const SuperElement Q = ce_differential(C);
    const double sq = (Q * Q).norm(), jac = jacobiator_norm(C);
    EXPECT_EQ(sq <= 1e-14, jac <= 1e-14) << "trial " << trial << " |Q^2| = " << sq << " jacobiator = " << jac;
  }
}

TEST(Automorphism, IdentityAndExpOfDerivation) {
  Rng rng(9);
  const AlgebraSpec s = AlgebraSpec::vect_pi(3);
  EXPECT_TRUE(is_automorphism(SuperElement::identity(s), 1e-15));
  const SuperElement v(s, random_element(rng, s, Parity::Even));
  EXPECT_LE(automorphism_defect(alg_exp(v)), 1e-12);
}

TEST(Automorphism, PerturbationRejected) {
  const AlgebraSpec s = AlgebraSpec::vect_pi(2);
  const SuperElement g(s, Matrix::Identity(4, 4) + 0.1 * unit(4, 0, 0));
  EXPECT_FALSE(is_automorphism(g, 1e-6));
  EXPECT_NEAR(automorphism_defect(g), 0.11, 1e-12);
}

TEST(Properties, SuperJacobi) {
  Rng rng(10);
  for (int trial = 0; trial < 60; ++trial) {
    const AlgebraSpec s = test::algebra_by_index(trial);
    const Parity pa = test::random_parity(rng), pb = test::random_parity(rng), pc = test::random_parity(rng);
    const SuperElement a = random_homogeneous(rng, s, pa), b = random_homogeneous(rng, s, pb),
                       c = random_homogeneous(rng, s, pc);
    const SuperElement lhs = supercommutator(a, supercommutator(b, c));
    const SuperElement rhs = supercommutator(supercommutator(a, b), c) + sign_of(pa, pb) * supercommutator(b, supercommutator(a, c));
    EXPECT_LE(max_norm(lhs.matrix() - rhs.matrix()), 1e-12) << s.name();
  }
}

TEST(Properties, GradedAntisymmetry) {
  Rng rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const AlgebraSpec s = test::algebra_by_index(trial);
    const Parity pa = test::random_parity(rng), pb = test::random_parity(rng);
    const SuperElement a = random_homogeneous(rng, s, pa), b = random_homogeneous(rng, s, pb);
    const SuperElement sum = supercommutator(a, b) + sign_of(pa, pb) * supercommutator(b, a);
    EXPECT_LE(sum.norm(), 1e-13);
  }
}

TEST(Properties, ProductParityAdds) {
  Rng rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    const AlgebraSpec s = test::algebra_by_index(trial);
    const Parity pa = test::random_parity(rng), pb = test::random_parity(rng);
    const SuperElement ab = random_homogeneous(rng, s, pa) * random_homogeneous(rng, s, pb);
    if (ab.norm() == 0.0) continue;
    ASSERT_TRUE(ab.parity().has_value());
    EXPECT_EQ(*ab.parity(), pa + pb);
  }
}

TEST(Properties, BracketOfDerivationsIsDerivation) {
  Rng rng(15);
  const AlgebraSpec s = AlgebraSpec::vect_pi(3);
  for (int trial = 0; trial < 10; ++trial) {
    const SuperElement a = random_homogeneous(rng, s, test::random_parity(rng));
    const SuperElement b = random_homogeneous(rng, s, test::random_parity(rng));
    EXPECT_LE(derivation_defect(supercommutator(a, b)), 1e-12);
  }
}
