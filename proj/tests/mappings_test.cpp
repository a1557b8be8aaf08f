#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "stablab/mappings.hpp"

namespace stablab {
namespace {

PerturbationSpec constant(double theta, Element dir) {
    return PerturbationSpec{theta, 0.0, std::move(dir), PerturbationMode::Constant,
                            DirectionField::Fixed};
}

PerturbationSpec power(double theta, double p, Element dir,
                       DirectionField field = DirectionField::Fixed) {
    return PerturbationSpec{theta, p, std::move(dir), PerturbationMode::PowerNorm, field};
}

TEST(MapSpec, EvaluateExamples) {
    const Element x = random_element(1, 3, 4.0);
    EXPECT_EQ(MapSpec::identity(3).evaluate(x), x);

    const Element nil{{0.0, 1.0}, {0.0, 0.0}};
    EXPECT_EQ(MapSpec::transpose(2).evaluate(nil), (Element{{0.0, 0.0}, {1.0, 0.0}}));

    // I / |I| = I in the operator norm.
    const auto f = MapSpec::perturbed(MapSpec::identity(3), constant(0.5, Element::identity(3)));
    EXPECT_EQ(f.evaluate(x), add(x, scale(0.5, Element::identity(3))));
    EXPECT_TRUE(f.evaluate(Element::zero(3)).is_zero());
}

TEST(MapSpec, RejectsInvalidConstruction) {
    EXPECT_THROW(MapSpec::unitary_conjugation(Element{{1.0, 1.0}, {0.0, 1.0}}),
                 std::invalid_argument);
    const auto base = MapSpec::identity(3);
    EXPECT_THROW(MapSpec::perturbed(base, constant(0.1, Element::identity(2))), DimensionMismatch);
    EXPECT_THROW(MapSpec::perturbed(base, constant(-0.1, Element::identity(3))),
                 std::invalid_argument);
    EXPECT_THROW(MapSpec::perturbed(base, constant(0.1, scale(2.0, Element::identity(3)))),
                 std::invalid_argument);
    const auto once = MapSpec::perturbed(base, constant(0.1, Element::identity(3)));
    EXPECT_THROW(MapSpec::perturbed(once, constant(0.1, Element::identity(3))),
                 std::invalid_argument);
    EXPECT_THROW((void)base.evaluate(Element::identity(2)), DimensionMismatch);
}

TEST(MapSpec, UnitaryConjugationMatchesAlgebra) {
    const Element u = random_unitary(3, 3);
    const auto f = MapSpec::unitary_conjugation(u);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Element a = random_element(seed, 3, 5.0);
        const Element expected = oracle::naive_mul(oracle::naive_mul(u, a), involution(u));
        EXPECT_LE(oracle::max_abs_diff(f.evaluate(a), expected), 1e-13);
    }
}

TEST(MapSpec, ExactKindsAreAdditiveAndHomogeneous) {
    const MuGrid grid;
    for (std::size_t dim : {2u, 3u, 4u}) {
        for (const auto& f : {MapSpec::identity(dim), MapSpec::transpose(dim),
                              MapSpec::unitary_conjugation(random_unitary(dim + 1, dim)),
                              MapSpec::negation(dim), MapSpec::zero(dim)}) {
            for (std::uint64_t seed = 0; seed < 30; ++seed) {
                const Element a = random_element(seed, dim, 10.0);
                const Element b = random_element(seed + 500, dim, 10.0);
                const double scale_ab = 1.0 + std::max(op_norm(a), op_norm(b));
                EXPECT_LE(op_norm(f.evaluate(a + b) - f.evaluate(a) - f.evaluate(b)),
                          1e-10 * scale_ab);
                for (const auto& mu : grid.values()) {
                    EXPECT_LE(op_norm(f.evaluate(stablab::scale(mu.value(), a)) -
                                      stablab::scale(mu.value(), f.evaluate(a))),
                              1e-10 * scale_ab);
                }
            }
        }
    }
}

TEST(MapSpec, PowerNormDefectHasPrescribedSize) {
    for (double p : {0.5, 1.0, 2.0, 3.0}) {
        const auto f =
            MapSpec::perturbed(MapSpec::transpose(3), power(0.2, p, Element::identity(3)));
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            const Element a = random_element(seed, 3, 4.0);
            const double expected = 0.2 * std::pow(oracle::spectral_norm_jacobi(a), p);
            const double got = op_norm(f.evaluate(a) - f.base().evaluate(a));
            EXPECT_NEAR(got, expected, 1e-10 * expected) << "p=" << p << " seed " << seed;
        }
    }
}

TEST(MapSpec, TracePhaseFieldIsOdd) {
    const auto f = MapSpec::perturbed(MapSpec::identity(3),
                                      power(1e-2, 2.0, Element::identity(3),
                                            DirectionField::TracePhase));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Element a = random_element(seed, 3, 3.0);
        EXPECT_LE(op_norm(f.evaluate(neg(a)) + f.evaluate(a)), 1e-14);
    }
    // Traceless argument: the field vanishes.
    const Element nil = Element::unit(3, 0, 1);
    EXPECT_EQ(f.evaluate(nil), nil);
}

TEST(MuGrid, LeadsWithCardinalPointsAndKeepsOneUnique) {
    const MuGrid grid(8);
    ASSERT_EQ(grid.values().size(), 12u);
    EXPECT_EQ(grid.values()[0].value(), Complex(1.0, 0.0));
    EXPECT_EQ(grid.values()[1].value(), Complex(-1.0, 0.0));
    EXPECT_EQ(grid.values()[2].value(), Complex(0.0, 1.0));
    EXPECT_EQ(grid.values()[3].value(), Complex(0.0, -1.0));
    int ones = 0;
    for (const auto& mu : grid.values()) {
        ones += mu.is_one() ? 1 : 0;
    }
    EXPECT_EQ(ones, 1);
}

TEST(IsExactJordanStar, TransposeAndUnitaryAreExact) {
    for (std::size_t dim : {2u, 3u, 4u}) {
        const auto t = is_exact_jordan_star(MapSpec::transpose(dim), 50, 3, 1e-10);
        EXPECT_TRUE(t.exact) << "dim " << dim;
        const auto u = is_exact_jordan_star(
            MapSpec::unitary_conjugation(random_unitary(11, dim)), 50, 4, 1e-10);
        EXPECT_TRUE(u.exact) << "dim " << dim;
    }
}

TEST(IsExactJordanStar, NegationIsNotJordan) {
    const auto v = is_exact_jordan_star(MapSpec::negation(3), 10, 5, 1e-9);
    EXPECT_FALSE(v.exact);
    ASSERT_TRUE(v.witness);
    EXPECT_EQ(v.witness->property, "jordan");
}

TEST(IsExactJordanStar, ConstantPerturbationIsRejectedAtThetaScale) {
    const auto f = MapSpec::perturbed(MapSpec::identity(3), constant(0.1, Element::identity(3)));
    const auto v = is_exact_jordan_star(f, 20, 6, 1e-9, 1.0);
    EXPECT_FALSE(v.exact);
    ASSERT_TRUE(v.witness);
    // Additivity fails by exactly theta |I|: f(a+b) - f(a) - f(b) = -0.1 I.
    EXPECT_NEAR(v.max_additive, 0.1, 1e-12);
    EXPECT_GT(v.witness->residual, 0.05);
}

TEST(Transpose, IsJordanButNotMultiplicative) {
    for (std::size_t dim : {2u, 3u, 4u}) {
        const auto f = MapSpec::transpose(dim);
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Element a = random_element(seed, dim, 5.0);
            const Element b = random_element(seed + 77, dim, 5.0);
            worst = std::max(worst, op_norm(f.evaluate(a * b) - f.evaluate(a) * f.evaluate(b)));
            // Entrywise: (a^2)^T = (a^T)^2 and (a*)^T = (a^T)*.
            EXPECT_LE(oracle::max_abs_diff(f.evaluate(a * a),
                                           oracle::naive_mul(f.evaluate(a), f.evaluate(a))),
                      1e-12);
            EXPECT_EQ(f.evaluate(involution(a)), involution(f.evaluate(a)));
        }
        EXPECT_GT(worst, 0.1) << "dim " << dim;
    }
}

}  // namespace
}  // namespace stablab
