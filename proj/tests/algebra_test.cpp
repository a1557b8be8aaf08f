#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "stablab/algebra.hpp"

namespace stablab {
namespace {

const Complex I{0.0, 1.0};

TEST(Element, RejectsMalformedInput) {
    EXPECT_THROW(Element(2, std::vector<Complex>(3)), std::invalid_argument);
    EXPECT_THROW(Element(1, {Complex(std::nan(""), 0.0)}), std::invalid_argument);
    EXPECT_THROW((Element{{1.0, 2.0}, {3.0}}), std::invalid_argument);
}

TEST(Element, AddIdentityAndZero) {
    EXPECT_EQ(add(Element::identity(2), Element::zero(2)), Element::identity(2));
    EXPECT_EQ(add(Element{{1.0, 0.0}, {0.0, 0.0}}, Element{{0.0, 0.0}, {0.0, 1.0}}),
              Element::identity(2));
}

TEST(Element, AddNegationCancels) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Element x = random_element(seed, 3, 5.0);
        EXPECT_TRUE(add(x, neg(x)).is_zero());
    }
}

TEST(Element, DimensionMismatchIsRejected) {
    EXPECT_THROW(add(Element::identity(2), Element::identity(3)), DimensionMismatch);
    EXPECT_THROW(mul(Element::identity(2), Element::identity(3)), DimensionMismatch);
}

TEST(Element, MulMatchesTripleLoop) {
    EXPECT_EQ(mul(Element::identity(2), Element{{1.0, 2.0}, {3.0, 4.0}}),
              (Element{{1.0, 2.0}, {3.0, 4.0}}));
    const Element nil{{0.0, 1.0}, {0.0, 0.0}};
    EXPECT_TRUE(mul(nil, nil).is_zero());

    const Element x = random_element(11, 3, 4.0);
    const Element y = random_element(12, 3, 4.0);
    EXPECT_LE(oracle::max_abs_diff(mul(x, y), oracle::naive_mul(x, y)), 1e-14);
}

TEST(Element, Involution) {
    EXPECT_EQ(involution(Element::identity(2)), Element::identity(2));
    EXPECT_EQ(involution(Element{{0.0, I}, {0.0, 0.0}}), (Element{{0.0, 0.0}, {-I, 0.0}}));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Element x = random_element(seed, 3, 3.0);
        const Element y = random_element(seed + 100, 3, 3.0);
        EXPECT_EQ(involution(involution(x)), x);
        EXPECT_LE(oracle::max_abs_diff(involution(mul(x, y)), mul(involution(y), involution(x))),
                  1e-14);
    }
}

TEST(Element, Scale) {
    const Element x = random_element(3, 3, 2.0);
    EXPECT_EQ(scale(1.0, x), x);
    EXPECT_TRUE(scale(0.0, x).is_zero());
    EXPECT_EQ(scale(I, scale(I, x)), neg(x));
}

TEST(UnitScalar, ModulusInvariant) {
    EXPECT_NO_THROW(UnitScalar(Complex(0.6, 0.8)));
    EXPECT_THROW(UnitScalar(Complex(0.6, 0.81)), std::invalid_argument);
    EXPECT_TRUE(UnitScalar(Complex(1.0, 0.0)).is_one());
    EXPECT_FALSE(UnitScalar::from_phase(0.3).is_one());
}

TEST(AlgebraSpec, Validation) {
    EXPECT_NO_THROW((AlgebraSpec{3, 1e-12}.validate()));
    EXPECT_THROW((AlgebraSpec{0, 1e-12}.validate()), std::invalid_argument);
    EXPECT_THROW((AlgebraSpec{3, 1e-2}.validate()), std::invalid_argument);
    EXPECT_THROW((AlgebraSpec{3, 0.0}.validate()), std::invalid_argument);
}

TEST(OpNorm, Examples) {
    EXPECT_NEAR(op_norm(Element::identity(3)), 1.0, 1e-12);
    // Characteristic polynomial of x*x = diag(0, 4) gives singular values {0, 2}.
    const Element nil{{0.0, 2.0}, {0.0, 0.0}};
    EXPECT_NEAR(op_norm(nil), oracle::spectral_norm_2x2(nil), 1e-12);
    EXPECT_NEAR(op_norm(nil), 2.0, 1e-12);
    const std::vector<Complex> d{3.0, -1.0};
    EXPECT_NEAR(op_norm(Element::diagonal(d)), 3.0, 1e-12);
    EXPECT_EQ(op_norm(Element::zero(4)), 0.0);
}

TEST(OpNorm, AgreesWithIndependentOracles) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Element x2 = random_element(seed, 2, 7.0);
        EXPECT_NEAR(op_norm(x2), oracle::spectral_norm_2x2(x2), 1e-10 * (1.0 + op_norm(x2)));
        for (std::size_t dim : {3u, 4u}) {
            const Element x = random_element(seed * 7 + dim, dim, 7.0);
            const double ref = oracle::spectral_norm_jacobi(x);
            EXPECT_NEAR(op_norm(x), ref, 1e-10 * (1.0 + ref)) << "seed " << seed << " dim " << dim;
        }
    }
}

TEST(OpNorm, DegenerateTopSingularSpace) {
    // Unitary: every singular value is 1.
    EXPECT_NEAR(op_norm(random_unitary(5, 4)), 1.0, 1e-12);
    const std::vector<Complex> d{2.0, Complex(0.0, -2.0), 1.0};
    EXPECT_NEAR(op_norm(Element::diagonal(d)), 2.0, 1e-12);
}

TEST(RandomElement, DeterministicAndCapped) {
    EXPECT_EQ(random_element(42, 3, 2.5), random_element(42, 3, 2.5));
    EXPECT_NE(random_element(42, 3, 2.5), random_element(43, 3, 2.5));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        EXPECT_LE(op_norm(random_element(seed, 4, 1.0)), 1.0);
    }
    EXPECT_TRUE(random_element(9, 2, 0.0).is_zero());
}

TEST(RandomUnitary, IsUnitary) {
    for (std::size_t dim : {1u, 2u, 3u, 4u}) {
        const Element u = random_unitary(dim, dim);
        EXPECT_LE(op_norm(mul(involution(u), u) - Element::identity(dim)), 1e-12);
    }
}

// C*-algebra axioms on seeded samples.
class CStarProperties : public ::testing::TestWithParam<std::size_t> {};

TEST_P(CStarProperties, HoldOnSamples) {
    const std::size_t dim = GetParam();
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Element x = random_element(seed, dim, 10.0);
        const Element y = random_element(seed + 1'000, dim, 10.0);
        const double nx = op_norm(x);
        const double ny = op_norm(y);
        const double scale = 1.0 + std::max(nx, ny);
        EXPECT_LE(std::abs(op_norm(mul(involution(x), x)) - nx * nx), 1e-8 * (1.0 + nx * nx));
        EXPECT_LE(op_norm(mul(x, y)), nx * ny + 1e-8 * scale * scale);
        EXPECT_LE(std::abs(op_norm(involution(x)) - nx), 1e-9 * (1.0 + nx));
        EXPECT_LE(op_norm(add(x, y)), nx + ny + 1e-9 * scale);
    }
}

INSTANTIATE_TEST_SUITE_P(Dims, CStarProperties, ::testing::Values(2, 3, 4));

TEST(LeadingBlock, ZeroesLastRowAndColumn) {
    const Element x = leading_block(random_element(1, 3, 1.0));
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(x(2, k), Complex{});
        EXPECT_EQ(x(k, 2), Complex{});
    }
    EXPECT_NE(x(0, 0), Complex{});
}

}  // namespace
}  // namespace stablab
