#include <gtest/gtest.h>

#include <cmath>

#include "fermat/zetareg.hpp"

using namespace fermat;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST(Zeta, EulerMaclaurinKnownValues) {
    EXPECT_NEAR(zeta_euler_maclaurin(2.0), pi * pi / 6.0, 1e-13);
    EXPECT_NEAR(zeta_euler_maclaurin(4.0), std::pow(pi, 4) / 90.0, 1e-13);
    EXPECT_NEAR(zeta_euler_maclaurin(-1.0), -1.0 / 12.0, 1e-13);
    EXPECT_NEAR(zeta_euler_maclaurin(0.0), -0.5, 1e-14);
    EXPECT_NEAR(zeta_prime_at_zero_euler_maclaurin(), -0.5 * std::log(2 * pi), 1e-13);
}

TEST(Zeta, DeterminantOfDirichletLaplacian) {
    for (double T : {0.5, 1.0, 3.0, 10.0}) {
        EXPECT_NEAR(regularized_det({(pi / T) * (pi / T), 2.0}), 2.0 * T, 1e-13 * T);
        EXPECT_NEAR(fp_determinant(T), 2.0 * T, 1e-13 * T);
    }
}

TEST(Zeta, DeterminantFromSuppliedConstants) {
    // zeta_A(s) = a^-s zeta(x s): zeta_A'(0) = -log(a) zeta(0) + x zeta'(0)
    const PowerSpectrumOperator op{2.5, 3.0};
    const double z0 = -0.5, z1 = -0.5 * std::log(2 * pi);
    const double expect = std::exp(std::log(2.5) * z0 - 3.0 * z1);
    EXPECT_NEAR(regularized_det_from(op, z0, z1), expect, 1e-13 * expect);
    EXPECT_NEAR(regularized_det(op), expect, 1e-13 * expect);
}

TEST(Zeta, PartialProductMatchesDirectSum) {
    const PowerSpectrumOperator op{0.7, 2.0};
    double direct = 0.0;
    for (int n = 1; n <= 50; ++n) direct += std::log(0.7 * std::pow(n, 2.0));
    EXPECT_NEAR(log_partial_product(op, 50), direct, 1e-11);
}

TEST(Zeta, ConstantsWithinTolerance) {
    const ZetaConstants z = zeta_constants();
    EXPECT_NEAR(z.zeta0, -0.5, 1e-10);
    EXPECT_NEAR(z.zeta_prime0, -0.9189385332046727, 1e-10);
}
