#include <gtest/gtest.h>

#include <boost/math/special_functions/hankel.hpp>

#include <cmath>

#include "fermat/propagator.hpp"

using namespace fermat;

namespace {
constexpr double pi = 3.14159265358979323846;
const cdouble I(0.0, 1.0);
}  // namespace

TEST(Propagator, FreeKernelClosedForm) {
    const Vec3 x(0.3, -0.2, 0.5), x0(0.1, 0.1, 0.1);
    const double S = 0.7;
    for (int d = 1; d <= 3; ++d) {
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) r2 += (x[a] - x0[a]) * (x[a] - x0[a]);
        const cdouble expect = std::exp(I * r2 / (4 * S)) / std::pow(std::sqrt(4 * pi * I * S), d);
        EXPECT_LT(std::abs(free_kernel(x, x0, S, d) - expect), 1e-14);
    }
    EXPECT_THROW(free_kernel(x, x0, 0.0, 2), UsageError);
}

TEST(Propagator, ProperTimeGreenFunctionInTwoDimensions) {
    // outgoing 2D Green function of (lap + k^2): -(i/4) H0^(1)(k r)
    const IndexField f = IndexField::homogeneous(2, 1.2);
    const double omega = 2.5, k = 1.2 * omega;
    for (double r : {0.2, 1.0, 4.0}) {
        const cdouble expect = -0.25 * I * boost::math::cyl_hankel_1(0, k * r);
        const cdouble got = proper_time_integral(f, Vec3(r * 0.6, r * 0.8, 0), Vec3::Zero(), omega).extrapolated;
        EXPECT_LT(std::abs(got - expect) / std::abs(expect), 1e-8) << "r = " << r;
    }
}

TEST(Propagator, ProperTimeRichardsonReducesDampingError) {
    const IndexField f = IndexField::homogeneous(1, 1.0);
    ProperTimeOptions o;
    o.eps = 1e-3;
    const double k = 3.0;
    const ProperTimeResult r = proper_time_integral(f, Vec3(2.0, 0, 0), Vec3::Zero(), k, o);
    const cdouble exact = std::exp(I * k * 2.0) / (2.0 * I * k);
    EXPECT_LT(std::abs(r.extrapolated - exact), std::abs(r.value - exact));
    EXPECT_LT(std::abs(r.value_half - exact), std::abs(r.value - exact));
}

TEST(Propagator, ProperTimeAtSourceDivergesAboveOneDimension) {
    EXPECT_THROW(proper_time_integral(IndexField::homogeneous(3, 1.0), Vec3::Zero(), Vec3::Zero(), 1.0),
                 SingularityError);
    const cdouble g1 = proper_time_integral(IndexField::homogeneous(1, 1.0), Vec3::Zero(), Vec3::Zero(), 2.0).extrapolated;
    EXPECT_LT(std::abs(g1 - 1.0 / (4.0 * I)), 1e-9);
}

TEST(Propagator, ConstantPotentialOnlyAddsAPhase) {
    const GridSpec g = GridSpec::centered(1, 64, 0.05);
    const double S = 0.2, omega = 2.0;
    const ComplexGrid vac = sliced_kernel(IndexField::homogeneous(1, 1.0), Vec3::Zero(), omega, S, 16, g);
    const ComplexGrid med = sliced_kernel(IndexField::homogeneous(1, 1.3), Vec3::Zero(), omega, S, 16, g);
    const double V = (1 - 1.69) * omega * omega;
    for (size_t i = 0; i < g.size(); ++i) EXPECT_LT(std::abs(med.values[i] - vac.values[i] * std::exp(-I * V * S)), 1e-12);
}

TEST(Propagator, SlicedKernelIndependentOfSliceCountInVacuum) {
    const GridSpec g = GridSpec::centered(1, 64, 0.05);
    const IndexField f = IndexField::homogeneous(1, 1.0);
    const ComplexGrid a = sliced_kernel(f, Vec3::Zero(), 1.0, 0.1, 4, g);
    const ComplexGrid b = sliced_kernel(f, Vec3::Zero(), 1.0, 0.1, 32, g);
    for (size_t i = 0; i < g.size(); ++i) EXPECT_LT(std::abs(a.values[i] - b.values[i]), 1e-10);
}

TEST(Propagator, SlicedKernelIsMirrorSymmetricInEvenMedium) {
    const GridSpec g = GridSpec::centered(1, 49, 0.05);
    const IndexField f = IndexField::parabolic_grin(1, 1.0, 0.4, -1);
    const ComplexGrid psi = sliced_kernel(f, Vec3::Zero(), 2.0, 0.05, 40, g);
    const size_t src = static_cast<size_t>(psi.source_index);
    ASSERT_EQ(g.node(src).norm(), 0.0);
    for (size_t o = 1; o <= 24; ++o) EXPECT_LT(std::abs(psi.values[src + o] - psi.values[src - o]), 1e-12);
}

TEST(Propagator, SlicePhaseBoundIsEnforced) {
    const GridSpec g = GridSpec::centered(1, 32, 0.05);
    const IndexField f = IndexField::parabolic_grin(1, 1.0, 0.4, -1);
    SliceOptions o;
    o.max_phase = 1e-6;
    EXPECT_THROW(sliced_kernel(f, Vec3::Zero(), 2.0, 0.5, 4, g, o), AccuracyError);
}

TEST(Propagator, SchrodingerResidualNeedsEqualSpacing) {
    const GridSpec g = GridSpec::centered(1, 16, 0.1);
    const IndexField f = IndexField::homogeneous(1, 1.0);
    const ComplexGrid a = sliced_kernel(f, Vec3::Zero(), 1.0, 0.1, 2, g);
    const ComplexGrid b = sliced_kernel(f, Vec3::Zero(), 1.0, 0.2, 2, g);
    const ComplexGrid c = sliced_kernel(f, Vec3::Zero(), 1.0, 0.4, 2, g);
    EXPECT_THROW(schrodinger_residual(f, a, b, c, 1.0), UsageError);
}

TEST(Propagator, GridStationaryKernelMatchesOneDimensionalGreenFunction) {
    const IndexField f = IndexField::homogeneous(1, 1.0);
    const double k = 6.0;
    const GridSpec g = GridSpec::centered(1, 801, 0.01);
    StationaryOptions o;
    o.absorber = {2.0, 1.0};
    const SpectralKernel sk = stationary_kernel(f, Vec3::Zero(), k, g, o);
    ASSERT_TRUE(sk.grid_evolution);
    double err = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
        const double x = g.node(i)[0];
        // the band-limited source smooths the cusp within a few 1/(4k) of x0
        if (std::abs(x) < 0.3 || std::abs(x) > 1.5) continue;
        const cdouble exact = std::exp(I * k * std::abs(x)) / (2.0 * I * k);
        err = std::max(err, std::abs(sk.psi.values[i] - exact) / std::abs(exact));
    }
    EXPECT_LT(err, 1e-2);
}

TEST(Propagator, StationaryKernelFlagsSourceNode) {
    const IndexField f = IndexField::homogeneous(3, 1.0);
    const GridSpec g = GridSpec::centered(3, 5, 0.5);
    const SpectralKernel sk = stationary_kernel(f, Vec3::Zero(), 2.0, g);
    ASSERT_GE(sk.psi.source_index, 0);
    const size_t src = static_cast<size_t>(sk.psi.source_index);
    EXPECT_EQ(g.node(src).norm(), 0.0);
    const cdouble neighbour = -std::exp(I * 1.0) / (4 * pi * 0.5);
    EXPECT_LT(std::abs(sk.psi.values[src] - neighbour), 1e-8);
}

TEST(Propagator, InhomogeneousStationaryNeedsAbsorber) {
    const IndexField f = IndexField::parabolic_grin(2, 1.2, 0.3, 0);
    EXPECT_THROW(stationary_kernel(f, Vec3::Zero(), 2.0, GridSpec::centered(2, 16, 0.1)), UsageError);
}
