#include <gtest/gtest.h>

#include <cmath>

#include "fermat/helmholtz.hpp"

using namespace fermat;

namespace {
const cdouble I(0.0, 1.0);

ComplexGrid sampled_green(const GridSpec& g, double k) {
    ComplexGrid c(g);
    for (size_t i = 0; i < g.size(); ++i) {
        const double r = std::abs(g.node(i)[0]);
        c.values[i] = std::exp(I * k * r) / (2.0 * I * k);
    }
    return c;
}
}  // namespace

TEST(Helmholtz, AnalyticGreenDimensions) {
    EXPECT_THROW(analytic_green(Vec3(1, 0, 0), Vec3::Zero(), 1.0, 2), UnsupportedError);
    EXPECT_THROW(analytic_green(Vec3::Zero(), Vec3::Zero(), 1.0, 3), SingularityError);
    const cdouble g3 = analytic_green(Vec3(0, 3, 4), Vec3::Zero(), 2.0, 3);
    EXPECT_LT(std::abs(g3 + std::exp(I * 10.0) / (4 * M_PI * 5.0)), 1e-15);
}

TEST(Helmholtz, ResidualOfExactGreenFunctionIsSecondOrder) {
    const IndexField f = IndexField::homogeneous(1, 1.0);
    const double k = 5.0;
    std::vector<double> res;
    for (int n : {201, 401}) {
        const GridSpec g = GridSpec::centered(1, n, 2.0 / (n - 1));
        HelmholtzProblem p{f, k, g, Vec3::Zero(), Absorber{}, 1.0, 0.1};
        const ResidualReport r = fd_residual(p, sampled_green(g, k));
        res.push_back(r.max);
        // a sampled cusp carries the discrete delta: h sum (stencil + k^2) G over the source ball is 1
        EXPECT_LT(std::abs(r.delta_check - 1.0), 1e-2);
    }
    EXPECT_NEAR(std::log2(res[0] / res[1]), 2.0, 0.1);
}

TEST(Helmholtz, DirectSolveMatchesGreenFunctionInOneDimension) {
    const IndexField f = IndexField::homogeneous(1, 1.0);
    const double k = 6.0;
    const GridSpec g = GridSpec::centered(1, 801, 0.01);
    HelmholtzProblem p{f, k, g, Vec3::Zero(), Absorber{2.0, 1.0}, 1.0, 0.0};
    const SpectralKernel s = solve_helmholtz(p);
    double err = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
        const double x = g.node(i)[0];
        if (std::abs(x) > 1.5) continue;
        const cdouble exact = std::exp(I * k * std::abs(x)) / (2.0 * I * k);
        err = std::max(err, std::abs(s.psi.values[i] - exact) / std::abs(exact));
    }
    EXPECT_LT(err, 1e-2);
    const ResidualReport r = fd_residual(p, s.psi);
    EXPECT_LT(r.max, 1e-8);
    EXPECT_LT(std::abs(r.delta_check - 1.0), 1e-8);
}

TEST(Helmholtz, UnderResolvedGridIsRejected) {
    const IndexField f = IndexField::homogeneous(2, 1.0);
    HelmholtzProblem p{f, 40.0, GridSpec::centered(2, 21, 0.1), Vec3::Zero(), Absorber{0.5, 1.0}, 1.0, 0.0};
    EXPECT_THROW(solve_helmholtz(p), UsageError);
}
