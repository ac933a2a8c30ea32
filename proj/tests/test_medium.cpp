#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "fermat/medium.hpp"

using namespace fermat;

namespace {

Vec3 central_gradient(const IndexField& f, const Vec3& x, double h = 1e-5) {
    Vec3 g = Vec3::Zero();
    for (int a = 0; a < f.dim(); ++a) {
        Vec3 p = x, m = x;
        p[a] += h;
        m[a] -= h;
        g[a] = (f.index(p) - f.index(m)) / (2 * h);
    }
    return g;
}

}  // namespace

TEST(Medium, HomogeneousIsConstant) {
    const IndexField f = IndexField::homogeneous(3, 1.33);
    EXPECT_DOUBLE_EQ(f.index(Vec3(0.1, -2.0, 4.0)), 1.33);
    EXPECT_EQ(f.grad(Vec3(1, 2, 3)).norm(), 0.0);
    ASSERT_TRUE(f.constant_index());
    EXPECT_DOUBLE_EQ(*f.constant_index(), 1.33);
}

TEST(Medium, ClosedFormProfiles) {
    const IndexField strat = IndexField::linear_stratified(2, 1.2, 0.1, 1);
    EXPECT_NEAR(strat.index(Vec3(3.0, 0.5, 0.0)), 1.25, 1e-15);

    const IndexField grin = IndexField::parabolic_grin(2, 1.5, 0.3, 0);
    const double y = 0.7;
    EXPECT_NEAR(grin.index(Vec3(5.0, y, 0.0)), 1.5 * std::sqrt(1 - 0.09 * y * y), 1e-15);

    const IndexField iface = IndexField::smooth_interface(2, 1.0, 2.0, 0.25, 0, 0.5);
    EXPECT_NEAR(iface.index(Vec3(0.5, 3.0, 0.0)), 1.5, 1e-15);
    EXPECT_NEAR(iface.index(Vec3(1.0, 0.0, 0.0)), 1.5 + 0.5 * std::tanh(2.0), 1e-15);
}

TEST(Medium, GradientMatchesFiniteDifferences) {
    const Vec3 x(0.3, -0.4, 0.2);
    for (const IndexField& f : {IndexField::linear_stratified(3, 1.2, 0.1, 2), IndexField::parabolic_grin(3, 1.5, 0.3, 0),
                                IndexField::smooth_interface(3, 1.0, 1.4, 0.3, 1)}) {
        EXPECT_LT((f.grad(x) - central_gradient(f, x)).norm(), 1e-8) << to_string(f.kind());
    }
}

TEST(Medium, OutsideBoxIsDomainError) {
    Box box;
    box.lo = Vec3::Constant(-1);
    box.hi = Vec3::Constant(1);
    const IndexField f = IndexField::homogeneous(2, 1.0, box);
    EXPECT_THROW(f.index(Vec3(1.5, 0, 0)), DomainError);
    EXPECT_NO_THROW(f.index(Vec3(0.5, 0.5, 99.0)));  // third component ignored in 2D
}

TEST(Medium, NonPositiveGrinIndexIsDomainError) {
    const IndexField f = IndexField::parabolic_grin(2, 1.0, 1.0, 0);
    EXPECT_THROW(f.index(Vec3(0.0, 1.5, 0.0)), DomainError);
}

TEST(Medium, UserGridReproducesNodesAndRoundTrips) {
    GridData g;
    g.dim = 2;
    g.dims = {5, 7};
    g.spacing = 0.25;
    g.origin = Vec3(-0.5, -0.75, 0.0);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 7; ++j) g.values.push_back(1.0 + 0.1 * i + 0.01 * j * j);
    const auto path = std::filesystem::temp_directory_path() / "fermat_medium_test.grid";
    write_grid_file(path.string(), g);
    const GridData back = read_grid_file(path.string());
    std::filesystem::remove(path);
    ASSERT_EQ(back.values, g.values);
    EXPECT_EQ(back.dims, g.dims);

    for (bool cubic : {false, true}) {
        const IndexField f = IndexField::user_grid(back, cubic);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 7; ++j) {
                const Vec3 x = g.origin + Vec3(i * 0.25, j * 0.25, 0.0);
                EXPECT_EQ(f.index(x), g.values[i * 7 + j]);
            }
    }
    // bilinear on a linear-in-x table is exact between nodes
    const IndexField lin = IndexField::user_grid(back, false);
    EXPECT_NEAR(lin.index(Vec3(-0.5 + 0.125, -0.75, 0.0)), 1.05, 1e-14);
}

TEST(Medium, DispersionFactorIsOneAtReference) {
    Dispersion d({1.0, 2.0, 3.0, 4.0, 5.0}, {1.40, 1.45, 1.47, 1.48, 1.485}, 3.0);
    EXPECT_NEAR(d.factor(3.0), 1.0, 1e-15);
    EXPECT_NEAR(d.factor(2.0), 1.45 / 1.47, 1e-15);
    // monotone interpolation stays within neighbouring table values
    const double f = d.factor(2.5) * 1.47;
    EXPECT_GT(f, 1.45);
    EXPECT_LT(f, 1.47);
    EXPECT_THROW(d.factor(6.0), DomainError);

    const IndexField disp = IndexField::homogeneous(1, 1.2).with_dispersion(d);
    EXPECT_THROW(disp.index(Vec3::Zero()), UsageError);
    EXPECT_NEAR(disp.index(Vec3::Zero(), 2.0), 1.2 * 1.45 / 1.47, 1e-14);
}

TEST(Medium, ScaledMultipliesIndex) {
    const IndexField f = IndexField::linear_stratified(2, 1.2, 0.1, 1).scaled(2.0);
    EXPECT_NEAR(f.index(Vec3(0, 1, 0)), 2.6, 1e-15);
    EXPECT_NEAR(f.grad(Vec3(0, 1, 0))[1], 0.2, 1e-15);
}

TEST(Medium, PotentialDefinition) {
    const IndexField f = IndexField::homogeneous(2, 1.5);
    // V = (1 - n^2) omega^2 / c^2
    EXPECT_NEAR(f.potential(Vec3::Zero(), 2.0, 1.0), (1 - 2.25) * 4.0, 1e-14);
}
