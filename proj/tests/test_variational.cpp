#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "fermat/raytrace.hpp"
#include "fermat/variational.hpp"

using namespace fermat;

namespace {

PathPolyline straight(const Vec3& a, const Vec3& b, int M) {
    PathPolyline p;
    for (int j = 0; j < M; ++j) p.vertices.push_back(a + (b - a) * (double(j) / (M - 1)));
    return p;
}

}  // namespace

TEST(Variational, PathTimeOfStraightLineInStratifiedMedium) {
    // int (n0 + g y) ds along a straight segment is exact under the midpoint rule
    const IndexField f = IndexField::linear_stratified(2, 1.2, 0.1, 1);
    const Vec3 a(0, 0, 0), b(3, 4, 0);
    EXPECT_NEAR(path_time(f, straight(a, b, 11)), 5.0 * (1.2 + 0.1 * 2.0), 1e-13);
}

TEST(Variational, GradientMatchesFiniteDifferences) {
    const IndexField f = IndexField::parabolic_grin(2, 1.5, 0.3, 0);
    PathPolyline p = straight(Vec3(-1, 0.2, 0), Vec3(1, 0.6, 0), 9);
    for (size_t j = 1; j + 1 < p.vertices.size(); ++j) p.vertices[j][1] += 0.05 * std::sin(double(j));
    const std::vector<Vec3> g = path_time_gradient(f, p);
    const double h = 1e-6;
    for (size_t j = 0; j < p.vertices.size(); ++j)
        for (int a = 0; a < 2; ++a) {
            PathPolyline pp = p, pm = p;
            pp.vertices[j][a] += h;
            pm.vertices[j][a] -= h;
            EXPECT_NEAR(g[j][a], (path_time(f, pp) - path_time(f, pm)) / (2 * h), 1e-8);
        }
}

TEST(Variational, HomogeneousMinimumIsTheChord) {
    const IndexField f = IndexField::homogeneous(2, 1.3);
    const Vec3 a(-1, 0, 0), b(1, 1, 0);
    MinimizeOptions o;
    o.init = straight(a, b, 21);
    for (size_t j = 1; j + 1 < 20; ++j) o.init->vertices[j][1] += 0.1 * std::sin(0.3 * j);
    const PathPolyline p = minimize_path(f, a, b, 21, o);
    EXPECT_NEAR(path_time(f, p), 1.3 * (b - a).norm(), 1e-12);
}

TEST(Variational, MinimumDecreasesMonotonically) {
    const IndexField f = IndexField::linear_stratified(2, 1.2, 0.3, 1);
    MinimizeReport rep;
    minimize_path(f, Vec3(-1, 0, 0), Vec3(1, 0, 0), 51, {}, &rep);
    ASSERT_GE(rep.history.size(), 2u);
    for (size_t i = 1; i < rep.history.size(); ++i) EXPECT_LE(rep.history[i], rep.history[i - 1] + 1e-15);
    EXPECT_LT(rep.history.back(), f.index(Vec3::Zero()) * 2.0);
}

TEST(Variational, AgreesWithShootingInGrin) {
    const IndexField f = IndexField::parabolic_grin(2, 1.5, 0.4, 0);
    const Vec3 a(-1, 0.3, 0), b(1, -0.2, 0);
    const PathPolyline p = minimize_path(f, a, b, 101);
    const GeodesicSolution ray = connect(f, a, b, (b - a).norm() / 100);
    EXPECT_NEAR(path_time(f, p), optical_time(ray), 1e-8);
}

TEST(Variational, RejectsTooFewVertices) {
    const IndexField f = IndexField::homogeneous(2, 1.0);
    EXPECT_THROW(minimize_path(f, Vec3::Zero(), Vec3::UnitX(), 2), UsageError);
}

TEST(Variational, IterationCapRaisesWithLastIterate) {
    const IndexField f = IndexField::linear_stratified(2, 1.2, 0.5, 1);
    MinimizeOptions o;
    o.max_iter = 1;
    try {
        minimize_path(f, Vec3(-1, 0, 0), Vec3(1, 0, 0), 41, o);
        FAIL() << "expected MinimizeError";
    } catch (const MinimizeError& e) {
        EXPECT_EQ(e.last_iterate().vertices.size(), 41u);
        EXPECT_GT(e.gradient_norm(), 0.0);
    }
}

TEST(Variational, PolylineCsvRoundTrip) {
    const PathPolyline p = straight(Vec3(0.125, -1, 0), Vec3(2, 3.5, 0), 7);
    const auto path = std::filesystem::temp_directory_path() / "fermat_polyline_test.csv";
    write_polyline_csv(path.string(), p, 2);
    const PathPolyline back = read_polyline_csv(path.string());
    std::filesystem::remove(path);
    ASSERT_EQ(back.vertices.size(), p.vertices.size());
    for (size_t j = 0; j < p.vertices.size(); ++j) EXPECT_EQ((back.vertices[j] - p.vertices[j]).norm(), 0.0);
}
