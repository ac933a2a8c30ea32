#include <benchmark/benchmark.h>

#include "fermat/helmholtz.hpp"
#include "fermat/propagator.hpp"
#include "fermat/raytrace.hpp"
#include "fermat/variational.hpp"

using namespace fermat;

namespace {

IndexField grin2d() {
    Box box;
    box.lo = Vec3::Constant(-2.0);
    box.hi = Vec3::Constant(2.0);
    return IndexField::parabolic_grin(2, 1.2, 0.3, 0, box);
}

}  // namespace

static void BM_TraceRay(benchmark::State& state) {
    const IndexField f = grin2d();
    RayState init;
    init.x = Vec3(-1.0, 0.3, 0.0);
    init.t = Vec3(0.9, 0.2, 0.0).normalized();
    for (auto _ : state) benchmark::DoNotOptimize(trace_ray(f, init, 2.0, 1e-3));
}
BENCHMARK(BM_TraceRay)->Unit(benchmark::kMillisecond);

static void BM_Connect(benchmark::State& state) {
    const IndexField f = grin2d();
    for (auto _ : state) benchmark::DoNotOptimize(connect(f, Vec3(-1.0, 0.2, 0), Vec3(1.2, 0.7, 0), 1e-2));
}
BENCHMARK(BM_Connect)->Unit(benchmark::kMillisecond);

static void BM_MinimizePath(benchmark::State& state) {
    const IndexField f = grin2d();
    const int M = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(minimize_path(f, Vec3(-1.0, 0.2, 0), Vec3(1.2, 0.7, 0), M));
}
BENCHMARK(BM_MinimizePath)->Arg(51)->Arg(201)->Unit(benchmark::kMillisecond);

static void BM_ProperTimeIntegral3D(benchmark::State& state) {
    const IndexField f = IndexField::homogeneous(3, 1.5);
    for (auto _ : state) benchmark::DoNotOptimize(proper_time_integral(f, Vec3(1.0, 2.0, 2.0), Vec3::Zero(), 4.0));
}
BENCHMARK(BM_ProperTimeIntegral3D)->Unit(benchmark::kMicrosecond);

static void BM_SlicedKernel1D(benchmark::State& state) {
    Box box;
    box.lo = Vec3::Constant(-5.0);
    box.hi = Vec3::Constant(5.0);
    const IndexField f = IndexField::parabolic_grin(1, 1.0, 0.3, -1, box);
    const GridSpec g = GridSpec::centered(1, static_cast<int>(state.range(0)), 0.02);
    for (auto _ : state) benchmark::DoNotOptimize(sliced_kernel(f, Vec3::Zero(), 1.0, 0.1, 64, g));
}
BENCHMARK(BM_SlicedKernel1D)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_StationaryKernel2D(benchmark::State& state) {
    const IndexField f = grin2d();
    const int n = static_cast<int>(state.range(0));
    const GridSpec g = GridSpec::centered(2, n, 3.2 / n);
    StationaryOptions o;
    o.absorber = {0.6, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(stationary_kernel(f, Vec3::Zero(), 2.0 * 3.14159265358979, g, o));
}
BENCHMARK(BM_StationaryKernel2D)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_SolveHelmholtz2D(benchmark::State& state) {
    const IndexField f = grin2d();
    const int n = static_cast<int>(state.range(0));
    const HelmholtzProblem p{f, 2.0 * 3.14159265358979, GridSpec::centered(2, n, 3.2 / n), Vec3::Zero(), Absorber{0.6, 1.0},
                             1.0, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(solve_helmholtz(p));
}
BENCHMARK(BM_SolveHelmholtz2D)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
