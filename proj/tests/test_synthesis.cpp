#include <gtest/gtest.h>

#include <cmath>

#include "fermat/synthesis.hpp"

using namespace fermat;

namespace {
constexpr double pi = 3.14159265358979323846;
const cdouble I(0.0, 1.0);
}  // namespace

TEST(Synthesis, GaussianSpectrumSamplesMultiplesOfStep) {
    const FrequencySpectrum s = FrequencySpectrum::gaussian(10.0, 2.0, 0.5, 3.0);
    EXPECT_DOUBLE_EQ(s.omega_min(), 4.0);
    EXPECT_DOUBLE_EQ(s.omega_max(), 16.0);
    EXPECT_EQ(s.size(), 25u);
    EXPECT_NEAR(s.weight[12].real(), 1.0, 1e-15);
    EXPECT_NEAR(s.weight[0].real(), std::exp(-4.5), 1e-15);
    EXPECT_NEAR(s.period(), 4 * pi, 1e-14);
}

TEST(Synthesis, AliasPeriodCoversLongestTime) {
    const FrequencySpectrum s = FrequencySpectrum::gaussian_for(20.0, 3.0, 1.7);
    EXPECT_GE(s.period(), 2.0 * 1.7 - 1e-12);
}

TEST(Synthesis, SingleLineIsAPlaneWaveInTime) {
    FrequencySpectrum s;
    s.omega = {3.0};
    s.weight = {cdouble(2.0, 0.0)};
    s.d_omega = 0.5;
    const std::vector<double> t = uniform_times(0.0, 0.1, 20);
    const cdouble psi(0.3, -0.7);
    const std::vector<cdouble> tr = synthesize_trace({psi}, s, t);
    for (size_t i = 0; i < t.size(); ++i) {
        const cdouble expect = 2.0 * psi * std::exp(-I * 3.0 * t[i]) * 0.5 / (2 * pi);
        EXPECT_NEAR(std::abs(tr[i] - expect), 0.0, 1e-15);
    }
}

TEST(Synthesis, DelayedKernelPeaksAtDelay) {
    // Psi_st = exp(i omega T): the synthesized envelope is a Gaussian centred on t = T
    const double T = 0.8, sigma = 5.0;
    const FrequencySpectrum s = FrequencySpectrum::gaussian_for(30.0, sigma, 2.0);
    std::vector<cdouble> vals;
    for (double w : s.omega) vals.push_back(std::exp(I * w * T));
    const std::vector<double> t = uniform_times(0.0, 1e-3, 2000);
    const std::vector<cdouble> tr = synthesize_trace(vals, s, t);
    size_t peak = 0;
    for (size_t i = 0; i < tr.size(); ++i)
        if (std::abs(tr[i]) > std::abs(tr[peak])) peak = i;
    EXPECT_NEAR(t[peak], T, 1e-3);
    const double front = front_arrival(t, tr, 0.5);
    EXPECT_NEAR(front, T - std::sqrt(2 * std::log(2.0)) / sigma, 2e-3);
    EXPECT_NEAR(envelope_lead(sigma, 0.5), std::sqrt(2 * std::log(2.0)) / sigma, 1e-15);
}

TEST(Synthesis, TimeKernelColumnsFollowNodes) {
    const GridSpec g = GridSpec::centered(1, 11, 0.1);
    FrequencySpectrum s = FrequencySpectrum::gaussian(5.0, 1.0, 1.0, 2.0);
    std::vector<ComplexGrid> kernels;
    for (size_t k = 0; k < s.size(); ++k) {
        ComplexGrid c(g);
        for (size_t i = 0; i < g.size(); ++i) c.values[i] = cdouble(double(i), double(k));
        kernels.push_back(c);
    }
    const std::vector<double> t = uniform_times(0.0, 0.05, 7);
    const TimeKernel full = synthesize_time(kernels, s, t);
    const TimeKernel sub = synthesize_time(kernels, s, t, {3, 8});
    const Vec3 x = g.node(8);
    const auto a = full.trace(x), b = sub.trace(x);
    for (size_t i = 0; i < t.size(); ++i) EXPECT_EQ(a[i], b[i]);
    EXPECT_THROW(sub.trace(g.node(4)), UsageError);
}

TEST(Synthesis, SilentTraceHasNoFront) {
    const std::vector<double> t = uniform_times(0.0, 0.1, 5);
    EXPECT_THROW(front_arrival(t, std::vector<cdouble>(5, 0.0)), NoSignalError);
}
