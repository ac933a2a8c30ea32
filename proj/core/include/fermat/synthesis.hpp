#pragma once

#include <string>
#include <vector>

#include "fermat/grid.hpp"

namespace fermat {

// One-sided spectrum on a uniform omega grid.
struct FrequencySpectrum {
    std::vector<double> omega;
    std::vector<cdouble> weight;
    double d_omega = 0.0;

    double omega_min() const { return omega.front(); }
    double omega_max() const { return omega.back(); }
    size_t size() const { return omega.size(); }
    // alias period 2 pi / d_omega
    double period() const;

    // exp(-(w - omega0)^2 / (2 sigma^2)) on multiples of d_omega within omega0 +- width * sigma
    static FrequencySpectrum gaussian(double omega0, double sigma, double d_omega, double width = 4.0);
    // d_omega chosen so the alias period is at least twice `longest_time`
    static FrequencySpectrum gaussian_for(double omega0, double sigma, double longest_time, double width = 4.0);
};

// Psi(x, t) on selected nodes of a grid; values[it * nodes.size() + j].
struct TimeKernel {
    GridSpec spec;
    std::vector<size_t> nodes;
    std::vector<double> t;
    std::vector<cdouble> values;
    Vec3 x0 = Vec3::Zero();

    cdouble at(size_t it, size_t j) const { return values[it * nodes.size() + j]; }
    // column of the node nearest to x; UsageError when x is off the grid or not synthesized
    size_t column(const Vec3& x) const;
    std::vector<cdouble> trace(const Vec3& x) const;
};

std::vector<double> uniform_times(double t0, double dt, size_t count);
// count samples covering one alias period of the spectrum
std::vector<double> periodic_times(const FrequencySpectrum& spectrum, size_t count);

// (1/2 pi) sum_w A(w) Psi_st(x; w) exp(-i w t) d_omega, summed in spectrum order. `nodes` empty means every node.
TimeKernel synthesize_time(const std::vector<ComplexGrid>& kernels, const FrequencySpectrum& spectrum,
                           const std::vector<double>& t, const std::vector<size_t>& nodes = {});

// single-point version: one kernel value per spectrum sample
std::vector<cdouble> synthesize_trace(const std::vector<cdouble>& values, const FrequencySpectrum& spectrum,
                                      const std::vector<double>& t);

// earliest t where |Psi| reaches threshold * max |Psi|
double front_arrival(const TimeKernel& kern, const Vec3& x, double threshold = 0.5);
double front_arrival(const std::vector<double>& t, const std::vector<cdouble>& trace, double threshold = 0.5);

// envelope lead of a threshold crossing ahead of the peak for a Gaussian band of width sigma
double envelope_lead(double sigma, double threshold = 0.5);

// t, re, im, abs
void write_time_trace_csv(const std::string& path, const std::vector<double>& t, const std::vector<cdouble>& trace);
// text header "dims <n...> spacing h origin <o...> times <nt> t0 <t0> dt <dt> nodes <count>", then the node
// indices as int64 and the values as complex128, time-major
void write_time_kernel_file(const std::string& path, const TimeKernel& kern);

}  // namespace fermat
