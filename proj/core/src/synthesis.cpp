#include "fermat/synthesis.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "fermat/parallel.hpp"

namespace fermat {

namespace {

constexpr double two_pi = boost::math::constants::two_pi<double>();

void check_spectrum(const FrequencySpectrum& s) {
    if (s.omega.empty()) throw UsageError("empty frequency spectrum");
    if (s.weight.size() != s.omega.size()) throw UsageError("spectrum weights and frequencies differ in length");
    if (!(s.d_omega > 0)) throw UsageError("spectrum needs d_omega > 0");
    for (size_t k = 1; k < s.omega.size(); ++k) {
        if (std::abs(s.omega[k] - s.omega[k - 1] - s.d_omega) > 1e-9 * s.d_omega)
            throw UsageError("spectrum frequencies are not on a uniform grid");
    }
}

std::vector<cdouble> phases(const FrequencySpectrum& s, const std::vector<double>& t) {
    std::vector<cdouble> e(s.size() * t.size());
    const double scale = s.d_omega / two_pi;
    for (size_t it = 0; it < t.size(); ++it)
        for (size_t k = 0; k < s.size(); ++k)
            e[it * s.size() + k] = scale * s.weight[k] * std::polar(1.0, -s.omega[k] * t[it]);
    return e;
}

}  // namespace

double FrequencySpectrum::period() const { return two_pi / d_omega; }

FrequencySpectrum FrequencySpectrum::gaussian(double omega0, double sigma, double d_omega, double width) {
    if (!(omega0 > 0) || !(sigma > 0) || !(d_omega > 0) || !(width > 0))
        throw UsageError("gaussian spectrum needs omega0, sigma, d_omega and width > 0");
    FrequencySpectrum s;
    s.d_omega = d_omega;
    const long k0 = std::max<long>(1, static_cast<long>(std::ceil((omega0 - width * sigma) / d_omega)));
    const long k1 = static_cast<long>(std::floor((omega0 + width * sigma) / d_omega));
    for (long k = k0; k <= k1; ++k) {
        const double w = static_cast<double>(k) * d_omega;
        s.omega.push_back(w);
        s.weight.emplace_back(std::exp(-0.5 * std::pow((w - omega0) / sigma, 2)), 0.0);
    }
    if (s.omega.empty()) throw UsageError("gaussian spectrum has no samples; reduce d_omega");
    return s;
}

FrequencySpectrum FrequencySpectrum::gaussian_for(double omega0, double sigma, double longest_time, double width) {
    if (!(longest_time > 0)) throw UsageError("gaussian_for needs a positive longest time");
    return gaussian(omega0, sigma, two_pi / (2.0 * longest_time), width);
}

size_t TimeKernel::column(const Vec3& x) const {
    const auto idx = spec.nearest(x);
    for (int a = 0; a < spec.dim; ++a)
        if (idx[a] < 0 || idx[a] >= spec.n[a]) throw UsageError("probe point lies off the time-kernel grid");
    const size_t flat = spec.flatten(idx);
    if (nodes.empty()) return flat;
    const auto it = std::find(nodes.begin(), nodes.end(), flat);
    if (it == nodes.end()) throw UsageError("probe point was not synthesized");
    return static_cast<size_t>(it - nodes.begin());
}

std::vector<cdouble> TimeKernel::trace(const Vec3& x) const {
    const size_t j = column(x);
    const size_t width = nodes.empty() ? spec.size() : nodes.size();
    std::vector<cdouble> out(t.size());
    for (size_t it = 0; it < t.size(); ++it) out[it] = values[it * width + j];
    return out;
}

std::vector<double> uniform_times(double t0, double dt, size_t count) {
    if (!(dt > 0) || count == 0) throw UsageError("time grid needs dt > 0 and at least one sample");
    std::vector<double> t(count);
    for (size_t i = 0; i < count; ++i) t[i] = t0 + static_cast<double>(i) * dt;
    return t;
}

std::vector<double> periodic_times(const FrequencySpectrum& spectrum, size_t count) {
    check_spectrum(spectrum);
    return uniform_times(0.0, spectrum.period() / static_cast<double>(count), count);
}

TimeKernel synthesize_time(const std::vector<ComplexGrid>& kernels, const FrequencySpectrum& spectrum,
                           const std::vector<double>& t, const std::vector<size_t>& nodes) {
    check_spectrum(spectrum);
    if (kernels.size() != spectrum.size()) throw UsageError("need one spectral kernel per spectrum sample");
    if (t.empty()) throw UsageError("empty time grid");
    const GridSpec& spec = kernels.front().spec;
    for (const ComplexGrid& k : kernels) {
        if (!k.spec.same_as(spec) || k.values.size() != spec.size())
            throw UsageError("spectral kernels live on different grids");
    }
    for (size_t n : nodes)
        if (n >= spec.size()) throw UsageError("synthesis node index outside the grid");

    TimeKernel out;
    out.spec = spec;
    out.nodes = nodes;
    out.t = t;
    const size_t width = nodes.empty() ? spec.size() : nodes.size();
    out.values.assign(width * t.size(), 0.0);
    const std::vector<cdouble> e = phases(spectrum, t);
    const size_t K = spectrum.size();
    parallel_for(width, [&](size_t j) {
        const size_t node = nodes.empty() ? j : nodes[j];
        for (size_t it = 0; it < t.size(); ++it) {
            cdouble sum = 0.0;
            for (size_t k = 0; k < K; ++k) sum += e[it * K + k] * kernels[k].values[node];
            out.values[it * width + j] = sum;
        }
    });
    return out;
}

std::vector<cdouble> synthesize_trace(const std::vector<cdouble>& values, const FrequencySpectrum& spectrum,
                                      const std::vector<double>& t) {
    check_spectrum(spectrum);
    if (values.size() != spectrum.size()) throw UsageError("need one kernel value per spectrum sample");
    const std::vector<cdouble> e = phases(spectrum, t);
    const size_t K = spectrum.size();
    std::vector<cdouble> out(t.size());
    for (size_t it = 0; it < t.size(); ++it) {
        cdouble sum = 0.0;
        for (size_t k = 0; k < K; ++k) sum += e[it * K + k] * values[k];
        out[it] = sum;
    }
    return out;
}

double front_arrival(const std::vector<double>& t, const std::vector<cdouble>& trace, double threshold) {
    if (t.size() != trace.size() || t.empty()) throw UsageError("time trace and time grid differ in length");
    if (!(threshold > 0) || threshold > 1) throw UsageError("front threshold must lie in (0, 1]");
    double peak = 0.0;
    for (const cdouble& v : trace) {
        if (!std::isfinite(std::abs(v))) throw NoSignalError("time trace contains non-finite values");
        peak = std::max(peak, std::abs(v));
    }
    if (!(peak > 1e-300)) throw NoSignalError("time trace is identically zero");
    for (size_t i = 0; i < t.size(); ++i)
        if (std::abs(trace[i]) >= threshold * peak) return t[i];
    return t.back();
}

double front_arrival(const TimeKernel& kern, const Vec3& x, double threshold) {
    return front_arrival(kern.t, kern.trace(x), threshold);
}

double envelope_lead(double sigma, double threshold) {
    if (!(sigma > 0) || !(threshold > 0) || threshold > 1) throw UsageError("envelope_lead needs sigma > 0, threshold in (0, 1]");
    return std::sqrt(2.0 * std::log(1.0 / threshold)) / sigma;
}

void write_time_trace_csv(const std::string& path, const std::vector<double>& t, const std::vector<cdouble>& trace) {
    if (t.size() != trace.size()) throw UsageError("time trace and time grid differ in length");
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open CSV for writing: " + path);
    out.precision(17);
    out << "t,re,im,abs\n";
    for (size_t i = 0; i < t.size(); ++i)
        out << t[i] << ',' << trace[i].real() << ',' << trace[i].imag() << ',' << std::abs(trace[i]) << '\n';
}

void write_time_kernel_file(const std::string& path, const TimeKernel& kern) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot open time-kernel file for writing: " + path);
    std::ostringstream hs;
    hs.precision(17);
    hs << "dims";
    for (int a = 0; a < kern.spec.dim; ++a) hs << ' ' << kern.spec.n[a];
    hs << " spacing " << kern.spec.h << " origin";
    for (int a = 0; a < kern.spec.dim; ++a) hs << ' ' << kern.spec.origin[a];
    const double dt = kern.t.size() > 1 ? kern.t[1] - kern.t[0] : 0.0;
    const size_t width = kern.nodes.empty() ? kern.spec.size() : kern.nodes.size();
    hs << " times " << kern.t.size() << " t0 " << kern.t.front() << " dt " << dt << " nodes " << width << '\n';
    out << hs.str();
    for (size_t j = 0; j < width; ++j) {
        const std::int64_t n = static_cast<std::int64_t>(kern.nodes.empty() ? j : kern.nodes[j]);
        out.write(reinterpret_cast<const char*>(&n), sizeof n);
    }
    out.write(reinterpret_cast<const char*>(kern.values.data()),
              static_cast<std::streamsize>(kern.values.size() * sizeof(cdouble)));
}

}  // namespace fermat
