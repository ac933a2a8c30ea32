#include "fermat/fft.hpp"

#include <fftw3.h>

#include <atomic>
#include <cmath>
#include <mutex>

namespace fermat {

namespace {
// FFTW's planner is not thread-safe
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
std::atomic<FftPlanning> g_planning{FftPlanning::estimate};
}  // namespace

void set_fft_planning(FftPlanning mode) { g_planning = mode; }

FftPlanning fft_planning() { return g_planning; }

struct FftPlan::Impl {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

FftPlan::FftPlan(const GridSpec& spec) : impl_(std::make_unique<Impl>()) {
    int dims[3];
    for (int a = 0; a < spec.dim; ++a) dims[a] = spec.n[a];
    const size_t total = spec.size();
    std::vector<cdouble> scratch(total);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        const unsigned flags = (g_planning == FftPlanning::measure ? FFTW_MEASURE : FFTW_ESTIMATE) | FFTW_UNALIGNED;
        impl_->fwd = fftw_plan_dft(spec.dim, dims, buf, buf, FFTW_FORWARD, flags);
        impl_->bwd = fftw_plan_dft(spec.dim, dims, buf, buf, FFTW_BACKWARD, flags);
    }
    if (!impl_->fwd || !impl_->bwd) throw Error("FFTW failed to create a plan");

    p2_.assign(total, 0.0);
    for (size_t i = 0; i < total; ++i) {
        const auto idx = spec.unflatten(i);
        double s = 0.0;
        for (int a = 0; a < spec.dim; ++a) {
            const int m = idx[a] <= spec.n[a] / 2 ? idx[a] : idx[a] - spec.n[a];
            const double p = 2.0 * M_PI * m / (spec.n[a] * spec.h);
            s += p * p;
        }
        p2_[i] = s;
    }
}

FftPlan::~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
    if (impl_->bwd) fftw_destroy_plan(impl_->bwd);
}

void FftPlan::forward(cdouble* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(impl_->fwd, p, p);
}

void FftPlan::backward(cdouble* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(impl_->bwd, p, p);
}

}  // namespace fermat
