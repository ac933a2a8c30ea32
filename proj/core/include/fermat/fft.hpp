#pragma once

#include <memory>

#include "fermat/grid.hpp"

namespace fermat {

enum class FftPlanning { estimate, measure };

// estimate (default) gives bit-reproducible runs; measure plans are several times faster on large grids
// but the chosen algorithm, and so the last bits of results, may differ between processes.
void set_fft_planning(FftPlanning mode);
FftPlanning fft_planning();

// In-place unnormalized complex FFT over all axes of a grid.
class FftPlan {
public:
    explicit FftPlan(const GridSpec& spec);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    void forward(cdouble* data) const;
    void backward(cdouble* data) const;
    // squared angular wavenumber |p|^2 per flat index, in FFT ordering
    const std::vector<double>& p2() const { return p2_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::vector<double> p2_;
};

}  // namespace fermat
