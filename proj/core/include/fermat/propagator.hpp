#pragma once

#include <optional>
#include <vector>

#include "fermat/grid.hpp"
#include "fermat/medium.hpp"

namespace fermat {

// Complex absorbing layer on the outer `width` of a grid: n -> n (1 + i sigma), sigma = strength (depth/width)^2.
struct Absorber {
    double width = 0.0;
    double strength = 1.0;

    double sigma(const GridSpec& spec, const Vec3& x) const;
    bool inside(const GridSpec& spec, const Vec3& x) const;  // true in the absorbing layer
};

// Mass-1/2 free Schroedinger kernel (4 pi i S)^(-d/2) exp(i |x - x0|^2 / (4 S)), principal branch.
cdouble free_kernel(const Vec3& x, const Vec3& x0, double S, int dim);

struct SliceOptions {
    double c = 1.0;
    // the composition refuses to run when (S/M) max|V| reaches this bound
    double max_phase = 0.5;
};

// Psi_0(x, x0, S) on `grid` from M slices. Each slice propagates with the lattice free kernel and the
// potential phase exp(-i (S/M) V) evaluated at the midpoint of each pair of nodes; the source at x0 is the
// discrete delta 1/h^d on the node nearest to x0.
ComplexGrid sliced_kernel(const IndexField& field, const Vec3& x0, double omega, double S, int M,
                          const GridSpec& grid, const SliceOptions& opts = {});

// max over interior nodes of |i dPsi/dS + lap Psi - V Psi| by central differences; slices at S - dS, S, S + dS.
double schrodinger_residual(const IndexField& field, const ComplexGrid& before, const ComplexGrid& at,
                            const ComplexGrid& after, double omega, double c = 1.0);

struct ProperTimeOptions {
    double eps = 0.0;    // damping; 0 selects 1e-6 (omega n / c)^2
    double S_max = 0.0;  // truncation of the proper-time axis; 0 selects a value with exp(-eps S_max) < 1e-12
    double c = 1.0;
    // grid used for non-homogeneous media
    std::optional<GridSpec> grid;
    Absorber absorber;
};

struct ProperTimeResult {
    cdouble value;         // at damping eps
    cdouble value_half;    // at damping eps/2
    cdouble extrapolated;  // Richardson eps -> 0
    double eps = 0.0;
    double S_max = 0.0;
};

// -i * int_0^S_max dS exp(i (omega^2/c^2 + i eps) S) Psi_0(x, x0, S).
ProperTimeResult proper_time_integral(const IndexField& field, const Vec3& x, const Vec3& x0, double omega,
                                      const ProperTimeOptions& opts = {});

struct StationaryOptions {
    double c = 1.0;
    Absorber absorber;
    double eps = 0.0;           // extra damping exp(-eps S) on top of the roll-off window
    double dS = 0.0;            // proper-time step of the grid evolution; 0 selects an automatic value
    double S_max = 0.0;         // evolution length; 0 selects half a grid diameter of resonant travel plus the roll-off
    double window = 0.0;        // width of the erfc roll-off ending the proper-time integral; 0 selects a default
    double source_cutoff = 4.0; // source band limit in units of the largest local wavenumber
};

struct SpectralKernel {
    ComplexGrid psi;      // extrapolated eps -> 0 (grid evolution: the windowed integral itself)
    ComplexGrid psi_eps;  // at damping eps
    double eps = 0.0;
    double S_max = 0.0;
    long steps = 0;
    bool grid_evolution = false;
};

// Psi_st on every node of `grid`; the source node holds the average of its neighbours and is flagged.
SpectralKernel stationary_kernel(const IndexField& field, const Vec3& x0, double omega, const GridSpec& grid,
                                 const StationaryOptions& opts = {});

}  // namespace fermat
