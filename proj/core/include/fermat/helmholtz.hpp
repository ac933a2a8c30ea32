#pragma once

#include "fermat/grid.hpp"
#include "fermat/medium.hpp"
#include "fermat/propagator.hpp"

namespace fermat {

struct HelmholtzProblem {
    IndexField field;
    double omega = 1.0;
    GridSpec grid;
    Vec3 x0 = Vec3::Zero();
    Absorber absorber;
    double c = 1.0;
    // radius of the ball around x0 used for the discrete-delta check and excluded from the residual
    double source_radius = 0.0;
};

// Outgoing Green function of (lap + k^2) G = delta: d = 1 exp(ik|x-x0|)/(2ik), d = 3 -exp(ikr)/(4 pi r).
cdouble analytic_green(const Vec3& x, const Vec3& x0, double k, int dim);

struct ResidualReport {
    double max = 0.0;        // over interior nodes outside the source ball and the absorber
    double l2 = 0.0;         // grid L2 norm over the same nodes
    cdouble delta_check;     // h^d sum over the source ball of (stencil + n^2 k^2) Psi, ideally 1
    long nodes = 0;
};

// Second-order (2d+1)-point stencil applied to psi plus n^2 omega^2/c^2 psi.
ResidualReport fd_residual(const HelmholtzProblem& problem, const ComplexGrid& psi);

// Direct sparse solve of the stencil system with the complex absorber and the unit discrete delta source.
SpectralKernel solve_helmholtz(const HelmholtzProblem& problem);

}  // namespace fermat
