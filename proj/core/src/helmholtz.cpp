#include "fermat/helmholtz.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <sstream>

namespace fermat {

namespace {

constexpr cdouble I(0.0, 1.0);

std::vector<cdouble> stencil_coefficients(const HelmholtzProblem& p) {
    const GridSpec& g = p.grid;
    std::vector<cdouble> k2(g.size());
    const double k0 = p.omega / p.c;
    for (size_t i = 0; i < g.size(); ++i) {
        const Vec3 x = g.node(i);
        const cdouble nc = p.field.index_at(x, p.omega) * (1.0 + I * p.absorber.sigma(g, x));
        k2[i] = nc * nc * k0 * k0;
    }
    return k2;
}

double source_radius(const HelmholtzProblem& p) { return p.source_radius > 0 ? p.source_radius : 4.0 * p.grid.h; }

}  // namespace

cdouble analytic_green(const Vec3& x, const Vec3& x0, double k, int dim) {
    if (dim == 2) throw UnsupportedError("analytic_green: the two-dimensional Green function is not provided");
    if (dim != 1 && dim != 3) throw UsageError("analytic_green: dimension must be 1 or 3");
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) r2 += (x[a] - x0[a]) * (x[a] - x0[a]);
    const double r = std::sqrt(r2);
    if (r == 0.0) throw SingularityError("analytic_green evaluated at the source point");
    if (dim == 1) return std::exp(I * k * r) / (2.0 * I * k);
    return -std::exp(I * k * r) / (4.0 * M_PI * r);
}

ResidualReport fd_residual(const HelmholtzProblem& p, const ComplexGrid& psi) {
    const GridSpec& g = p.grid;
    if (!psi.spec.same_as(g)) throw UsageError("fd_residual: field is not on the problem grid");
    const auto k2 = stencil_coefficients(p);
    const double h2 = g.h * g.h, hd = g.cell_volume();
    const double rad = source_radius(p);
    ResidualReport rep;
    double sum2 = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
        const auto idx = g.unflatten(i);
        bool edge = false;
        for (int a = 0; a < g.dim; ++a)
            if (idx[a] == 0 || idx[a] == g.n[a] - 1) edge = true;
        if (edge) continue;
        cdouble lap = -2.0 * g.dim * psi.values[i];
        for (int a = 0; a < g.dim; ++a) {
            auto jm = idx, jp = idx;
            jm[a] -= 1;
            jp[a] += 1;
            lap += psi.values[g.flatten(jm)] + psi.values[g.flatten(jp)];
        }
        const cdouble r = lap / h2 + k2[i] * psi.values[i];
        const Vec3 x = g.node(i);
        double dist2 = 0.0;
        for (int a = 0; a < g.dim; ++a) dist2 += (x[a] - p.x0[a]) * (x[a] - p.x0[a]);
        if (dist2 <= rad * rad) {
            rep.delta_check += r * hd;
            continue;
        }
        if (p.absorber.inside(g, x)) continue;
        rep.max = std::max(rep.max, std::abs(r));
        sum2 += std::norm(r) * hd;
        ++rep.nodes;
    }
    rep.l2 = std::sqrt(sum2);
    return rep;
}

SpectralKernel solve_helmholtz(const HelmholtzProblem& p) {
    const GridSpec& g = p.grid;
    if (g.dim != p.field.dim()) throw UsageError("solve_helmholtz: grid dimension does not match the field");
    bool exact = false;
    const size_t src = g.flatten(g.nearest(p.x0, &exact));
    if (!exact) throw UsageError("solve_helmholtz: source must coincide with a grid node");
    const auto k2 = stencil_coefficients(p);
    double nmax = 0.0;
    for (size_t i = 0; i < g.size(); ++i) nmax = std::max(nmax, p.field.index_at(g.node(i), p.omega));
    const double wavelength = 2.0 * M_PI * p.c / (nmax * p.omega);
    if (g.h > wavelength / 12.0) {
        std::ostringstream os;
        os << "solve_helmholtz: grid resolves only " << wavelength / g.h << " points per wavelength (need 12)";
        throw UsageError(os.str());
    }

    const size_t N = g.size();
    const double ih2 = 1.0 / (g.h * g.h);
    std::vector<Eigen::Triplet<cdouble>> trip;
    trip.reserve(N * (2 * g.dim + 1));
    for (size_t i = 0; i < N; ++i) {
        const auto idx = g.unflatten(i);
        trip.emplace_back(i, i, -2.0 * g.dim * ih2 + k2[i]);
        for (int a = 0; a < g.dim; ++a) {
            for (int s : {-1, 1}) {
                auto j = idx;
                j[a] += s;
                if (j[a] < 0 || j[a] >= g.n[a]) continue;
                trip.emplace_back(i, g.flatten(j), cdouble(ih2));
            }
        }
    }
    Eigen::SparseMatrix<cdouble> A(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(N));
    b[static_cast<Eigen::Index>(src)] = 1.0 / g.cell_volume();

    double norm_a = 0.0;
    for (Eigen::Index col = 0; col < A.outerSize(); ++col) {
        double s = 0.0;
        for (Eigen::SparseMatrix<cdouble>::InnerIterator it(A, col); it; ++it) s += std::abs(it.value());
        norm_a = std::max(norm_a, s);
    }

    Eigen::SparseLU<Eigen::SparseMatrix<cdouble>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw SolverError("solve_helmholtz: sparse factorization failed (" + lu.lastErrorMessage() + ")",
                          std::numeric_limits<double>::infinity());
    const Eigen::VectorXcd x = lu.solve(b);
    // ||A|| ||x|| / ||b|| bounds the condition number from below
    const double cond = norm_a * x.lpNorm<1>() / b.lpNorm<1>();
    if (!x.allFinite() || cond > 1e14)
        throw SolverError("solve_helmholtz: system is singular or nearly so", cond);

    SpectralKernel out;
    out.psi = ComplexGrid(g);
    for (size_t i = 0; i < N; ++i) out.psi.values[i] = x[static_cast<Eigen::Index>(i)];
    out.psi.omega = p.omega;
    out.psi.source_index = static_cast<long>(src);
    out.psi_eps = out.psi;
    return out;
}

}  // namespace fermat
