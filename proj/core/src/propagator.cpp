#include "fermat/propagator.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fermat/fft.hpp"
#include "fermat/parallel.hpp"

namespace fermat {

namespace {

constexpr cdouble I(0.0, 1.0);

Vec3 grid_extent_lo(const GridSpec& g) { return g.origin; }

Vec3 grid_extent_hi(const GridSpec& g) {
    Vec3 hi = g.origin;
    for (int a = 0; a < g.dim; ++a) hi[a] += g.h * (g.n[a] - 1);
    return hi;
}

size_t source_node(const GridSpec& grid, const Vec3& x0, const char* who) {
    bool exact = false;
    const auto idx = grid.nearest(x0, &exact);
    if (!exact) throw UsageError(std::string(who) + ": source position must coincide with a grid node");
    return grid.flatten(idx);
}

void check_grid_in_field(const IndexField& field, const GridSpec& grid) {
    if (grid.dim != field.dim()) throw UsageError("grid dimension does not match the field dimension");
    if (!field.contains(grid_extent_lo(grid)) || !field.contains(grid_extent_hi(grid)))
        throw DomainError("grid extends outside the medium bounding box");
}

// erfc roll-off centred at `center` with width `tau`; its derivative has a Gaussian spectrum
double erfc_window(double s, double center, double tau) { return 0.5 * std::erfc((s - center) / tau); }

// Average of the 2d axis neighbours of a node (wrapping at the grid edge is avoided by one-sided fallback).
cdouble neighbour_average(const ComplexGrid& g, size_t flat) {
    const auto idx = g.spec.unflatten(flat);
    cdouble sum = 0.0;
    int count = 0;
    for (int a = 0; a < g.spec.dim; ++a) {
        for (int s : {-1, 1}) {
            auto j = idx;
            j[a] += s;
            if (j[a] < 0 || j[a] >= g.spec.n[a]) continue;
            sum += g.values[g.spec.flatten(j)];
            ++count;
        }
    }
    return count ? sum / double(count) : cdouble(0.0);
}

}  // namespace

double Absorber::sigma(const GridSpec& spec, const Vec3& x) const {
    if (width <= 0.0) return 0.0;
    const Vec3 lo = grid_extent_lo(spec), hi = grid_extent_hi(spec);
    double depth = 0.0;
    for (int a = 0; a < spec.dim; ++a) {
        depth = std::max(depth, lo[a] + width - x[a]);
        depth = std::max(depth, x[a] - (hi[a] - width));
    }
    if (depth <= 0.0) return 0.0;
    const double r = std::min(depth / width, 1.0);
    return strength * r * r;
}

bool Absorber::inside(const GridSpec& spec, const Vec3& x) const {
    if (width <= 0.0) return false;
    const Vec3 lo = grid_extent_lo(spec), hi = grid_extent_hi(spec);
    for (int a = 0; a < spec.dim; ++a)
        if (x[a] < lo[a] + width || x[a] > hi[a] - width) return true;
    return false;
}

cdouble free_kernel(const Vec3& x, const Vec3& x0, double S, int dim) {
    if (!(S > 0)) throw UsageError("free_kernel requires S > 0");
    if (dim < 1 || dim > 3) throw UsageError("free_kernel dimension must be 1, 2 or 3");
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) r2 += (x[a] - x0[a]) * (x[a] - x0[a]);
    return std::pow(4.0 * M_PI * I * S, -0.5 * dim) * std::exp(I * r2 / (4.0 * S));
}

ComplexGrid sliced_kernel(const IndexField& field, const Vec3& x0, double omega, double S, int M,
                          const GridSpec& grid, const SliceOptions& opts) {
    if (M < 1) throw UsageError("sliced_kernel requires M >= 1");
    if (!(S > 0)) throw UsageError("sliced_kernel requires S > 0");
    check_grid_in_field(field, grid);
    const size_t src = source_node(grid, x0, "sliced_kernel");
    const int d = grid.dim;
    const double eb = S / M;
    const double c = opts.c;

    // potential on the half-node lattice (2n per axis, periodic); odd entries are pair midpoints
    GridSpec half = grid;
    for (int a = 0; a < d; ++a) half.n[a] = 2 * grid.n[a];
    half.h = grid.h / 2;
    const Vec3 hi = grid_extent_hi(grid);
    std::vector<double> vhalf(half.size());
    double vmax = 0.0;
    for (size_t q = 0; q < half.size(); ++q) {
        const Vec3 x = half.node(q);
        bool seam = false;
        for (int a = 0; a < d; ++a)
            if (x[a] > hi[a] + 1e-12 * grid.h) seam = true;
        double v;
        if (!seam) {
            v = field.potential(x, omega, c);
        } else {
            // midpoint across the periodic seam: mean of the two wrapped nodes
            auto qi = half.unflatten(q);
            std::array<int, 3> ja{0, 0, 0}, jb{0, 0, 0};
            for (int a = 0; a < d; ++a) {
                ja[a] = (qi[a] / 2) % grid.n[a];
                jb[a] = ((qi[a] + 1) / 2) % grid.n[a];
            }
            v = 0.5 * (field.potential(grid.node(grid.flatten(ja)), omega, c) +
                       field.potential(grid.node(grid.flatten(jb)), omega, c));
        }
        vhalf[q] = v;
        vmax = std::max(vmax, std::abs(v));
    }
    if (eb * vmax >= opts.max_phase) {
        std::ostringstream os;
        os << "sliced_kernel: slice phase (S/M) max|V| = " << eb * vmax << " exceeds " << opts.max_phase
           << "; increase M";
        throw AccuracyError(os.str());
    }

    FftPlan plan(grid);
    const size_t N = grid.size();
    const double hd = grid.cell_volume();

    ComplexGrid out(grid);
    out.omega = omega;
    out.S = S;
    out.source_index = static_cast<long>(src);
    std::vector<cdouble> psi(N, 0.0);
    psi[src] = 1.0 / hd;

    const auto constant = field.constant_index();
    if (constant && !field.dispersive()) {
        // spatially constant potential: the slice operator is a circulant convolution times a phase
        const cdouble phase = std::exp(-I * eb * vhalf[0]);
        std::vector<cdouble> symbol(N);
        for (size_t i = 0; i < N; ++i) symbol[i] = std::exp(-I * eb * plan.p2()[i]) * phase / double(N);
        for (int m = 0; m < M; ++m) {
            plan.forward(psi.data());
            for (size_t i = 0; i < N; ++i) psi[i] *= symbol[i];
            plan.backward(psi.data());
        }
        out.values = std::move(psi);
        return out;
    }

    // lattice free kernel of one slice: w = IFFT(exp(-i eb p^2)) / h^d, indexed by wrapped offset
    std::vector<cdouble> w(N);
    for (size_t i = 0; i < N; ++i) w[i] = std::exp(-I * eb * plan.p2()[i]);
    plan.backward(w.data());
    for (auto& v : w) v /= double(N) * hd;

    std::vector<cdouble> ephase(half.size());
    for (size_t q = 0; q < half.size(); ++q) ephase[q] = std::exp(-I * eb * vhalf[q]);

    std::vector<std::array<int, 3>> idx(N);
    for (size_t i = 0; i < N; ++i) idx[i] = grid.unflatten(i);

    std::vector<cdouble> next(N);
    for (int m = 0; m < M; ++m) {
        parallel_for(N, [&](size_t i) {
            cdouble acc = 0.0;
            const auto& ii = idx[i];
            for (size_t j = 0; j < N; ++j) {
                if (psi[j] == cdouble(0.0)) continue;
                const auto& jj = idx[j];
                std::array<int, 3> off{0, 0, 0}, mid{0, 0, 0};
                for (int a = 0; a < d; ++a) {
                    const int na = grid.n[a];
                    int o = ii[a] - jj[a];
                    // minimal image offset in [-n/2, n/2)
                    if (o >= (na + 1) / 2) o -= na;
                    if (o < -(na / 2)) o += na;
                    off[a] = (o + na) % na;
                    mid[a] = ((2 * jj[a] + o) % (2 * na) + 2 * na) % (2 * na);
                }
                acc += w[grid.flatten(off)] * ephase[half.flatten(mid)] * psi[j];
            }
            next[i] = acc * hd;
        });
        std::swap(psi, next);
    }
    out.values = std::move(psi);
    return out;
}

double schrodinger_residual(const IndexField& field, const ComplexGrid& before, const ComplexGrid& at,
                            const ComplexGrid& after, double omega, double c) {
    if (!before.spec.same_as(at.spec) || !after.spec.same_as(at.spec))
        throw UsageError("schrodinger_residual: slices are on different grids");
    const double dS1 = at.S - before.S, dS2 = after.S - at.S;
    if (!(dS1 > 0) || std::abs(dS1 - dS2) > 1e-9 * dS1)
        throw UsageError("schrodinger_residual: slices must be equally spaced in S");
    const GridSpec& g = at.spec;
    const double h2 = g.h * g.h;
    double worst = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
        const auto idx = g.unflatten(i);
        bool interior = true;
        for (int a = 0; a < g.dim; ++a)
            if (idx[a] == 0 || idx[a] == g.n[a] - 1) interior = false;
        if (!interior) continue;
        cdouble lap = -2.0 * g.dim * at.values[i];
        for (int a = 0; a < g.dim; ++a) {
            auto jm = idx, jp = idx;
            jm[a] -= 1;
            jp[a] += 1;
            lap += at.values[g.flatten(jm)] + at.values[g.flatten(jp)];
        }
        lap /= h2;
        const double V = field.potential(g.node(i), omega, c);
        const cdouble dpsi = (after.values[i] - before.values[i]) / (2.0 * dS1);
        worst = std::max(worst, std::abs(I * dpsi + lap - V * at.values[i]));
    }
    return worst;
}

namespace {

// -i int_0^inf exp(i z S) (4 pi i S)^(-d/2) exp(i r^2 / (4 S)) dS along a contour through the saddle
cdouble homogeneous_proper_time(double r, double k, double eps, int dim) {
    using boost::math::quadrature::gauss_kronrod;
    const cdouble z(k * k, eps);
    auto integrand = [&](cdouble S, cdouble dS) {
        return std::exp(I * z * S + I * r * r / (4.0 * S) - 0.5 * dim * std::log(4.0 * M_PI * I * S)) * dS;
    };
    const double tol = 1e-12;
    cdouble total = 0.0;
    double s_star = 0.0;
    if (r > 0.0) {
        s_star = r / (2.0 * k);
        // lower half plane inside |S| < s_star, where exp(i r^2 / 4S) decays towards S = 0
        const double beta = 0.5;
        auto seg1 = [&](double t) {
            if (t <= 0.0) return cdouble(0.0);
            const cdouble S = s_star * t * (1.0 - I * beta * (1.0 - t));
            const cdouble dS = s_star * (1.0 - I * beta * (1.0 - 2.0 * t));
            return integrand(S, dS);
        };
        // split so that the many oscillations near S = 0 at large k r are resolved
        const int pieces = 4;
        for (int p = 0; p < pieces; ++p)
            total += gauss_kronrod<double, 61>::integrate(seg1, double(p) / pieces, double(p + 1) / pieces, 20, tol);
    } else if (dim >= 2) {
        throw SingularityError("proper-time integral diverges at the source in dimension >= 2");
    }
    // upper half plane from the saddle to infinity, where exp(i z S) decays
    const double scale = std::max(s_star, 1.0 / (k * k));
    auto seg2 = [&](double u) {
        const cdouble S = s_star + scale * (1.0 + I) * u;
        return integrand(S, scale * (1.0 + I));
    };
    if (r > 0.0) {
        total += gauss_kronrod<double, 61>::integrate(seg2, 0.0, 1.0, 20, tol);
    } else {
        // u = v^2 removes the S^(-1/2) endpoint singularity of the 1D kernel
        auto seg2v = [&](double v) { return 2.0 * v * seg2(v * v); };
        total += gauss_kronrod<double, 61>::integrate(seg2v, 0.0, 1.0, 20, tol);
    }
    total += gauss_kronrod<double, 61>::integrate(seg2, 1.0, std::numeric_limits<double>::infinity(), 20, tol);
    return -I * total;
}

}  // namespace

ProperTimeResult proper_time_integral(const IndexField& field, const Vec3& x, const Vec3& x0, double omega,
                                      const ProperTimeOptions& opts) {
    if (!(omega > 0)) throw UsageError("proper_time_integral requires omega > 0");
    ProperTimeResult res;
    const auto n_const = field.constant_index();
    if (n_const) {
        field.index(x);
        field.index(x0);
        const double n = field.dispersive() ? *n_const * field.dispersion()->factor(omega) : *n_const;
        const double k = n * omega / opts.c;
        const double eps = opts.eps > 0 ? opts.eps : 1e-6 * k * k;
        const double S_max = opts.S_max > 0 ? opts.S_max : 30.0 / eps;
        if (std::exp(-eps * S_max) > 1e-8) {
            std::ostringstream os;
            os << "proper_time_integral: truncation tail exp(-eps S_max) = " << std::exp(-eps * S_max)
               << " exceeds 1e-8";
            throw AccuracyError(os.str());
        }
        double r2 = 0.0;
        for (int a = 0; a < field.dim(); ++a) r2 += (x[a] - x0[a]) * (x[a] - x0[a]);
        const double r = std::sqrt(r2);
        res.eps = eps;
        res.S_max = S_max;
        res.value = homogeneous_proper_time(r, k, eps, field.dim());
        res.value_half = homogeneous_proper_time(r, k, eps / 2, field.dim());
        res.extrapolated = 2.0 * res.value_half - res.value;
        return res;
    }
    if (!opts.grid) throw UsageError("proper_time_integral: inhomogeneous media need a grid specification");
    StationaryOptions so;
    so.c = opts.c;
    so.absorber = opts.absorber;
    so.eps = opts.eps;
    so.S_max = opts.S_max;
    const SpectralKernel sk = stationary_kernel(field, x0, omega, *opts.grid, so);
    bool exact = false;
    const auto idx = opts.grid->nearest(x, &exact);
    if (!exact) throw UsageError("proper_time_integral: evaluation point must coincide with a grid node");
    const size_t i = opts.grid->flatten(idx);
    res.eps = sk.eps;
    res.S_max = sk.S_max;
    res.value = sk.psi_eps.values[i];
    res.extrapolated = sk.psi.values[i];
    res.value_half = 0.5 * (res.extrapolated + res.value);
    return res;
}

namespace {

SpectralKernel evolve_stationary(const IndexField& field, size_t src, double omega, const GridSpec& grid,
                                 const StationaryOptions& opts) {
    const double c = opts.c;
    const size_t N = grid.size();
    const double hd = grid.cell_volume();
    const double k0 = omega / c;

    std::vector<cdouble> V(N);
    double nmax = 0.0, nmin = std::numeric_limits<double>::infinity(), vmax = 0.0;
    for (size_t i = 0; i < N; ++i) {
        const Vec3 x = grid.node(i);
        const double n = field.index_at(x, omega);
        nmax = std::max(nmax, n);
        nmin = std::min(nmin, n);
        const cdouble nc = n * (1.0 + I * opts.absorber.sigma(grid, x));
        V[i] = (1.0 - nc * nc) * k0 * k0;
        vmax = std::max(vmax, std::abs(V[i]));
    }

    double diameter = 0.0;
    for (int a = 0; a < grid.dim; ++a) diameter += std::pow(grid.h * grid.n[a], 2);
    diameter = std::sqrt(diameter);
    // resonant waves move at dx/dS = 2 k n and reach the absorber well before the roll-off
    const double tau = opts.window > 0 ? opts.window : 9.0 / std::pow(k0 * nmax, 2);
    const double S_end = opts.S_max > 0 ? opts.S_max : 0.5 * diameter / (k0 * nmin) + 12.0 * tau;
    const double center = S_end - 6.0 * tau;
    if (!(center > 6.0 * tau)) throw UsageError("stationary_kernel: S_max must exceed 12 window widths");
    const double dS = opts.dS > 0 ? opts.dS : std::min(0.02 / std::pow(k0 * nmax, 2), 0.05 / vmax);
    const long steps = static_cast<long>(std::ceil(S_end / dS));
    const double eps = std::max(0.0, opts.eps);

    FftPlan plan(grid);
    const auto& p2 = plan.p2();
    const double pf = opts.source_cutoff * k0 * nmax;

    std::vector<cdouble> kick(N), kick2(N), kin(N), phi(N);
    const cdouble z(k0 * k0, eps);
    for (size_t i = 0; i < N; ++i) {
        kick[i] = std::exp(-0.5 * I * V[i] * dS);
        kick2[i] = kick[i] * kick[i];
        kin[i] = std::exp(-I * p2[i] * dS) / double(N);
        const cdouble a = I * (z - p2[i]) * dS;
        // (exp(a) - 1) / a * dS, with the series near a = 0
        phi[i] = std::abs(a) < 1e-6 ? dS * (1.0 + 0.5 * a + a * a / 6.0) : (std::exp(a) - 1.0) / a * dS;
    }

    // y = kick * psi; consecutive half kicks are fused into kick2
    std::vector<cdouble> y(N, 0.0);
    y[src] = 1.0 / hd;
    plan.forward(y.data());
    for (size_t i = 0; i < N; ++i) y[i] *= std::exp(-std::pow(p2[i] / (pf * pf), 2)) / double(N);
    plan.backward(y.data());
    for (size_t i = 0; i < N; ++i) y[i] *= kick[i];

    std::vector<cdouble> acc(N, 0.0);
    double S = 0.0;
    for (long m = 0; m < steps; ++m) {
        plan.forward(y.data());
        const cdouble e = erfc_window(S + 0.5 * dS, center, tau) * std::exp(I * z * S);
        for (size_t i = 0; i < N; ++i) {
            acc[i] += e * phi[i] * y[i];
            y[i] *= kin[i];
        }
        S += dS;
        if (m + 1 == steps) break;
        plan.backward(y.data());
        for (size_t i = 0; i < N; ++i) y[i] *= kick2[i];
    }
    plan.backward(acc.data());

    SpectralKernel out;
    out.psi = ComplexGrid(grid);
    for (size_t i = 0; i < N; ++i) out.psi.values[i] = -I * acc[i] / double(N);
    out.psi_eps = out.psi;
    out.eps = eps;
    out.S_max = S;
    out.steps = steps;
    out.grid_evolution = true;
    return out;
}

}  // namespace

SpectralKernel stationary_kernel(const IndexField& field, const Vec3& x0, double omega, const GridSpec& grid,
                                 const StationaryOptions& opts) {
    if (!(omega > 0)) throw UsageError("stationary_kernel requires omega > 0");
    check_grid_in_field(field, grid);
    const size_t src = source_node(grid, x0, "stationary_kernel");

    SpectralKernel out;
    if (field.constant_index() && opts.absorber.width <= 0.0) {
        out.psi = ComplexGrid(grid);
        out.psi_eps = ComplexGrid(grid);
        ProperTimeOptions po;
        po.c = opts.c;
        po.eps = opts.eps;
        po.S_max = opts.S_max;
        std::vector<ProperTimeResult> vals(grid.size());
        parallel_for(grid.size(), [&](size_t i) {
            if (i == src) return;
            vals[i] = proper_time_integral(field, grid.node(i), x0, omega, po);
        });
        for (size_t i = 0; i < grid.size(); ++i) {
            out.psi.values[i] = vals[i].extrapolated;
            out.psi_eps.values[i] = vals[i].value;
        }
        const size_t probe = src == 0 ? 1 : 0;
        out.eps = vals[probe].eps;
        out.S_max = vals[probe].S_max;
    } else {
        if (opts.absorber.width <= 0.0)
            throw UsageError("stationary_kernel: inhomogeneous media need an absorbing layer on the grid");
        out = evolve_stationary(field, src, omega, grid, opts);
    }
    for (ComplexGrid* g : {&out.psi, &out.psi_eps}) {
        g->omega = omega;
        g->eps = out.eps;
        g->S = out.S_max;
        g->source_index = static_cast<long>(src);
        g->values[src] = neighbour_average(*g, src);
    }
    return out;
}

}  // namespace fermat
