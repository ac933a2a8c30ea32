#include "fermat/raytrace.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <sstream>

namespace fermat {

namespace {

Vec3 acceleration_unchecked(const IndexField& field, const Vec3& x, const Vec3& t) {
    const double n = field.profile(x);
    const Vec3 g = field.grad(x);
    return (g - g.dot(t) * t) / n;
}

Vec3 masked(const Vec3& v, int dim) {
    Vec3 out = Vec3::Zero();
    for (int a = 0; a < dim; ++a) out[a] = v[a];
    return out;
}

// RK4 step; DomainError propagates when any stage leaves the medium
RayState rk4_step(const IndexField& field, const RayState& st, double ds, double c) {
    const int d = field.dim();
    const Vec3& x = st.x;
    const Vec3& t = st.t;
    const Vec3 k1x = t;
    const Vec3 k1t = acceleration_unchecked(field, x, t);
    const Vec3 x2 = x + 0.5 * ds * k1x, t2 = t + 0.5 * ds * k1t;
    const Vec3 k2x = t2;
    const Vec3 k2t = acceleration_unchecked(field, x2, t2);
    const Vec3 x3 = x + 0.5 * ds * k2x, t3 = t + 0.5 * ds * k2t;
    const Vec3 k3x = t3;
    const Vec3 k3t = acceleration_unchecked(field, x3, t3);
    const Vec3 x4 = x + ds * k3x, t4 = t + ds * k3t;
    const Vec3 k4x = t4;
    const Vec3 k4t = acceleration_unchecked(field, x4, t4);

    RayState out;
    out.x = masked(x + ds / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x), d);
    out.t = masked(t + ds / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t), d);
    out.t.normalize();
    if (!field.contains(out.x)) throw DomainError("step ends outside the medium");
    out.s = st.s + ds;
    out.T_opt = st.T_opt + field.profile(0.5 * (x + out.x)) * ds / c;
    return out;
}

void check_unit(const Vec3& t) {
    if (std::abs(t.norm() - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "tangent is not a unit vector (|t| = " << t.norm() << ")";
        throw UsageError(os.str());
    }
}

}  // namespace

Vec3 ray_acceleration(const IndexField& field, const Vec3& x, const Vec3& t) {
    check_unit(t);
    return acceleration_unchecked(field, x, t);
}

RayState step_ray(const IndexField& field, const RayState& state, double ds, double c) {
    if (!(ds > 0)) throw UsageError("step_ray requires ds > 0");
    check_unit(state.t);
    if (!field.contains(state.x)) throw DomainError("ray state lies outside the medium");
    try {
        return rk4_step(field, state, ds, c);
    } catch (const DomainError&) {
    }
    double lo = 0.0, hi = ds;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        try {
            rk4_step(field, state, mid, c);
            lo = mid;
        } catch (const DomainError&) {
            hi = mid;
        }
    }
    const RayState boundary = lo > 0.0 ? rk4_step(field, state, lo, c) : state;
    std::ostringstream os;
    os << "ray left the medium at s = " << boundary.s;
    throw TruncationError(os.str(), boundary);
}

GeodesicSolution trace_ray(const IndexField& field, const RayState& init, double s_max, double ds, double c) {
    if (!(s_max > 0) || !(ds > 0)) throw UsageError("trace_ray requires s_max > 0 and ds > 0");
    GeodesicSolution sol;
    sol.field = field;
    sol.ds = ds;
    sol.c = c;
    RayState st = init;
    st.x = masked(st.x, field.dim());
    st.t = masked(st.t, field.dim());
    if (st.t.norm() == 0.0) throw UsageError("launch direction is zero");
    st.t.normalize();
    sol.samples.push_back(st);
    const long steps = static_cast<long>(std::floor(s_max / ds + 1e-9));
    sol.samples.reserve(static_cast<size_t>(steps) + 1);
    for (long i = 0; i < steps; ++i) {
        try {
            st = step_ray(field, st, ds, c);
        } catch (const TruncationError& e) {
            sol.samples.push_back(e.boundary());
            sol.exited = true;
            break;
        }
        sol.samples.push_back(st);
    }
    return sol;
}

ChristoffelTensor christoffel(const IndexField& field, const Vec3& x) {
    ChristoffelTensor G;
    G.dim = field.dim();
    const double n = field.profile(x);
    const Vec3 g = field.grad(x);
    for (int i = 0; i < G.dim; ++i)
        for (int j = 0; j < G.dim; ++j)
            for (int k = 0; k < G.dim; ++k)
                G.g[i][j][k] = ((i == j ? g[k] : 0.0) + (i == k ? g[j] : 0.0) - (j == k ? g[i] : 0.0)) / n;
    return G;
}

double geodesic_residual(const GeodesicSolution& sol) {
    const size_t count = sol.samples.size() - (sol.exited ? 1 : 0);
    if (sol.samples.empty() || count < 5) throw UsageError("geodesic_residual needs at least 5 uniformly spaced samples");
    const IndexField& f = sol.field;
    const int d = f.dim();
    const double h = sol.ds, c = sol.c;
    std::vector<double> n(count);
    for (size_t k = 0; k < count; ++k) n[k] = f.profile(sol.samples[k].x);
    double worst = 0.0;
    for (size_t k = 2; k + 2 < count; ++k) {
        const Vec3& xm2 = sol.samples[k - 2].x;
        const Vec3& xm1 = sol.samples[k - 1].x;
        const Vec3& x0 = sol.samples[k].x;
        const Vec3& xp1 = sol.samples[k + 1].x;
        const Vec3& xp2 = sol.samples[k + 2].x;
        const Vec3 d1 = (-xp2 + 8.0 * xp1 - 8.0 * xm1 + xm2) / (12.0 * h);
        const Vec3 d2 = (-xp2 + 16.0 * xp1 - 30.0 * x0 + 16.0 * xm1 - xm2) / (12.0 * h * h);
        const double dn = (-n[k + 2] + 8.0 * n[k + 1] - 8.0 * n[k - 1] + n[k - 2]) / (12.0 * h);
        const double nk = n[k];
        const Vec3 v = (c / nk) * d1;
        const Vec3 acc = (c / nk) * (c / nk) * d2 - (c * c / (nk * nk * nk)) * dn * d1;
        const ChristoffelTensor G = christoffel(f, x0);
        for (int i = 0; i < d; ++i) {
            double r = acc[i];
            for (int j = 0; j < d; ++j)
                for (int l = 0; l < d; ++l) r += G.g[i][j][l] * v[j] * v[l];
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

namespace {

struct Shooter {
    const IndexField& field;
    Vec3 x_i;
    Vec3 chord;
    std::vector<Vec3> basis;
    long steps;
    double c;

    Vec3 direction(const Eigen::VectorXd& u) const {
        Vec3 dir = chord;
        for (size_t k = 0; k < basis.size(); ++k) dir += u[static_cast<Eigen::Index>(k)] * basis[k];
        return dir.normalized();
    }

    // trace `steps` equal steps of total length u.back(); throws DomainError/TruncationError on exit
    GeodesicSolution run(const Eigen::VectorXd& u) const {
        const double S = u[u.size() - 1];
        if (!(S > 0)) throw DomainError("non-positive arc length");
        GeodesicSolution sol;
        sol.field = field;
        sol.c = c;
        sol.ds = S / steps;
        RayState st;
        st.x = x_i;
        st.t = direction(u);
        sol.samples.reserve(static_cast<size_t>(steps) + 1);
        sol.samples.push_back(st);
        for (long i = 0; i < steps; ++i) {
            st = step_ray(field, st, sol.ds, c);
            sol.samples.push_back(st);
        }
        return sol;
    }
};

}  // namespace

GeodesicSolution connect(const IndexField& field, const Vec3& x_i_in, const Vec3& x_f_in, double ds,
                         const ConnectOptions& opts) {
    if (!(ds > 0)) throw UsageError("connect requires ds > 0");
    const int d = field.dim();
    const Vec3 x_i = masked(x_i_in, d), x_f = masked(x_f_in, d);
    field.profile(x_i);
    field.profile(x_f);
    const double L = (x_f - x_i).norm();
    if (L == 0.0) {
        GeodesicSolution sol;
        sol.field = field;
        sol.c = opts.c;
        sol.ds = ds;
        RayState st;
        st.x = x_i;
        sol.samples.push_back(st);
        return sol;
    }

    Shooter sh{field, x_i, (x_f - x_i) / L, {}, std::max<long>(1, std::lround(L / ds)), opts.c};
    if (d == 2) {
        sh.basis.push_back(Vec3(-sh.chord[1], sh.chord[0], 0.0));
    } else if (d == 3) {
        Vec3 helper = std::abs(sh.chord[0]) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
        const Vec3 e1 = sh.chord.cross(helper).normalized();
        sh.basis.push_back(e1);
        sh.basis.push_back(sh.chord.cross(e1).normalized());
    }

    const int m = d;  // d-1 transverse offsets + arc length
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
    u[m - 1] = L;
    if (opts.initial_direction) {
        const Vec3 dir = masked(*opts.initial_direction, d).normalized();
        const double along = dir.dot(sh.chord);
        if (!(along > 0)) throw UsageError("connect: initial direction must point towards x_f");
        for (size_t k = 0; k < sh.basis.size(); ++k) u[static_cast<Eigen::Index>(k)] = dir.dot(sh.basis[k]) / along;
    }

    auto miss = [&](const Eigen::VectorXd& v, Eigen::VectorXd* r) {
        try {
            const GeodesicSolution sol = sh.run(v);
            const Vec3 e = sol.samples.back().x - x_f;
            for (int a = 0; a < d; ++a) (*r)[a] = e[a];
            return true;
        } catch (const DomainError&) {
            return false;
        } catch (const TruncationError&) {
            return false;
        }
    };

    Eigen::VectorXd r(d), r_try(d), r_pert(d);
    if (!miss(u, &r)) throw NoConvergenceError("connect: initial shot leaves the medium", L);
    double best = r.norm();
    Eigen::VectorXd best_u = u;
    const double target = 1e-11 * L;
    for (int it = 0; it < opts.max_iter && best > target; ++it) {
        Eigen::MatrixXd J(d, m);
        for (int j = 0; j < m; ++j) {
            const double step = (j == m - 1 ? 1e-7 * L : 1e-7);
            Eigen::VectorXd up = u;
            up[j] += step;
            if (!miss(up, &r_pert)) {
                up[j] = u[j] - step;
                if (!miss(up, &r_pert)) throw NoConvergenceError("connect: Jacobian probe leaves the medium", best);
                J.col(j) = (r - r_pert) / step;
            } else {
                J.col(j) = (r_pert - r) / step;
            }
        }
        const Eigen::VectorXd delta = J.colPivHouseholderQr().solve(-r);
        double lambda = 1.0;
        bool improved = false;
        for (int k = 0; k < 30; ++k, lambda *= 0.5) {
            const Eigen::VectorXd trial = u + lambda * delta;
            if (miss(trial, &r_try) && r_try.norm() < r.norm()) {
                u = trial;
                r = r_try;
                improved = true;
                break;
            }
        }
        if (!improved) break;
        if (r.norm() < best) {
            best = r.norm();
            best_u = u;
        }
    }
    if (best > opts.tol * L) {
        std::ostringstream os;
        os << "connect: shooting did not converge (best miss " << best << ")";
        throw NoConvergenceError(os.str(), best);
    }
    return sh.run(best_u);
}

double optical_time(const GeodesicSolution& sol) {
    if (sol.samples.empty()) throw UsageError("optical_time of an empty solution");
    double T = 0.0;
    for (size_t k = 1; k < sol.samples.size(); ++k) {
        const Vec3& a = sol.samples[k - 1].x;
        const Vec3& b = sol.samples[k].x;
        T += sol.field.profile(0.5 * (a + b)) * (b - a).norm();
    }
    return T / sol.c;
}

void write_ray_csv(const std::string& path, const GeodesicSolution& sol) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open CSV for writing: " + path);
    out.precision(17);
    const int d = sol.field.dim();
    const char* xs[3] = {"x", "y", "z"};
    const char* ts[3] = {"tx", "ty", "tz"};
    out << "s";
    for (int a = 0; a < d; ++a) out << ',' << xs[a];
    for (int a = 0; a < d; ++a) out << ',' << ts[a];
    out << ",T_opt\n";
    for (const RayState& st : sol.samples) {
        out << st.s;
        for (int a = 0; a < d; ++a) out << ',' << st.x[a];
        for (int a = 0; a < d; ++a) out << ',' << st.t[a];
        out << ',' << st.T_opt << '\n';
    }
}

}  // namespace fermat
