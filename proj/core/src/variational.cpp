#include "fermat/variational.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace fermat {

double path_time(const IndexField& field, const PathPolyline& p, double c) {
    double T = 0.0;
    for (size_t k = 0; k < p.vertices.size(); ++k) {
        if (!field.contains(p.vertices[k])) throw DomainError("polyline vertex outside the medium");
    }
    for (size_t k = 1; k < p.vertices.size(); ++k) {
        const Vec3& a = p.vertices[k - 1];
        const Vec3& b = p.vertices[k];
        T += field.profile(0.5 * (a + b)) * (b - a).norm();
    }
    return T / c;
}

std::vector<Vec3> path_time_gradient(const IndexField& field, const PathPolyline& p, double c) {
    std::vector<Vec3> g(p.vertices.size(), Vec3::Zero());
    for (size_t j = 0; j + 1 < p.vertices.size(); ++j) {
        const Vec3& a = p.vertices[j];
        const Vec3& b = p.vertices[j + 1];
        const Vec3 m = 0.5 * (a + b);
        const double L = (b - a).norm();
        const double n = field.profile(m);
        const Vec3 half = 0.5 * L * field.grad(m);
        const Vec3 u = L > 0 ? Vec3((b - a) / L) : Vec3::Zero();
        g[j] += (half - n * u) / c;
        g[j + 1] += (half + n * u) / c;
    }
    return g;
}

namespace {

class ChordProblem {
public:
    ChordProblem(const IndexField& field, const Vec3& x_i, const Vec3& x_f, int M, double c)
        : field_(field), x_i_(x_i), x_f_(x_f), M_(M), c_(c) {
        const int d = field.dim();
        const Vec3 chord = (x_f - x_i).normalized();
        if (d == 2) {
            basis_.push_back(Vec3(-chord[1], chord[0], 0.0));
        } else if (d == 3) {
            const Vec3 helper = std::abs(chord[0]) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
            const Vec3 e1 = chord.cross(helper).normalized();
            basis_.push_back(e1);
            basis_.push_back(chord.cross(e1).normalized());
        }
    }

    int rows() const { return M_ - 2; }
    int cols() const { return static_cast<int>(basis_.size()); }
    const std::vector<Vec3>& basis() const { return basis_; }

    PathPolyline polyline(const Eigen::MatrixXd& U) const {
        PathPolyline p;
        p.vertices.resize(static_cast<size_t>(M_));
        for (int j = 0; j < M_; ++j) {
            Vec3 v = x_i_ + (static_cast<double>(j) / (M_ - 1)) * (x_f_ - x_i_);
            if (j > 0 && j < M_ - 1)
                for (int k = 0; k < cols(); ++k) v += U(j - 1, k) * basis_[static_cast<size_t>(k)];
            p.vertices[static_cast<size_t>(j)] = v;
        }
        p.vertices.front() = x_i_;
        p.vertices.back() = x_f_;
        return p;
    }

    Eigen::MatrixXd offsets(const PathPolyline& p) const {
        Eigen::MatrixXd U(rows(), cols());
        for (int j = 1; j < M_ - 1; ++j)
            for (int k = 0; k < cols(); ++k)
                U(j - 1, k) = (p.vertices[static_cast<size_t>(j)] - x_i_).dot(basis_[static_cast<size_t>(k)]);
        return U;
    }

    // value and constrained gradient; DomainError if a vertex leaves the medium
    double eval(const Eigen::MatrixXd& U, Eigen::MatrixXd* G) const {
        const PathPolyline p = polyline(U);
        const double T = path_time(field_, p, c_);
        if (G) {
            const std::vector<Vec3> g = path_time_gradient(field_, p, c_);
            G->resize(rows(), cols());
            for (int j = 1; j < M_ - 1; ++j)
                for (int k = 0; k < cols(); ++k)
                    (*G)(j - 1, k) = g[static_cast<size_t>(j)].dot(basis_[static_cast<size_t>(k)]);
        }
        return T;
    }

    double n_max(const Eigen::MatrixXd& U) const {
        const PathPolyline p = polyline(U);
        double n = 0.0;
        for (const Vec3& v : p.vertices) n = std::max(n, field_.profile(v));
        return n;
    }

private:
    const IndexField& field_;
    Vec3 x_i_, x_f_;
    int M_;
    double c_;
    std::vector<Vec3> basis_;
};

// z = P^{-1} g with P = scale * tridiag(-1, 2, -1) per column (Thomas algorithm)
Eigen::MatrixXd precondition(const Eigen::MatrixXd& g, double scale) {
    const Eigen::Index m = g.rows();
    Eigen::MatrixXd z(g.rows(), g.cols());
    std::vector<double> cp(static_cast<size_t>(m));
    std::vector<double> dp(static_cast<size_t>(m));
    for (Eigen::Index col = 0; col < g.cols(); ++col) {
        double denom = 2.0;
        cp[0] = -1.0 / denom;
        dp[0] = g(0, col) / denom;
        for (Eigen::Index i = 1; i < m; ++i) {
            denom = 2.0 + cp[static_cast<size_t>(i - 1)];
            cp[static_cast<size_t>(i)] = -1.0 / denom;
            dp[static_cast<size_t>(i)] = (g(i, col) + dp[static_cast<size_t>(i - 1)]) / denom;
        }
        z(m - 1, col) = dp[static_cast<size_t>(m - 1)];
        for (Eigen::Index i = m - 2; i >= 0; --i)
            z(i, col) = dp[static_cast<size_t>(i)] - cp[static_cast<size_t>(i)] * z(i + 1, col);
    }
    return z / scale;
}

struct LineResult {
    bool ok = false;
    double alpha = 0.0;
    double f = 0.0;
    Eigen::MatrixXd g;
};

LineResult line_search(const ChordProblem& prob, const Eigen::MatrixXd& U, double f0, const Eigen::MatrixXd& g0,
                       const Eigen::MatrixXd& D) {
    const double dphi0 = (g0.array() * D.array()).sum();
    const double slack = 1e-14 * std::abs(f0);
    LineResult res;
    if (!(dphi0 < 0)) return res;
    double lo = 0.0, dlo = dphi0;
    double hi = std::numeric_limits<double>::infinity(), dhi = 0.0;
    double alpha = 1.0;
    LineResult best;
    for (int it = 0; it < 60; ++it) {
        Eigen::MatrixXd g;
        double f;
        try {
            f = prob.eval(U + alpha * D, &g);
        } catch (const DomainError&) {
            hi = alpha;
            dhi = std::numeric_limits<double>::quiet_NaN();
            alpha = 0.5 * (lo + hi);
            continue;
        }
        const double dphi = (g.array() * D.array()).sum();
        const bool decrease = f <= f0 + 1e-4 * alpha * dphi0 + slack;
        if (decrease && std::abs(dphi) <= 0.1 * std::abs(dphi0)) {
            res.ok = true;
            res.alpha = alpha;
            res.f = f;
            res.g = std::move(g);
            return res;
        }
        if (decrease && f <= f0 + slack && (!best.ok || f < best.f)) {
            best.ok = true;
            best.alpha = alpha;
            best.f = f;
            best.g = g;
        }
        if (!decrease || dphi > 0) {
            hi = alpha;
            dhi = dphi;
        } else {
            lo = alpha;
            dlo = dphi;
        }
        if (std::isinf(hi)) {
            alpha *= 2.0;
            continue;
        }
        double next = 0.5 * (lo + hi);
        if (std::isfinite(dhi) && dhi > 0 && dlo < 0) next = lo - dlo * (hi - lo) / (dhi - dlo);
        const double w = hi - lo;
        alpha = std::clamp(next, lo + 0.1 * w, hi - 0.1 * w);
        if (w <= 1e-16 * std::max(1.0, hi)) break;
    }
    return best;
}

}  // namespace

PathPolyline minimize_path(const IndexField& field, const Vec3& x_i, const Vec3& x_f, int M,
                           const MinimizeOptions& opts, MinimizeReport* report) {
    if (M < 3) throw UsageError("minimize_path needs at least 3 vertices");
    if (!field.contains(x_i) || !field.contains(x_f)) throw DomainError("path endpoint outside the medium");
    const int d = field.dim();
    Vec3 a = Vec3::Zero(), b = Vec3::Zero();
    for (int k = 0; k < d; ++k) {
        a[k] = x_i[k];
        b[k] = x_f[k];
    }
    MinimizeReport local;
    MinimizeReport& rep = report ? *report : local;
    rep = MinimizeReport{};

    if ((b - a).norm() == 0.0) {
        PathPolyline p;
        p.vertices.assign(static_cast<size_t>(M), a);
        return p;
    }

    ChordProblem prob(field, a, b, M, opts.c);
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(prob.rows(), prob.cols());
    if (opts.init) {
        if (static_cast<int>(opts.init->vertices.size()) != M)
            throw UsageError("initial polyline has the wrong vertex count");
        U = prob.offsets(*opts.init);
    }
    if (prob.cols() == 0) {
        rep.time = prob.eval(U, nullptr);
        rep.history.push_back(rep.time);
        return prob.polyline(U);
    }

    Eigen::MatrixXd g;
    double f = prob.eval(U, &g);
    rep.history.push_back(f);
    const double L = (b - a).norm();
    const double ell = L / (M - 1);
    const double scale = prob.n_max(U) / (ell * opts.c);
    Eigen::MatrixXd z = precondition(g, scale);
    Eigen::MatrixXd D = -z;
    double gnorm = g.cwiseAbs().maxCoeff();
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        const double tol = opts.grad_tol * prob.n_max(U) / opts.c;
        if (gnorm < tol) break;
        LineResult ls = line_search(prob, U, f, g, D);
        if (!ls.ok) {
            D = -z;
            ls = line_search(prob, U, f, g, D);
            if (!ls.ok) break;
        }
        U += ls.alpha * D;
        const Eigen::MatrixXd g_old = g;
        const Eigen::MatrixXd z_old = z;
        f = ls.f;
        g = std::move(ls.g);
        rep.history.push_back(f);
        z = precondition(g, scale);
        gnorm = g.cwiseAbs().maxCoeff();
        const double denom = (z_old.array() * g_old.array()).sum();
        double beta = denom > 0 ? (z.array() * (g - g_old).array()).sum() / denom : 0.0;
        beta = std::max(0.0, beta);
        D = -z + beta * D;
        if ((D.array() * g.array()).sum() >= 0) D = -z;
    }
    rep.iterations = it;
    rep.gradient_norm = gnorm;
    rep.time = f;
    const PathPolyline out = prob.polyline(U);
    if (!(gnorm < opts.grad_tol * prob.n_max(U) / opts.c)) {
        std::ostringstream os;
        os << "minimize_path: gradient norm " << gnorm << " after " << it << " iterations";
        throw MinimizeError(os.str(), out, gnorm);
    }
    return out;
}

void write_polyline_csv(const std::string& path, const PathPolyline& p, int dim) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open CSV for writing: " + path);
    out.precision(17);
    const char* names[3] = {"x", "y", "z"};
    for (int a = 0; a < dim; ++a) out << (a ? "," : "") << names[a];
    out << '\n';
    for (const Vec3& v : p.vertices) {
        for (int a = 0; a < dim; ++a) out << (a ? "," : "") << v[a];
        out << '\n';
    }
}

PathPolyline read_polyline_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open polyline CSV: " + path);
    std::string line;
    std::getline(in, line);  // header
    PathPolyline p;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        Vec3 v = Vec3::Zero();
        int a = 0;
        while (std::getline(ss, cell, ',')) {
            if (a >= 3) throw UsageError(path + ":" + std::to_string(lineno) + ": more than 3 columns");
            try {
                v[a++] = std::stod(cell);
            } catch (const std::exception&) {
                throw UsageError(path + ":" + std::to_string(lineno) + ": not a number: " + cell);
            }
        }
        p.vertices.push_back(v);
    }
    return p;
}

}  // namespace fermat
