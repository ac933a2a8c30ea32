#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fermat/medium.hpp"

namespace fermat {

struct PathPolyline {
    std::vector<Vec3> vertices;
};

// sum over segments of n(midpoint) |dx| / c
double path_time(const IndexField& field, const PathPolyline& p, double c = 1.0);

// gradient of path_time with respect to every vertex (endpoint rows included)
std::vector<Vec3> path_time_gradient(const IndexField& field, const PathPolyline& p, double c = 1.0);

struct MinimizeOptions {
    double c = 1.0;
    int max_iter = 20000;
    double grad_tol = 1e-10;  // relative to n_max / c
    std::optional<PathPolyline> init;
};

struct MinimizeReport {
    int iterations = 0;
    double gradient_norm = 0.0;  // inf-norm of the constrained gradient
    double time = 0.0;
    std::vector<double> history;  // path_time of every accepted iterate
};

class MinimizeError : public NoConvergenceError {
public:
    MinimizeError(const std::string& what, PathPolyline last, double gradient_norm)
        : NoConvergenceError(what, gradient_norm), last_(std::move(last)) {}
    const PathPolyline& last_iterate() const { return last_; }
    double gradient_norm() const { return residual(); }

private:
    PathPolyline last_;
};

// Local minimizer of path_time with M vertices. Interior vertex j moves in the plane normal to the chord
// at fraction j/(M-1) along it; preconditioned Polak-Ribiere CG with a line search on the directional derivative.
PathPolyline minimize_path(const IndexField& field, const Vec3& x_i, const Vec3& x_f, int M,
                           const MinimizeOptions& opts = {}, MinimizeReport* report = nullptr);

void write_polyline_csv(const std::string& path, const PathPolyline& p, int dim);
PathPolyline read_polyline_csv(const std::string& path);

}  // namespace fermat
