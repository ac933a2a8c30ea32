#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fermat/medium.hpp"

namespace fermat {

// Position, unit tangent dx/ds, arc length and accumulated optical time int n ds / c.
// Dispersive fields are traced with their spatial profile n(x).
struct RayState {
    Vec3 x = Vec3::Zero();
    Vec3 t = Vec3::UnitX();
    double s = 0.0;
    double T_opt = 0.0;
};

// A step left the medium box; boundary() is the state at the exit point (found by bisection on the step).
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, RayState boundary) : Error(what), boundary_(boundary) {}
    const RayState& boundary() const { return boundary_; }

private:
    RayState boundary_;
};

struct GeodesicSolution {
    std::vector<RayState> samples;
    IndexField field;
    double ds = 0.0;
    double c = 1.0;
    bool exited = false;  // last sample is the domain-exit point (shorter final step)
};

struct ChristoffelTensor {
    int dim = 3;
    // g[i][j][k] = Gamma^i_jk
    std::array<std::array<std::array<double, 3>, 3>, 3> g{};
};

// (1/n) [grad n - (grad n . t) t]
Vec3 ray_acceleration(const IndexField& field, const Vec3& x, const Vec3& t);

// One RK4 step of (x, t) with tangent renormalization; T_opt advances by n(chord midpoint) ds / c.
RayState step_ray(const IndexField& field, const RayState& state, double ds, double c = 1.0);

GeodesicSolution trace_ray(const IndexField& field, const RayState& init, double s_max, double ds, double c = 1.0);

ChristoffelTensor christoffel(const IndexField& field, const Vec3& x);

// max over samples of |d2x/dsb2 + Gamma (dx/dsb)(dx/dsb)|_inf with dsb = (n/c) ds, by 5-point differences
double geodesic_residual(const GeodesicSolution& sol);

struct ConnectOptions {
    double c = 1.0;
    int max_iter = 50;
    double tol = 1e-6;  // terminal miss relative to |x_f - x_i|
    std::optional<Vec3> initial_direction;
};

// Shooting on launch direction and arc length, Newton with a finite-difference Jacobian.
GeodesicSolution connect(const IndexField& field, const Vec3& x_i, const Vec3& x_f, double ds,
                         const ConnectOptions& opts = {});

// composite midpoint rule of int n ds / c over the sample polyline
double optical_time(const GeodesicSolution& sol);

// s, x..., t..., T_opt per sample
void write_ray_csv(const std::string& path, const GeodesicSolution& sol);

}  // namespace fermat
