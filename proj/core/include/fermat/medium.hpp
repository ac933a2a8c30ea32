#pragma once

#include <Eigen/Core>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fermat/errors.hpp"

namespace fermat {

// Positions are always 3-vectors; components at or beyond the field dimension are ignored.
using Vec3 = Eigen::Vector3d;

struct Box {
    Vec3 lo = Vec3::Constant(-10.0);
    Vec3 hi = Vec3::Constant(10.0);
};

enum class MediumKind { homogeneous, linear_stratified, parabolic_grin, smooth_interface, user_grid };

std::string to_string(MediumKind kind);

// Regularly sampled node values, row-major with the last axis fastest.
struct GridData {
    int dim = 1;
    std::vector<int> dims;
    double spacing = 1.0;
    Vec3 origin = Vec3::Zero();
    std::vector<double> values;
};

// Writes/reads the flat binary grid format: one text header line
// "dims <n0> [n1 [n2]] spacing <h> origin <o0> [o1 [o2]]" followed by little-endian float64 values.
void write_grid_file(const std::string& path, const GridData& grid);
GridData read_grid_file(const std::string& path);

// Tabulated n_disp(omega) with monotone piecewise-cubic interpolation.
class Dispersion {
public:
    Dispersion(std::vector<double> omega, std::vector<double> n, double omega_ref);
    double factor(double omega) const;  // n_disp(omega) / n_disp(omega_ref)
    double omega_min() const { return omega_.front(); }
    double omega_max() const { return omega_.back(); }
    double omega_ref() const { return omega_ref_; }
    const std::vector<double>& omega() const { return omega_; }
    const std::vector<double>& n() const { return n_; }

private:
    double interp(double omega) const;
    std::vector<double> omega_, n_;
    double omega_ref_;
    struct Spline;
    std::shared_ptr<const Spline> spline_;
};

class IndexField {
public:
    static IndexField homogeneous(int dim, double n0, Box box = {});
    // n = n0 + g * x[axis]
    static IndexField linear_stratified(int dim, double n0, double g, int axis = 1, Box box = {});
    // n^2 = n0^2 (1 - alpha^2 |x_perp|^2), x_perp excludes the optical axis; axis = -1 makes every coordinate transverse
    static IndexField parabolic_grin(int dim, double n0, double alpha, int axis, Box box = {});
    // n = (n1 + n2)/2 + (n2 - n1)/2 * tanh((x[axis] - position) / width)
    static IndexField smooth_interface(int dim, double n1, double n2, double width, int axis = 0,
                                       double position = 0.0, Box box = {});
    static IndexField user_grid(GridData grid, bool cubic = false);

    IndexField scaled(double kappa) const;
    IndexField with_dispersion(Dispersion dispersion) const;

    MediumKind kind() const { return kind_; }
    int dim() const { return dim_; }
    const Box& box() const { return box_; }
    bool dispersive() const { return dispersion_.has_value(); }
    const std::optional<Dispersion>& dispersion() const { return dispersion_; }

    bool contains(const Vec3& x) const;

    // n(x); throws UsageError for dispersive fields
    double index(const Vec3& x) const;
    // n(x, omega); omega is required exactly when the field is dispersive
    double index(const Vec3& x, std::optional<double> omega) const;
    // n(x, omega) when dispersive, n(x) otherwise
    double index_at(const Vec3& x, double omega) const;
    // n(x) ignoring any dispersion factor (the spatial profile)
    double profile(const Vec3& x) const { return base_index(x); }
    // gradient of the non-dispersive profile n(x)
    Vec3 grad(const Vec3& x) const;
    double potential(const Vec3& x, double omega, double c = 1.0) const;

    // Homogeneous fields report their constant, others nullopt.
    std::optional<double> constant_index() const;

    // parameter access for serialization
    double n0() const { return p_[0]; }
    const std::vector<double>& params() const { return p_; }
    int axis() const { return axis_; }
    const GridData* grid() const { return grid_.get(); }
    bool cubic() const { return cubic_; }

private:
    double base_index(const Vec3& x) const;
    Vec3 base_grad(const Vec3& x) const;
    double grid_value(const Vec3& x, Vec3* grad) const;
    void check_inside(const Vec3& x) const;

    MediumKind kind_ = MediumKind::homogeneous;
    int dim_ = 1;
    Box box_;
    std::vector<double> p_;
    int axis_ = 0;
    double scale_ = 1.0;
    std::shared_ptr<const GridData> grid_;
    bool cubic_ = false;
    std::optional<Dispersion> dispersion_;
};

double eval_index(const IndexField& field, const Vec3& x, std::optional<double> omega = std::nullopt);
Vec3 eval_grad(const IndexField& field, const Vec3& x);
double eval_potential(const IndexField& field, const Vec3& x, double omega, double c = 1.0);

}  // namespace fermat
