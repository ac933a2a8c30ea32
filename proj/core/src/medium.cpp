#include "fermat/medium.hpp"

#include <cmath>
// Boost 1.74 pchip calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fermat {

std::string to_string(MediumKind kind) {
    switch (kind) {
        case MediumKind::homogeneous: return "homogeneous";
        case MediumKind::linear_stratified: return "linear-stratified";
        case MediumKind::parabolic_grin: return "parabolic-grin";
        case MediumKind::smooth_interface: return "smooth-interface";
        case MediumKind::user_grid: return "user-grid";
    }
    return "unknown";
}

namespace {

void check_dim(int dim) {
    if (dim < 1 || dim > 3) throw UsageError("dimension must be 1, 2 or 3, got " + std::to_string(dim));
}

void check_box(int dim, const Box& box) {
    for (int a = 0; a < dim; ++a)
        if (!(box.lo[a] < box.hi[a])) throw UsageError("empty bounding box along axis " + std::to_string(a));
}

std::string fmt_point(const Vec3& x, int dim) {
    std::ostringstream os;
    os << "(";
    for (int a = 0; a < dim; ++a) os << (a ? ", " : "") << x[a];
    os << ")";
    return os.str();
}

// Catmull-Rom weights and their derivatives for the four nodes i-1..i+2 at fraction t
void cubic_weights(double t, std::array<double, 4>& w, std::array<double, 4>& dw) {
    const double t2 = t * t, t3 = t2 * t;
    w = {0.5 * (-t3 + 2 * t2 - t), 0.5 * (3 * t3 - 5 * t2 + 2), 0.5 * (-3 * t3 + 4 * t2 + t), 0.5 * (t3 - t2)};
    dw = {0.5 * (-3 * t2 + 4 * t - 1), 0.5 * (9 * t2 - 10 * t), 0.5 * (-9 * t2 + 8 * t + 1), 0.5 * (3 * t2 - 2 * t)};
}

// node value, with one ghost layer filled by linear extrapolation (recursively for corners)
double node_value(const GridData& g, const std::array<int, 3>& stride, std::array<int, 3> j) {
    for (int a = 0; a < g.dim; ++a) {
        if (j[a] < 0 || j[a] > g.dims[a] - 1) {
            const bool low = j[a] < 0;
            std::array<int, 3> j1 = j, j2 = j;
            j1[a] = low ? 0 : g.dims[a] - 1;
            j2[a] = low ? 1 : g.dims[a] - 2;
            return 2.0 * node_value(g, stride, j1) - node_value(g, stride, j2);
        }
    }
    size_t off = 0;
    for (int b = 0; b < g.dim; ++b) off += static_cast<size_t>(j[b]) * stride[b];
    return g.values[off];
}

}  // namespace

void write_grid_file(const std::string& path, const GridData& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot open grid file for writing: " + path);
    std::ostringstream header;
    header.precision(17);
    header << "dims";
    for (int n : grid.dims) header << ' ' << n;
    header << " spacing " << grid.spacing << " origin";
    for (int a = 0; a < grid.dim; ++a) header << ' ' << grid.origin[a];
    header << '\n';
    out << header.str();
    // the format is little-endian; every supported target is little-endian
    out.write(reinterpret_cast<const char*>(grid.values.data()),
              static_cast<std::streamsize>(grid.values.size() * sizeof(double)));
}

GridData read_grid_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open grid file: " + path);
    std::string line;
    std::getline(in, line);
    std::istringstream hs(line);
    std::string tok;
    GridData g;
    std::vector<double> origin;
    std::string mode;
    while (hs >> tok) {
        if (tok == "dims" || tok == "spacing" || tok == "origin") {
            mode = tok;
            continue;
        }
        const double v = std::stod(tok);
        if (mode == "dims") g.dims.push_back(static_cast<int>(v));
        else if (mode == "spacing") g.spacing = v;
        else if (mode == "origin") origin.push_back(v);
        else throw UsageError("malformed grid header in " + path);
    }
    g.dim = static_cast<int>(g.dims.size());
    check_dim(g.dim);
    if (origin.size() != g.dims.size()) throw UsageError("grid header origin does not match dims in " + path);
    for (int a = 0; a < g.dim; ++a) g.origin[a] = origin[a];
    size_t count = 1;
    for (int n : g.dims) count *= static_cast<size_t>(n);
    g.values.resize(count);
    in.read(reinterpret_cast<char*>(g.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<size_t>(in.gcount()) != count * sizeof(double))
        throw UsageError("grid file " + path + " is truncated");
    return g;
}

struct Dispersion::Spline {
    boost::math::interpolators::pchip<std::vector<double>> f;
};

Dispersion::Dispersion(std::vector<double> omega, std::vector<double> n, double omega_ref)
    : omega_(std::move(omega)), n_(std::move(n)), omega_ref_(omega_ref) {
    if (omega_.size() != n_.size()) throw UsageError("dispersion table columns differ in length");
    if (omega_.size() < 4) throw UsageError("dispersion table needs at least 4 rows");
    for (size_t i = 1; i < omega_.size(); ++i)
        if (!(omega_[i] > omega_[i - 1])) throw UsageError("dispersion table omega must be strictly increasing");
    for (double v : n_)
        if (!(v > 0)) throw UsageError("dispersion table n must be positive");
    auto x = omega_;
    auto y = n_;
    spline_ = std::make_shared<Spline>(Spline{{std::move(x), std::move(y)}});
    if (omega_ref_ < omega_.front() || omega_ref_ > omega_.back())
        throw UsageError("dispersion reference frequency outside the table");
}

double Dispersion::interp(double omega) const {
    if (omega < omega_.front() || omega > omega_.back()) {
        std::ostringstream os;
        os << "frequency " << omega << " outside dispersion table [" << omega_.front() << ", " << omega_.back() << "]";
        throw DomainError(os.str());
    }
    return spline_->f(omega);
}

double Dispersion::factor(double omega) const { return interp(omega) / interp(omega_ref_); }

IndexField IndexField::homogeneous(int dim, double n0, Box box) {
    check_dim(dim);
    check_box(dim, box);
    if (!(n0 > 0)) throw DomainError("homogeneous index must be positive");
    IndexField f;
    f.kind_ = MediumKind::homogeneous;
    f.dim_ = dim;
    f.box_ = box;
    f.p_ = {n0};
    return f;
}

IndexField IndexField::linear_stratified(int dim, double n0, double g, int axis, Box box) {
    check_dim(dim);
    check_box(dim, box);
    if (axis < 0 || axis >= dim) throw UsageError("stratification axis out of range");
    IndexField f;
    f.kind_ = MediumKind::linear_stratified;
    f.dim_ = dim;
    f.box_ = box;
    f.p_ = {n0, g};
    f.axis_ = axis;
    return f;
}

IndexField IndexField::parabolic_grin(int dim, double n0, double alpha, int axis, Box box) {
    check_dim(dim);
    check_box(dim, box);
    if (axis < -1 || axis >= dim) throw UsageError("GRIN optical axis out of range");
    if (!(n0 > 0)) throw DomainError("GRIN on-axis index must be positive");
    IndexField f;
    f.kind_ = MediumKind::parabolic_grin;
    f.dim_ = dim;
    f.box_ = box;
    f.p_ = {n0, alpha};
    f.axis_ = axis;
    return f;
}

IndexField IndexField::smooth_interface(int dim, double n1, double n2, double width, int axis, double position,
                                        Box box) {
    check_dim(dim);
    check_box(dim, box);
    if (axis < 0 || axis >= dim) throw UsageError("interface axis out of range");
    if (!(n1 > 0) || !(n2 > 0)) throw DomainError("interface indices must be positive");
    if (!(width > 0)) throw UsageError("interface width must be positive");
    IndexField f;
    f.kind_ = MediumKind::smooth_interface;
    f.dim_ = dim;
    f.box_ = box;
    f.p_ = {n1, n2, width, position};
    f.axis_ = axis;
    return f;
}

IndexField IndexField::user_grid(GridData grid, bool cubic) {
    check_dim(grid.dim);
    if (static_cast<int>(grid.dims.size()) != grid.dim) throw UsageError("grid dims do not match dimension");
    size_t count = 1;
    for (int n : grid.dims) {
        if (n < (cubic ? 4 : 2)) throw UsageError("grid needs at least " + std::to_string(cubic ? 4 : 2) + " nodes per axis");
        count *= static_cast<size_t>(n);
    }
    if (grid.values.size() != count) throw UsageError("grid value count does not match dims");
    if (!(grid.spacing > 0)) throw UsageError("grid spacing must be positive");
    for (double v : grid.values)
        if (!(v > 0)) throw DomainError("grid index values must be positive");
    IndexField f;
    f.kind_ = MediumKind::user_grid;
    f.dim_ = grid.dim;
    for (int a = 0; a < grid.dim; ++a) {
        f.box_.lo[a] = grid.origin[a];
        f.box_.hi[a] = grid.origin[a] + grid.spacing * (grid.dims[a] - 1);
    }
    f.p_ = {};
    f.cubic_ = cubic;
    f.grid_ = std::make_shared<const GridData>(std::move(grid));
    return f;
}

IndexField IndexField::scaled(double kappa) const {
    if (!(kappa > 0)) throw UsageError("index scale factor must be positive");
    IndexField f = *this;
    f.scale_ *= kappa;
    return f;
}

IndexField IndexField::with_dispersion(Dispersion dispersion) const {
    IndexField f = *this;
    f.dispersion_ = std::move(dispersion);
    return f;
}

bool IndexField::contains(const Vec3& x) const {
    for (int a = 0; a < dim_; ++a)
        if (!(x[a] >= box_.lo[a] && x[a] <= box_.hi[a])) return false;
    return true;
}

void IndexField::check_inside(const Vec3& x) const {
    if (!contains(x)) throw DomainError("point " + fmt_point(x, dim_) + " outside the medium bounding box");
}

double IndexField::grid_value(const Vec3& x, Vec3* grad) const {
    const GridData& g = *grid_;
    const int d = g.dim;
    std::array<int, 3> cell{0, 0, 0};
    std::array<double, 3> t{0, 0, 0};
    for (int a = 0; a < d; ++a) {
        double u = (x[a] - g.origin[a]) / g.spacing;
        const double r = std::round(u);
        if (std::abs(u - r) < 1e-10) u = r;
        int i = static_cast<int>(std::floor(u));
        i = std::clamp(i, 0, g.dims[a] - 2);
        cell[a] = i;
        t[a] = u - i;
    }
    std::array<int, 3> stride{1, 1, 1};
    for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * g.dims[a + 1];

    auto node = [&](const std::array<int, 3>& idx) { return node_value(g, stride, idx); };

    double value = 0.0;
    Vec3 gr = Vec3::Zero();
    if (!cubic_) {
        const int corners = 1 << d;
        for (int c = 0; c < corners; ++c) {
            std::array<int, 3> idx{0, 0, 0};
            std::array<double, 3> w{1, 1, 1}, dw{0, 0, 0};
            for (int a = 0; a < d; ++a) {
                const int bit = (c >> a) & 1;
                idx[a] = cell[a] + bit;
                w[a] = bit ? t[a] : 1.0 - t[a];
                dw[a] = (bit ? 1.0 : -1.0) / g.spacing;
            }
            const double v = node(idx);
            double prod = 1.0;
            for (int a = 0; a < d; ++a) prod *= w[a];
            value += prod * v;
            if (grad) {
                for (int a = 0; a < d; ++a) {
                    double p = dw[a];
                    for (int b = 0; b < d; ++b)
                        if (b != a) p *= w[b];
                    gr[a] += p * v;
                }
            }
        }
    } else {
        std::array<std::array<double, 4>, 3> w{}, dw{};
        for (int a = 0; a < d; ++a) cubic_weights(t[a], w[a], dw[a]);
        int corners = 1;
        for (int a = 0; a < d; ++a) corners *= 4;
        for (int c = 0; c < corners; ++c) {
            std::array<int, 3> idx{0, 0, 0}, k{0, 0, 0};
            int rem = c;
            for (int a = 0; a < d; ++a) {
                k[a] = rem % 4;
                rem /= 4;
                idx[a] = cell[a] - 1 + k[a];
            }
            const double v = node(idx);
            double prod = 1.0;
            for (int a = 0; a < d; ++a) prod *= w[a][k[a]];
            value += prod * v;
            if (grad) {
                for (int a = 0; a < d; ++a) {
                    double p = dw[a][k[a]] / g.spacing;
                    for (int b = 0; b < d; ++b)
                        if (b != a) p *= w[b][k[b]];
                    gr[a] += p * v;
                }
            }
        }
    }
    if (grad) *grad = gr;
    return value;
}

double IndexField::base_index(const Vec3& x) const {
    check_inside(x);
    double n = 0.0;
    switch (kind_) {
        case MediumKind::homogeneous: n = p_[0]; break;
        case MediumKind::linear_stratified: n = p_[0] + p_[1] * x[axis_]; break;
        case MediumKind::parabolic_grin: {
            double rho2 = 0.0;
            for (int a = 0; a < dim_; ++a)
                if (a != axis_) rho2 += x[a] * x[a];
            const double n2 = p_[0] * p_[0] * (1.0 - p_[1] * p_[1] * rho2);
            if (!(n2 > 0))
                throw DomainError("GRIN profile has n^2 <= 0 at " + fmt_point(x, dim_));
            n = std::sqrt(n2);
            break;
        }
        case MediumKind::smooth_interface:
            n = 0.5 * (p_[0] + p_[1]) + 0.5 * (p_[1] - p_[0]) * std::tanh((x[axis_] - p_[3]) / p_[2]);
            break;
        case MediumKind::user_grid: n = grid_value(x, nullptr); break;
    }
    n *= scale_;
    if (!(n > 0)) throw DomainError("refractive index is not positive at " + fmt_point(x, dim_));
    return n;
}

Vec3 IndexField::base_grad(const Vec3& x) const {
    check_inside(x);
    Vec3 g = Vec3::Zero();
    switch (kind_) {
        case MediumKind::homogeneous: break;
        case MediumKind::linear_stratified: g[axis_] = p_[1]; break;
        case MediumKind::parabolic_grin: {
            const double n = base_index(x) / scale_;
            for (int a = 0; a < dim_; ++a)
                if (a != axis_) g[a] = -p_[0] * p_[0] * p_[1] * p_[1] * x[a] / n;
            break;
        }
        case MediumKind::smooth_interface: {
            const double th = std::tanh((x[axis_] - p_[3]) / p_[2]);
            g[axis_] = 0.5 * (p_[1] - p_[0]) * (1.0 - th * th) / p_[2];
            break;
        }
        case MediumKind::user_grid: {
            const double h = grid_->spacing;
            for (int a = 0; a < dim_; ++a)
                if (x[a] < box_.lo[a] + h || x[a] > box_.hi[a] - h)
                    throw DomainError("gradient at " + fmt_point(x, dim_) + " violates the one-cell grid margin");
            grid_value(x, &g);
            break;
        }
    }
    return scale_ * g;
}

double IndexField::index(const Vec3& x) const {
    if (dispersive()) throw UsageError("dispersive field requires a frequency");
    return base_index(x);
}

double IndexField::index(const Vec3& x, std::optional<double> omega) const {
    if (dispersive() && !omega) throw UsageError("dispersive field requires a frequency");
    if (!dispersive() && omega) throw UsageError("frequency given for a non-dispersive field");
    if (omega) return base_index(x) * dispersion_->factor(*omega);
    return base_index(x);
}

double IndexField::index_at(const Vec3& x, double omega) const {
    if (dispersive()) return base_index(x) * dispersion_->factor(omega);
    return base_index(x);
}

Vec3 IndexField::grad(const Vec3& x) const { return base_grad(x); }

double IndexField::potential(const Vec3& x, double omega, double c) const {
    const double n = index_at(x, omega);
    return (1.0 - n * n) * omega * omega / (c * c);
}

std::optional<double> IndexField::constant_index() const {
    if (kind_ == MediumKind::homogeneous) return p_[0] * scale_;
    return std::nullopt;
}

double eval_index(const IndexField& field, const Vec3& x, std::optional<double> omega) {
    return field.index(x, omega);
}

Vec3 eval_grad(const IndexField& field, const Vec3& x) { return field.grad(x); }

double eval_potential(const IndexField& field, const Vec3& x, double omega, double c) {
    return field.potential(x, omega, c);
}

}  // namespace fermat
