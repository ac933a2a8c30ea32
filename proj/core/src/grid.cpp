#include "fermat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fermat {

size_t GridSpec::size() const {
    size_t s = 1;
    for (int a = 0; a < dim; ++a) s *= static_cast<size_t>(n[a]);
    return s;
}

std::array<int, 3> GridSpec::unflatten(size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % static_cast<size_t>(n[a]));
        flat /= static_cast<size_t>(n[a]);
    }
    return idx;
}

size_t GridSpec::flatten(const std::array<int, 3>& idx) const {
    size_t flat = 0;
    for (int a = 0; a < dim; ++a) flat = flat * static_cast<size_t>(n[a]) + static_cast<size_t>(idx[a]);
    return flat;
}

Vec3 GridSpec::node(size_t flat) const {
    const auto idx = unflatten(flat);
    Vec3 x = Vec3::Zero();
    for (int a = 0; a < dim; ++a) x[a] = origin[a] + h * idx[a];
    return x;
}

std::array<int, 3> GridSpec::nearest(const Vec3& x, bool* exact) const {
    std::array<int, 3> idx{0, 0, 0};
    bool ok = true;
    for (int a = 0; a < dim; ++a) {
        const double u = (x[a] - origin[a]) / h;
        const double r = std::round(u);
        if (std::abs(u - r) > 1e-9) ok = false;
        if (r < 0 || r > n[a] - 1) ok = false;
        idx[a] = static_cast<int>(std::clamp(r, 0.0, static_cast<double>(n[a] - 1)));
    }
    if (exact) *exact = ok;
    return idx;
}

double GridSpec::cell_volume() const { return std::pow(h, dim); }

bool GridSpec::same_as(const GridSpec& o) const {
    if (dim != o.dim || std::abs(h - o.h) > 1e-12 * h) return false;
    for (int a = 0; a < dim; ++a)
        if (n[a] != o.n[a] || std::abs(origin[a] - o.origin[a]) > 1e-9 * h) return false;
    return true;
}

GridSpec GridSpec::centered(int dim, int n, double h, const Vec3& center) {
    GridSpec g;
    g.dim = dim;
    g.h = h;
    for (int a = 0; a < dim; ++a) {
        g.n[a] = n;
        g.origin[a] = center[a] - h * (n / 2);
    }
    return g;
}

namespace {

std::string header_line(const ComplexGrid& g) {
    std::ostringstream os;
    os.precision(17);
    os << "dims";
    for (int a = 0; a < g.spec.dim; ++a) os << ' ' << g.spec.n[a];
    os << " spacing " << g.spec.h << " origin";
    for (int a = 0; a < g.spec.dim; ++a) os << ' ' << g.spec.origin[a];
    os << " omega " << g.omega << " eps " << g.eps << " S " << g.S << " source " << g.source_index << '\n';
    return os.str();
}

}  // namespace

void write_kernel_file(const std::string& path, const ComplexGrid& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot open kernel file for writing: " + path);
    out << header_line(grid);
    out.write(reinterpret_cast<const char*>(grid.values.data()),
              static_cast<std::streamsize>(grid.values.size() * sizeof(cdouble)));
}

ComplexGrid read_kernel_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open kernel file: " + path);
    std::string line;
    std::getline(in, line);
    std::istringstream hs(line);
    std::string tok, mode;
    ComplexGrid g;
    std::vector<int> dims;
    std::vector<double> origin;
    while (hs >> tok) {
        if (tok == "dims" || tok == "spacing" || tok == "origin" || tok == "omega" || tok == "eps" || tok == "S" ||
            tok == "source") {
            mode = tok;
            continue;
        }
        const double v = std::stod(tok);
        if (mode == "dims") dims.push_back(static_cast<int>(v));
        else if (mode == "spacing") g.spec.h = v;
        else if (mode == "origin") origin.push_back(v);
        else if (mode == "omega") g.omega = v;
        else if (mode == "eps") g.eps = v;
        else if (mode == "S") g.S = v;
        else if (mode == "source") g.source_index = static_cast<long>(v);
        else throw UsageError("malformed kernel header in " + path);
    }
    if (dims.empty() || dims.size() > 3 || origin.size() != dims.size())
        throw UsageError("malformed kernel header in " + path);
    g.spec.dim = static_cast<int>(dims.size());
    for (int a = 0; a < g.spec.dim; ++a) {
        g.spec.n[a] = dims[a];
        g.spec.origin[a] = origin[a];
    }
    g.values.resize(g.spec.size());
    in.read(reinterpret_cast<char*>(g.values.data()), static_cast<std::streamsize>(g.values.size() * sizeof(cdouble)));
    if (static_cast<size_t>(in.gcount()) != g.values.size() * sizeof(cdouble))
        throw UsageError("kernel file " + path + " is truncated");
    return g;
}

void write_kernel_csv(const std::string& path, const ComplexGrid& grid) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open CSV for writing: " + path);
    out.precision(17);
    const char* names[3] = {"x", "y", "z"};
    for (int a = 0; a < grid.spec.dim; ++a) out << names[a] << ',';
    out << "re,im,abs\n";
    for (size_t i = 0; i < grid.values.size(); ++i) {
        const Vec3 x = grid.spec.node(i);
        for (int a = 0; a < grid.spec.dim; ++a) out << x[a] << ',';
        out << grid.values[i].real() << ',' << grid.values[i].imag() << ',' << std::abs(grid.values[i]) << '\n';
    }
}

}  // namespace fermat
