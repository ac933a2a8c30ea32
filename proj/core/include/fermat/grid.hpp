#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "fermat/medium.hpp"

namespace fermat {

using cdouble = std::complex<double>;

// Uniform node lattice: node i sits at origin + i*h along each axis; last axis fastest in memory.
struct GridSpec {
    int dim = 1;
    std::array<int, 3> n{1, 1, 1};
    double h = 1.0;
    Vec3 origin = Vec3::Zero();

    size_t size() const;
    Vec3 node(size_t flat) const;
    std::array<int, 3> unflatten(size_t flat) const;
    size_t flatten(const std::array<int, 3>& idx) const;
    // nearest node to x, and whether x coincides with it to 1e-9 h
    std::array<int, 3> nearest(const Vec3& x, bool* exact = nullptr) const;
    double cell_volume() const;
    bool same_as(const GridSpec& other) const;

    // dim-dimensional grid with n points per axis, centred on `center`
    static GridSpec centered(int dim, int n, double h, const Vec3& center = Vec3::Zero());
};

// Complex field on a grid plus the metadata written to kernel files.
struct ComplexGrid {
    GridSpec spec;
    std::vector<cdouble> values;
    double omega = 0.0;
    double eps = 0.0;
    double S = 0.0;
    long source_index = -1;  // flat index of the flagged source cell, -1 if none

    ComplexGrid() = default;
    explicit ComplexGrid(const GridSpec& s) : spec(s), values(s.size(), cdouble(0.0, 0.0)) {}
    cdouble& operator[](size_t i) { return values[i]; }
    const cdouble& operator[](size_t i) const { return values[i]; }
};

// Flat binary kernel format: text header line with dims, spacing, origin, omega, eps, S, source,
// then little-endian complex128 values.
void write_kernel_file(const std::string& path, const ComplexGrid& grid);
ComplexGrid read_kernel_file(const std::string& path);
// one row per node: x..., re, im, abs
void write_kernel_csv(const std::string& path, const ComplexGrid& grid);

}  // namespace fermat
