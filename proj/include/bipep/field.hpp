#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bipep/errors.hpp"
#include "bipep/grid.hpp"

namespace bipep {

/// Real nodal values, one per grid node (row-major, axis 0 slowest).
class ScalarField {
  public:
    ScalarField() = default;
    explicit ScalarField(GridPtr grid)
        : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}
    ScalarField(GridPtr grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_->size())
            throw ShapeError("nodal value count does not match grid size");
    }

    const GridPtr& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    ScalarField& operator+=(const ScalarField& other) {
        check_compatible(other);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& other) {
        check_compatible(other);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
        return *this;
    }
    ScalarField& operator*=(double a) {
        for (double& v : values_) v *= a;
        return *this;
    }
    ScalarField& operator+=(double a) {
        for (double& v : values_) v += a;
        return *this;
    }

    /// this += a * other
    void add_scaled(const ScalarField& other, double a) {
        check_compatible(other);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * other.values_[i];
    }

    void check_compatible(const ScalarField& other) const {
        if (!grid_ || !other.grid_ || !grid_->same_shape(*other.grid_))
            throw ShapeError("scalar fields live on different grids");
    }

  private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// d scalar components on one grid.
class VectorField {
  public:
    VectorField() = default;
    explicit VectorField(GridPtr grid) {
        const int d = grid->dim();
        components_.reserve(static_cast<std::size_t>(d));
        for (int c = 0; c < d; ++c) components_.emplace_back(grid);
    }
    explicit VectorField(std::vector<ScalarField> components)
        : components_(std::move(components)) {
        if (components_.empty())
            throw ShapeError("vector field needs at least one component");
        const GridPtr& g = components_.front().grid();
        if (static_cast<int>(components_.size()) != g->dim())
            throw ShapeError("vector field must have exactly dim components, got " +
                             std::to_string(components_.size()));
        for (const auto& c : components_) components_.front().check_compatible(c);
    }

    const GridPtr& grid() const { return components_.front().grid(); }
    int dim() const { return static_cast<int>(components_.size()); }
    const ScalarField& operator[](int c) const { return components_[static_cast<std::size_t>(c)]; }
    ScalarField& operator[](int c) { return components_[static_cast<std::size_t>(c)]; }

    VectorField& operator+=(const VectorField& other) {
        check_compatible(other);
        for (int c = 0; c < dim(); ++c) (*this)[c] += other[c];
        return *this;
    }
    VectorField& operator-=(const VectorField& other) {
        check_compatible(other);
        for (int c = 0; c < dim(); ++c) (*this)[c] -= other[c];
        return *this;
    }
    VectorField& operator*=(double a) {
        for (auto& c : components_) c *= a;
        return *this;
    }
    void add_scaled(const VectorField& other, double a) {
        check_compatible(other);
        for (int c = 0; c < dim(); ++c) (*this)[c].add_scaled(other[c], a);
    }

    void check_compatible(const VectorField& other) const {
        if (dim() != other.dim())
            throw ShapeError("vector fields have different component counts");
        components_.front().check_compatible(other.components_.front());
    }

  private:
    std::vector<ScalarField> components_;
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(double a, ScalarField f) { return f *= a; }
inline VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
inline VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
inline VectorField operator*(double a, VectorField f) { return f *= a; }

inline ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
    a.check_compatible(b);
    ScalarField out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

/// Sample f(x) at every node; f receives the node coordinates (unused axes 0).
template <class F>
ScalarField sample_scalar(const GridPtr& grid, F&& f) {
    ScalarField out(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) out[i] = f(grid->node(i));
    return out;
}

/// Sample a vector-valued function; only the first dim() entries are used.
template <class F>
VectorField sample_vector(const GridPtr& grid, F&& f) {
    VectorField out(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const std::array<double, 3> v = f(grid->node(i));
        for (int c = 0; c < grid->dim(); ++c) out[c][i] = v[static_cast<std::size_t>(c)];
    }
    return out;
}

inline double min_value(const ScalarField& f) {
    return *std::min_element(f.values().begin(), f.values().end());
}

inline double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

inline double max_abs(const VectorField& f) {
    double m = 0.0;
    for (int c = 0; c < f.dim(); ++c) m = std::max(m, max_abs(f[c]));
    return m;
}

/// Integral over the torus by the trapezoid-equivalent periodic quadrature
/// (exact for band-limited integrands).
inline double integral(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid()->cell_volume();
}

/// Average value, integral / (2pi)^d.
inline double mean(const ScalarField& f) { return integral(f) / f.grid()->volume(); }

inline double l2_norm(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v * v;
    return std::sqrt(s * f.grid()->cell_volume());
}

inline double l2_norm(const VectorField& f) {
    double s = 0.0;
    for (int c = 0; c < f.dim(); ++c) {
        const double nc = l2_norm(f[c]);
        s += nc * nc;
    }
    return std::sqrt(s);
}

}  // namespace bipep
