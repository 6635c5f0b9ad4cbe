#pragma once

/**
 * @file grid.hpp
 * @brief Uniform vertex-centered mesh on [-1, 1], nodal fields and the
 *        quadrature functionals shared by every solver.
 *
 * The mesh stores the boundary nodes x = -1 and x = 1 as unknowns, so the
 * boundary traces c(-1), c(1) that drive the non-local drift are read off
 * directly. All integrals use the trapezoid rule, whose weights coincide
 * with the control-volume widths of the conservative scheme in dynamics.hpp.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polarity {

class Grid {
public:
    /// Builds the mesh x_i = -1 + i*dx, i = 0..n_cells. Requires n_cells >= 4 and even.
    explicit Grid(std::size_t n_cells) : n_cells_(n_cells) {
        if (n_cells < 4) {
            throw std::invalid_argument("Grid: n_cells must be >= 4, got " + std::to_string(n_cells));
        }
        if (n_cells % 2 != 0) {
            throw std::invalid_argument("Grid: n_cells must be even, got " + std::to_string(n_cells));
        }
        dx_ = 2.0 / static_cast<double>(n_cells);
        nodes_.resize(n_cells + 1);
        weights_.assign(n_cells + 1, dx_);
        // Symmetric construction: x_i = -x_{n-i} bit for bit, and x_{n/2} = 0.
        const std::size_t half = n_cells / 2;
        for (std::size_t i = 0; i <= half; ++i) {
            const double x = -1.0 + static_cast<double>(i) / static_cast<double>(half);
            nodes_[i] = x;
            nodes_[n_cells - i] = -x;
        }
        nodes_[half] = 0.0;
        weights_.front() = 0.5 * dx_;
        weights_.back() = 0.5 * dx_;
    }

    std::size_t n_cells() const noexcept { return n_cells_; }
    std::size_t size() const noexcept { return n_cells_ + 1; }
    double dx() const noexcept { return dx_; }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }
    double x(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

    bool operator==(const Grid& other) const noexcept { return n_cells_ == other.n_cells_; }

private:
    std::size_t n_cells_;
    double dx_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr build_grid(std::size_t n_cells) { return std::make_shared<const Grid>(n_cells); }

/// Nodal concentration values c_i >= 0 on a shared, immutable grid.
class Field {
public:
    Field() = default;

    explicit Field(GridPtr grid) : grid_(std::move(grid)) {
        require_grid();
        values_.assign(grid_->size(), 0.0);
    }

    Field(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
        require_grid();
        if (values_.size() != grid_->size()) {
            throw std::invalid_argument("Field: expected " + std::to_string(grid_->size()) + " values, got " +
                                        std::to_string(values_.size()));
        }
    }

    /// Samples f at every node.
    template <typename F>
    static Field sample(GridPtr grid, F&& f) {
        Field out(std::move(grid));
        const auto x = out.grid().nodes();
        for (std::size_t i = 0; i < x.size(); ++i) out.values_[i] = f(x[i]);
        return out;
    }

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double front() const { return values_.front(); }
    double back() const { return values_.back(); }

    bool same_grid(const Field& other) const noexcept {
        return grid_ && other.grid_ && (grid_ == other.grid_ || *grid_ == *other.grid_);
    }

    double sup_norm() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    /// Values are finite and min >= -rel_tol * max.
    bool is_valid(double rel_tol = 1e-12) const {
        if (!all_finite()) return false;
        const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
        return *lo >= -rel_tol * std::max(*hi, 0.0);
    }

    Field scaled(double factor) const {
        Field out = *this;
        for (double& v : out.values_) v *= factor;
        return out;
    }

    /// Reflection x -> -x.
    Field reflected() const {
        Field out = *this;
        std::reverse(out.values_.begin(), out.values_.end());
        return out;
    }

private:
    void require_grid() const {
        if (!grid_) throw std::invalid_argument("Field: null grid");
    }

    GridPtr grid_;
    std::vector<double> values_;
};

struct Traces {
    double left;
    double right;
};

/// Neumaier-compensated sum; keeps quadrature of affine fields within a few ulps.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Trapezoid quadrature of g(x_i, c_i) over the field's grid.
template <typename G>
double integrate_with(const Field& f, G&& g) {
    const auto w = f.grid().weights();
    const auto x = f.grid().nodes();
    const auto c = f.values();
    CompensatedSum s;
    for (std::size_t i = 0; i < c.size(); ++i) s.add(w[i] * g(x[i], c[i]));
    return s.value();
}

inline double integrate(const Field& f) {
    return integrate_with(f, [](double, double c) { return c; });
}

/// M = int c dx (trapezoid).
inline double mass(const Field& f) { return integrate(f); }

/// J = int x c dx.
inline double first_moment(const Field& f) {
    return integrate_with(f, [](double x, double c) { return x * c; });
}

/// J~ = int (x+1) c dx, composed as J + M.
inline double shifted_moment(const Field& f) { return first_moment(f) + mass(f); }

/// K = int x^2 c dx.
inline double second_moment(const Field& f) {
    return integrate_with(f, [](double x, double c) { return x * x * c; });
}

inline Traces boundary_traces(const Field& f) { return {f.front(), f.back()}; }

/// Trace gap c(-1) - c(1): the strength and sign of the self-generated drift.
inline double alpha_of(const Field& f) { return f.front() - f.back(); }

inline double l1_distance(const Field& f, const Field& g) {
    if (!f.same_grid(g)) throw std::invalid_argument("l1_distance: fields live on different grids");
    const auto w = f.grid().weights();
    CompensatedSum s;
    for (std::size_t i = 0; i < f.size(); ++i) s.add(w[i] * std::abs(f[i] - g[i]));
    return s.value();
}

}  // namespace polarity
