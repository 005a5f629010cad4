#pragma once

#include "blc/error.hpp"
#include "blc/jet.hpp"
#include "blc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace blc {

/// Uniformly spaced samples min, min+h, ..., min+(n-1)h.
struct Axis {
    double min = 0.0;
    double h = 1.0;
    std::size_t n = 0;

    [[nodiscard]] double at(std::size_t i) const noexcept { return min + static_cast<double>(i) * h; }
    [[nodiscard]] double max() const noexcept { return n == 0 ? min : at(n - 1); }

    /// Index of the node within tol*h of x, if any.
    [[nodiscard]] std::optional<std::size_t> index_of(double x, double tol = 1e-6) const {
        const double k = std::round((x - min) / h);
        if (k < 0 || k >= static_cast<double>(n)) return std::nullopt;
        if (std::abs(at(static_cast<std::size_t>(k)) - x) > tol * h) return std::nullopt;
        return static_cast<std::size_t>(k);
    }

    /// Axis covering [lo, hi] with spacing h; the last node is the largest one not beyond hi.
    static Axis span(double lo, double hi, double h) {
        if (!(h > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
            throw Error(ErrorKind::InvalidConfig, "axis needs h>0 and min<=max");
        }
        const auto n = static_cast<std::size_t>(std::floor((hi - lo) / h + 1e-9)) + 1;
        return {lo, h, n};
    }

    friend bool operator==(const Axis& a, const Axis& b) {
        return a.n == b.n && std::abs(a.min - b.min) <= 1e-12 * std::max(1.0, std::abs(a.min)) &&
               std::abs(a.h - b.h) <= 1e-12 * a.h;
    }
};

struct Grid {
    Axis x1;
    Axis x2;

    [[nodiscard]] std::size_t size() const noexcept { return x1.n * x2.n; }
    /// Row-major flat index with x1 as the outer coordinate.
    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * x2.n + j; }

    static Grid square(double lo, double hi, double h) {
        const Axis a = Axis::span(lo, hi, h);
        return {a, a};
    }

    friend bool operator==(const Grid& a, const Grid& b) { return a.x1 == b.x1 && a.x2 == b.x2; }
};

/// A field sampled on a grid with a per-node validity mask.
struct ScalarField {
    Grid grid;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0, bool ok = true)
        : grid(g), values(g.size(), fill), valid(g.size(), ok ? 1 : 0) {}

    [[nodiscard]] double& at(std::size_t i, std::size_t j) { return values[grid.index(i, j)]; }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
    [[nodiscard]] bool ok(std::size_t i, std::size_t j) const { return valid[grid.index(i, j)] != 0; }
    void set(std::size_t i, std::size_t j, double v, bool ok = true) {
        values[grid.index(i, j)] = v;
        valid[grid.index(i, j)] = ok ? 1 : 0;
    }
    [[nodiscard]] std::size_t valid_count() const {
        return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
    }
};

struct Gradient {
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Pure second derivatives (a_11, a_22).
struct SecondDerivatives {
    double d11 = 0.0;
    double d22 = 0.0;
};

/// A closed-form solution with optional exact derivatives and its domain of definition.
struct AnalyticSolution {
    std::function<double(double, double)> eval;
    std::function<Gradient(double, double)> grad;
    std::function<SecondDerivatives(double, double)> hess;
    std::function<bool(double, double)> domain;

    [[nodiscard]] double operator()(double x1, double x2) const { return eval(x1, x2); }
    [[nodiscard]] bool defined(double x1, double x2) const { return !domain || domain(x1, x2); }
    [[nodiscard]] bool has_grad() const noexcept { return static_cast<bool>(grad); }
    [[nodiscard]] bool has_hess() const noexcept { return static_cast<bool>(hess); }
};

/// Wraps a closed form templated over the scalar type; gradient and Hessian
/// diagonal come from jets.
template <class F>
AnalyticSolution make_analytic(F f, std::function<bool(double, double)> domain = {}) {
    AnalyticSolution a;
    a.eval = [f](double x1, double x2) { return f(x1, x2); };
    a.grad = [f](double x1, double x2) {
        return Gradient{f(Jet::variable(x1), Jet(x2)).d, f(Jet(x1), Jet::variable(x2)).d};
    };
    a.hess = [f](double x1, double x2) {
        return SecondDerivatives{f(Jet::variable(x1), Jet(x2)).dd, f(Jet(x1), Jet::variable(x2)).dd};
    };
    a.domain = std::move(domain);
    return a;
}

/// Samples a closed form on a grid; nodes outside the domain or non-finite are invalid.
inline ScalarField sample(const AnalyticSolution& a, const Grid& grid) {
    ScalarField out(grid, 0.0, false);
    parallel_for(grid.x1.n, [&](std::size_t i) {
        const double x1 = grid.x1.at(i);
        for (std::size_t j = 0; j < grid.x2.n; ++j) {
            const double x2 = grid.x2.at(j);
            if (!a.defined(x1, x2)) continue;
            const double v = a.eval(x1, x2);
            if (std::isfinite(v)) out.set(i, j, v, true);
        }
    });
    return out;
}

struct FieldStats {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    std::size_t count = 0;
};

inline FieldStats stats(const ScalarField& f) {
    FieldStats s;
    double sum = 0.0;
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        if (!f.valid[k]) continue;
        const double a = std::abs(f.values[k]);
        s.max_abs = std::max(s.max_abs, a);
        sum += a;
        ++s.count;
    }
    s.mean_abs = s.count ? sum / static_cast<double>(s.count) : 0.0;
    return s;
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw Error(ErrorKind::GridMismatch, std::string(what) + ": fields live on different grids");
}

/// Nodewise a - b on the nodes valid in both.
inline ScalarField difference(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "difference");
    ScalarField out(a.grid, 0.0, false);
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        if (a.valid[k] && b.valid[k]) {
            out.values[k] = a.values[k] - b.values[k];
            out.valid[k] = 1;
        }
    }
    return out;
}

/// Restricts the mask to nodes inside [x1lo,x1hi] x [x2lo,x2hi].
inline ScalarField restrict_to(ScalarField f, double x1lo, double x1hi, double x2lo, double x2hi) {
    for (std::size_t i = 0; i < f.grid.x1.n; ++i) {
        for (std::size_t j = 0; j < f.grid.x2.n; ++j) {
            const double x1 = f.grid.x1.at(i), x2 = f.grid.x2.at(j);
            if (x1 < x1lo || x1 > x1hi || x2 < x2lo || x2 > x2hi) f.valid[f.grid.index(i, j)] = 0;
        }
    }
    return f;
}

/// Nodal values, gradients and validity of a field on a grid.
struct GridData {
    Grid grid;
    std::vector<double> val;
    std::vector<double> d1;
    std::vector<double> d2;
    std::vector<std::uint8_t> valid;
};

/// Gradients by second-order central differences; nodes without a full valid
/// stencil are invalid.
inline GridData grid_data(const ScalarField& f) {
    const Grid& g = f.grid;
    GridData out{g, f.values, std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.0),
                 std::vector<std::uint8_t>(g.size(), 0)};
    const double h1 = g.x1.h, h2 = g.x2.h;
    for (std::size_t i = 1; i + 1 < g.x1.n; ++i) {
        for (std::size_t j = 1; j + 1 < g.x2.n; ++j) {
            if (!(f.ok(i, j) && f.ok(i - 1, j) && f.ok(i + 1, j) && f.ok(i, j - 1) && f.ok(i, j + 1))) continue;
            const std::size_t k = g.index(i, j);
            out.d1[k] = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * h1);
            out.d2[k] = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * h2);
            out.valid[k] = 1;
        }
    }
    return out;
}

/// Exact gradients when the solution provides them, else central differences of eval.
inline GridData grid_data(const AnalyticSolution& a, const Grid& g) {
    if (!a.has_grad()) return grid_data(sample(a, g));
    GridData out{g, std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.0),
                 std::vector<double>(g.size(), 0.0), std::vector<std::uint8_t>(g.size(), 0)};
    parallel_for(g.x1.n, [&](std::size_t i) {
        const double x1 = g.x1.at(i);
        for (std::size_t j = 0; j < g.x2.n; ++j) {
            const double x2 = g.x2.at(j);
            if (!a.defined(x1, x2)) continue;
            const std::size_t k = g.index(i, j);
            const double v = a.eval(x1, x2);
            const Gradient gr = a.grad(x1, x2);
            if (!std::isfinite(v) || !std::isfinite(gr.d1) || !std::isfinite(gr.d2)) continue;
            out.val[k] = v;
            out.d1[k] = gr.d1;
            out.d2[k] = gr.d2;
            out.valid[k] = 1;
        }
    });
    return out;
}

}  // namespace blc
