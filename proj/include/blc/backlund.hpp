#pragma once

// The Backlund-type first-order systems, their integration on a grid and
// residual certificates for pairs (alpha, alpha').

#include "blc/case.hpp"
#include "blc/field.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <utility>

namespace blc {

struct BTSystem {
    CaseConfig cfg;
    CongruenceParams params;
};

inline BTSystem make_bt_system(const CaseConfig& cfg, double phi) { return {cfg, congruence_params(cfg, phi)}; }

namespace detail {
inline constexpr double kExpClamp = 700.0;
inline double clamped_c(int xi, double x) noexcept {
    return xi == 1 ? std::cos(x) : std::cosh(std::clamp(x, -kExpClamp, kExpClamp));
}
inline double clamped_s(int xi, double x) noexcept {
    return xi == 1 ? std::sin(x) : std::sinh(std::clamp(x, -kExpClamp, kExpClamp));
}
}  // namespace detail

/// (alpha'_x1, alpha'_x2) from the system, with C/S of alpha/2 indexed by l and
/// C/S of alpha'/2 indexed by (-1)^r.
inline Gradient bt_gradient(const BTSystem& sys, double alpha, Gradient grad, double alpha_prime) noexcept {
    const CaseConfig& c = sys.cfg;
    const double lam = sys.params.lambda, Lam = sys.params.Lambda;
    const int rho = c.primed_xi(), sgn_s = sign_pow(c.s);
    const double Sp = detail::clamped_s(rho, 0.5 * alpha_prime), Cp = detail::clamped_c(rho, 0.5 * alpha_prime);
    const double Sa = detail::clamped_s(c.l, 0.5 * alpha), Ca = detail::clamped_c(c.l, 0.5 * alpha);
    const double d1 = sgn_s * c.delta * grad.d2 + (2.0 / lam) * Sp * Ca - (2.0 * sgn_s * c.tau * Lam / lam) * Cp * Sa;
    const double d2 = -grad.d1 - (2.0 / lam) * Cp * Sa - (2.0 * c.delta * c.tau * Lam / lam) * Sp * Ca;
    return {d1, d2};
}

struct AlphaSample {
    double value;
    Gradient grad;
};

/// alpha and its gradient at points of grid lines; nullopt where undefined.
using AlphaProbe = std::function<std::optional<AlphaSample>(double, double)>;

inline AlphaProbe make_probe(const AnalyticSolution& a) {
    return [a](double x1, double x2) -> std::optional<AlphaSample> {
        if (!a.defined(x1, x2)) return std::nullopt;
        const double v = a.eval(x1, x2);
        Gradient g;
        if (a.has_grad()) {
            g = a.grad(x1, x2);
        } else {
            constexpr double e = 1e-5;
            g = {(a.eval(x1 + e, x2) - a.eval(x1 - e, x2)) / (2 * e), (a.eval(x1, x2 + e) - a.eval(x1, x2 - e)) / (2 * e)};
        }
        if (!std::isfinite(v) || !std::isfinite(g.d1) || !std::isfinite(g.d2)) return std::nullopt;
        return AlphaSample{v, g};
    };
}

namespace detail {
/// Cubic Lagrange interpolation of three nodal arrays along one grid line.
/// node(k) maps a line position to the flat index; returns nullopt when any
/// stencil node is invalid.
template <class NodeIndex>
std::optional<AlphaSample> interpolate_line(const GridData& d, const Axis& ax, double x, NodeIndex node) {
    if (ax.n < 4) return std::nullopt;
    const double u = (x - ax.min) / ax.h;
    if (u < -1e-9 || u > static_cast<double>(ax.n - 1) + 1e-9) return std::nullopt;
    auto base = static_cast<long>(std::floor(u)) - 1;
    base = std::clamp<long>(base, 0, static_cast<long>(ax.n) - 4);
    const double t = u - static_cast<double>(base);
    double w[4];
    for (int m = 0; m < 4; ++m) {
        double p = 1.0;
        for (int q = 0; q < 4; ++q) {
            if (q != m) p *= (t - q) / static_cast<double>(m - q);
        }
        w[m] = p;
    }
    AlphaSample s{0.0, {0.0, 0.0}};
    for (int m = 0; m < 4; ++m) {
        const std::size_t k = node(static_cast<std::size_t>(base + m));
        if (!d.valid[k]) return std::nullopt;
        s.value += w[m] * d.val[k];
        s.grad.d1 += w[m] * d.d1[k];
        s.grad.d2 += w[m] * d.d2[k];
    }
    return s;
}
}  // namespace detail

/// Probe over a sampled field: gradients by central differences at nodes,
/// cubic interpolation between nodes of the same row or column.
inline AlphaProbe make_probe(const ScalarField& f) {
    auto d = std::make_shared<GridData>(grid_data(f));
    return [d](double x1, double x2) -> std::optional<AlphaSample> {
        const Grid& g = d->grid;
        if (auto j = g.x2.index_of(x2, 1e-9)) {
            return detail::interpolate_line(*d, g.x1, x1, [&](std::size_t i) { return g.index(i, *j); });
        }
        if (auto i = g.x1.index_of(x1, 1e-9)) {
            return detail::interpolate_line(*d, g.x2, x2, [&](std::size_t j) { return g.index(*i, j); });
        }
        return std::nullopt;
    };
}

enum class SweepOrder { RowsThenColumns, ColumnsThenRows };

struct IntegrateOptions {
    int substeps = 1;
    double blowup = 50.0;
    SweepOrder order = SweepOrder::RowsThenColumns;
};

struct GridPoint {
    double x1 = 0.0;
    double x2 = 0.0;
};

namespace detail {

/// Integrates alpha' along one grid line from node `start` in both directions.
/// `at(k)` gives the coordinates of node k, `dir` picks the derivative component.
template <class Coord>
void sweep_line(const BTSystem& sys, const AlphaProbe& probe, const IntegrateOptions& opt, std::size_t n,
                std::size_t start, double y0, Coord coord, int dir, double* out, std::uint8_t* ok) {
    auto rhs = [&](double t, double y) -> std::optional<double> {
        const auto [x1, x2] = coord(t);
        const auto s = probe(x1, x2);
        if (!s) return std::nullopt;
        const Gradient g = bt_gradient(sys, s->value, s->grad, y);
        const double v = dir == 1 ? g.d1 : g.d2;
        if (!std::isfinite(v)) return std::nullopt;
        return v;
    };
    out[start] = y0;
    ok[start] = 1;
    for (int sense : {1, -1}) {
        double y = y0;
        std::size_t k = start;
        while ((sense > 0 && k + 1 < n) || (sense < 0 && k > 0)) {
            const std::size_t next = sense > 0 ? k + 1 : k - 1;
            const double t0 = static_cast<double>(k);
            const double dt = static_cast<double>(sense) / opt.substeps;
            bool alive = true;
            for (int m = 0; m < opt.substeps && alive; ++m) {
                const double t = t0 + m * dt;
                const auto k1 = rhs(t, y);
                const auto k2 = k1 ? rhs(t + 0.5 * dt, y + 0.5 * dt * *k1 * coord.step) : std::nullopt;
                const auto k3 = k2 ? rhs(t + 0.5 * dt, y + 0.5 * dt * *k2 * coord.step) : std::nullopt;
                const auto k4 = k3 ? rhs(t + dt, y + dt * *k3 * coord.step) : std::nullopt;
                if (!k4) {
                    alive = false;
                    break;
                }
                y += dt * coord.step * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4) / 6.0;
                if (!std::isfinite(y) || std::abs(y) > opt.blowup) alive = false;
            }
            if (!alive) break;
            out[next] = y;
            ok[next] = 1;
            k = next;
        }
    }
}

struct RowCoord {
    const Axis* ax;
    double fixed;
    double step;
    [[nodiscard]] std::pair<double, double> operator()(double t) const { return {ax->min + t * ax->h, fixed}; }
};
struct ColCoord {
    const Axis* ax;
    double fixed;
    double step;
    [[nodiscard]] std::pair<double, double> operator()(double t) const { return {fixed, ax->min + t * ax->h}; }
};

}  // namespace detail

/// Integrates the transformation from alpha'(p0) = alpha_prime_0 over the grid:
/// classical RK4 along the row through p0, then along every column. Nodes past
/// a blow-up or outside the domain of alpha are left invalid.
inline ScalarField integrate_bt(const BTSystem& sys, const AlphaProbe& probe, const Grid& grid, GridPoint p0,
                                double alpha_prime_0, const IntegrateOptions& opt = {}) {
    const auto i0 = grid.x1.index_of(p0.x1);
    const auto j0 = grid.x2.index_of(p0.x2);
    if (!i0 || !j0) throw Error(ErrorKind::SeedNotOnGrid, "p0 is not a grid node");
    if (!probe(grid.x1.at(*i0), grid.x2.at(*j0))) {
        throw Error(ErrorKind::AlphaUndefinedOnGrid, "alpha is undefined at p0");
    }
    if (opt.substeps < 1) throw Error(ErrorKind::InvalidConfig, "substeps must be positive");
    const std::size_t n1 = grid.x1.n, n2 = grid.x2.n;
    ScalarField out(grid, 0.0, false);
    const bool rows_first = opt.order == SweepOrder::RowsThenColumns;

    if (rows_first) {
        std::vector<double> line(n1, 0.0);
        std::vector<std::uint8_t> ok(n1, 0);
        detail::sweep_line(sys, probe, opt, n1, *i0, alpha_prime_0,
                           detail::RowCoord{&grid.x1, grid.x2.at(*j0), grid.x1.h}, 1, line.data(), ok.data());
        parallel_for(n1, [&](std::size_t i) {
            if (!ok[i]) return;
            std::vector<double> col(n2, 0.0);
            std::vector<std::uint8_t> cok(n2, 0);
            detail::sweep_line(sys, probe, opt, n2, *j0, line[i],
                               detail::ColCoord{&grid.x2, grid.x1.at(i), grid.x2.h}, 2, col.data(), cok.data());
            for (std::size_t j = 0; j < n2; ++j) {
                if (cok[j]) out.set(i, j, col[j]);
            }
        });
    } else {
        std::vector<double> line(n2, 0.0);
        std::vector<std::uint8_t> ok(n2, 0);
        detail::sweep_line(sys, probe, opt, n2, *j0, alpha_prime_0,
                           detail::ColCoord{&grid.x2, grid.x1.at(*i0), grid.x2.h}, 2, line.data(), ok.data());
        parallel_for(n2, [&](std::size_t j) {
            if (!ok[j]) return;
            std::vector<double> row(n1, 0.0);
            std::vector<std::uint8_t> rok(n1, 0);
            detail::sweep_line(sys, probe, opt, n1, *i0, line[j],
                               detail::RowCoord{&grid.x1, grid.x2.at(j), grid.x1.h}, 1, row.data(), rok.data());
            for (std::size_t i = 0; i < n1; ++i) {
                if (rok[i]) out.set(i, j, row[i]);
            }
        });
    }
    return out;
}

inline ScalarField integrate_bt(const BTSystem& sys, const AnalyticSolution& alpha, const Grid& grid, GridPoint p0,
                                double alpha_prime_0, const IntegrateOptions& opt = {}) {
    return integrate_bt(sys, make_probe(alpha), grid, p0, alpha_prime_0, opt);
}

inline ScalarField integrate_bt(const BTSystem& sys, const ScalarField& alpha, GridPoint p0, double alpha_prime_0,
                                const IntegrateOptions& opt = {}) {
    return integrate_bt(sys, make_probe(alpha), alpha.grid, p0, alpha_prime_0, opt);
}

struct BTResidual {
    ScalarField first;
    ScalarField second;

    [[nodiscard]] double max_abs() const { return std::max(stats(first).max_abs, stats(second).max_abs); }
};

/// Left-minus-right of both equations of the system at every node where alpha
/// and alpha' have values and gradients.
inline BTResidual bt_residual(const BTSystem& sys, const GridData& a, const GridData& ap) {
    require_same_grid(a.grid, ap.grid, "bt_residual");
    BTResidual r{ScalarField(a.grid, 0.0, false), ScalarField(a.grid, 0.0, false)};
    for (std::size_t k = 0; k < a.val.size(); ++k) {
        if (!a.valid[k] || !ap.valid[k]) continue;
        const Gradient g = bt_gradient(sys, a.val[k], {a.d1[k], a.d2[k]}, ap.val[k]);
        const double e1 = ap.d1[k] - g.d1, e2 = ap.d2[k] - g.d2;
        if (!std::isfinite(e1) || !std::isfinite(e2)) continue;
        r.first.values[k] = e1;
        r.second.values[k] = e2;
        r.first.valid[k] = r.second.valid[k] = 1;
    }
    return r;
}

inline BTResidual bt_residual(const BTSystem& sys, const ScalarField& a, const ScalarField& ap) {
    require_same_grid(a.grid, ap.grid, "bt_residual");
    return bt_residual(sys, grid_data(a), grid_data(ap));
}

inline BTResidual bt_residual(const BTSystem& sys, const AnalyticSolution& a, const ScalarField& ap) {
    return bt_residual(sys, grid_data(a, ap.grid), grid_data(ap));
}

inline BTResidual bt_residual(const BTSystem& sys, const ScalarField& a, const AnalyticSolution& ap) {
    return bt_residual(sys, grid_data(a), grid_data(ap, a.grid));
}

inline BTResidual bt_residual(const BTSystem& sys, const AnalyticSolution& a, const AnalyticSolution& ap,
                              const Grid& grid) {
    return bt_residual(sys, grid_data(a, grid), grid_data(ap, grid));
}

}  // namespace blc
