#pragma once

// Residual of the Gordon-type equation a_11 + op*a_22 + rhs*S_xi(a) attached
// to a case.

#include "blc/case.hpp"
#include "blc/field.hpp"

namespace blc {

enum class DerivativeMode { Exact, FiniteDifference };

inline double equation_residual(const Equation& eq, double a, double a11, double a22) noexcept {
    return a11 + eq.op * a22 + eq.rhs * gen_s(eq.xi, a);
}

/// Residual at interior nodes by second-order central differences. A node is
/// evaluated only when its five-point stencil is valid; boundary nodes are excluded.
inline ScalarField pde_residual(const ScalarField& alpha, const Equation& eq) {
    const Grid& g = alpha.grid;
    if (g.x1.n < 3 || g.x2.n < 3) throw Error(ErrorKind::GridTooSmall, "need at least 3 nodes per axis");
    ScalarField out(g, 0.0, false);
    const double ih1 = 1.0 / (g.x1.h * g.x1.h), ih2 = 1.0 / (g.x2.h * g.x2.h);
    parallel_for(g.x1.n - 2, [&](std::size_t k) {
        const std::size_t i = k + 1;
        for (std::size_t j = 1; j + 1 < g.x2.n; ++j) {
            if (!(alpha.ok(i, j) && alpha.ok(i - 1, j) && alpha.ok(i + 1, j) && alpha.ok(i, j - 1) &&
                  alpha.ok(i, j + 1))) {
                continue;
            }
            const double a = alpha.at(i, j);
            const double a11 = (alpha.at(i + 1, j) - 2.0 * a + alpha.at(i - 1, j)) * ih1;
            const double a22 = (alpha.at(i, j + 1) - 2.0 * a + alpha.at(i, j - 1)) * ih2;
            out.set(i, j, equation_residual(eq, a, a11, a22));
        }
    });
    if (out.valid_count() == 0 && alpha.valid_count() > 0) {
        throw Error(ErrorKind::GridTooSmall, "no node has a complete valid stencil");
    }
    return out;
}

inline ScalarField pde_residual(const ScalarField& alpha, const CaseConfig& c, int index_flag) {
    return pde_residual(alpha, equation_for(c, index_flag));
}

/// Residual of a closed form on a grid, with exact second derivatives or by differences.
inline ScalarField pde_residual(const AnalyticSolution& alpha, const CaseConfig& c, int index_flag,
                                const Grid& grid, DerivativeMode mode = DerivativeMode::Exact) {
    const Equation eq = equation_for(c, index_flag);
    if (mode == DerivativeMode::FiniteDifference || !alpha.has_hess()) return pde_residual(sample(alpha, grid), eq);
    ScalarField out(grid, 0.0, false);
    parallel_for(grid.x1.n, [&](std::size_t i) {
        const double x1 = grid.x1.at(i);
        for (std::size_t j = 0; j < grid.x2.n; ++j) {
            const double x2 = grid.x2.at(j);
            if (!alpha.defined(x1, x2)) continue;
            const SecondDerivatives h = alpha.hess(x1, x2);
            const double r = equation_residual(eq, alpha.eval(x1, x2), h.d11, h.d22);
            if (std::isfinite(r)) out.set(i, j, r);
        }
    });
    return out;
}

}  // namespace blc
