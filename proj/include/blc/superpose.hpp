#pragma once

// Algebraic superposition: from alpha and two transforms alpha' (phi_1) and
// alpha'' (phi_2), the fourth solution alpha* of the commutativity diamond.

#include "blc/case.hpp"
#include "blc/field.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

namespace blc {

struct SuperposeInput {
    CaseConfig cfg;
    ScalarField alpha;
    ScalarField alpha1;  ///< transform of alpha with phi1
    ScalarField alpha2;  ///< transform of alpha with phi2
    double phi1 = 0.0;
    double phi2 = 0.0;
};

struct SuperposeOptions {
    double guard = 1e-10;  ///< nodes whose margin is at most this are masked
    bool unwrap = true;    ///< continuous branch for the periodic formulas
};

/// delta*tau*S(phi2+phi1)/2 / S(phi2-phi1)/2 with S indexed by -delta*epsilon.
inline double hyperbolic_coefficient(const CaseConfig& c, double phi1, double phi2) {
    const int xi = -c.delta * c.epsilon;
    return c.delta * c.tau * gen_s(xi, 0.5 * (phi2 + phi1)) / gen_s(xi, 0.5 * (phi2 - phi1));
}

/// A = tau(sinh phi2 - sinh phi1), B = cosh phi1 cosh phi2, L = 1 + sinh phi1 sinh phi2.
struct EllipticConstants {
    double A;
    double B;
    double L;
};

inline EllipticConstants elliptic_structure_constants(double phi1, double phi2, int tau) {
    return {tau * (std::sinh(phi2) - std::sinh(phi1)), std::cosh(phi1) * std::cosh(phi2),
            1.0 + std::sinh(phi1) * std::sinh(phi2)};
}

/// Value of alpha* at one node together with its distance-to-singularity margin.
struct NodeValue {
    double value;
    double margin;
};

namespace detail {
/// sign(1-a^2) sqrt|1-a^2| for an arctanh argument a.
inline double tanh_margin(double a) {
    const double q = 1.0 - a * a;
    return std::copysign(std::sqrt(std::abs(q)), q);
}
}  // namespace detail

/// Hyperbolic cases: T((a* - a)/4) = K T((a' - a'')/4) with T indexed by (-1)^r.
inline NodeValue hyperbolic_node(int r, double K, double a, double a1, double a2) {
    const double q = 0.25 * (a1 - a2);
    if (r == 0) {
        // atan2 form keeps the value smooth through q = pi/2
        return {a + 4.0 * std::atan2(K * std::sin(q), std::cos(q)), 1.0};
    }
    const double arg = K * std::tanh(q);
    const double m = detail::tanh_margin(arg);
    return {m > 0.0 ? a + 4.0 * std::atanh(arg) : std::numeric_limits<double>::quiet_NaN(), m};
}

/// Elliptic sinh-Gordon seed: tanh(a*/2) = (P - Q t)/(Q - P t), t = tanh(a/2).
/// Since den^2 - num^2 = c^2 sech^2(a/2) with c = L - B cos(D/2), the ratio
/// never exceeds 1 in magnitude; the margin c sech(a/2)/|den| has magnitude
/// sqrt(1 - ratio^2) and changes sign across the singular curves.
inline NodeValue elliptic_sinh_node(const EllipticConstants& k, double a, double a1, double a2) {
    const double D = a2 - a1;
    const double P = k.A * std::sin(0.5 * D), Q = k.L * std::cos(0.5 * D) - k.B;
    const double t = std::tanh(0.5 * a);
    const double num = P - Q * t, den = Q - P * t;
    const double c = k.L - k.B * std::cos(0.5 * D);
    if (den == 0.0) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    const double m = c / (std::abs(den) * std::cosh(std::min(std::abs(0.5 * a), 700.0)));
    const double ratio = num / den;
    return {std::abs(ratio) < 1.0 ? 2.0 * std::atanh(ratio) : std::numeric_limits<double>::quiet_NaN(), m};
}

/// Elliptic sine-Gordon seed: tan(a*/2) = (P - Q tan(a/2))/(Q + P tan(a/2)),
/// evaluated as a (numerator, denominator) pair in cos(a/2), sin(a/2) so that
/// tan(a/2) has no poles. The margin is the pair's magnitude relative to P, Q.
inline NodeValue elliptic_sine_node(const EllipticConstants& k, double a, double a1, double a2) {
    const double D = a2 - a1;
    const double P = k.A * std::sinh(0.5 * D), Q = k.L * std::cosh(0.5 * D) - k.B;
    const double ca = std::cos(0.5 * a), sa = std::sin(0.5 * a);
    const double num = P * ca - Q * sa, den = Q * ca + P * sa;
    const double scale = std::abs(P) + std::abs(Q);
    const double m = scale > 0.0 ? std::hypot(num, den) / scale : 0.0;
    return {2.0 * std::atan2(-num, -den), m};
}

/// Boolean field over a grid.
struct BoolField {
    Grid grid;
    std::vector<std::uint8_t> values;
    [[nodiscard]] bool at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)] != 0; }
    [[nodiscard]] std::size_t count_true() const {
        std::size_t n = 0;
        for (auto v : values) n += v ? 1 : 0;
        return n;
    }
};

/// True away from the singular set: |margin| above the guard and no grid
/// neighbour with a margin of opposite sign (a singular curve crosses the
/// edge in between). Nodes without a margin are false.
inline BoolField singularity_mask(const ScalarField& margin, double guard) {
    const Grid& g = margin.grid;
    BoolField out{g, std::vector<std::uint8_t>(margin.values.size(), 0)};
    for (std::size_t i = 0; i < g.x1.n; ++i) {
        for (std::size_t j = 0; j < g.x2.n; ++j) {
            if (!margin.ok(i, j)) continue;
            const double m = margin.at(i, j);
            if (!(std::abs(m) > guard)) continue;
            auto crosses = [&](std::size_t a, std::size_t b) { return margin.ok(a, b) && margin.at(a, b) * m < 0.0; };
            const bool cut = (i > 0 && crosses(i - 1, j)) || (i + 1 < g.x1.n && crosses(i + 1, j)) ||
                             (j > 0 && crosses(i, j - 1)) || (j + 1 < g.x2.n && crosses(i, j + 1));
            out.values[g.index(i, j)] = cut ? 0 : 1;
        }
    }
    return out;
}

/// Chooses the branch value + k*period nearest to the neighbour along rows
/// from the node closest to the coordinate origin, then along columns. Nodes
/// whose best jump still exceeds pi/2 are masked.
inline void unwrap_branches(ScalarField& f, double period) {
    const Grid& g = f.grid;
    const std::size_t n1 = g.x1.n, n2 = g.x2.n;
    if (f.valid_count() == 0) return;
    std::size_t i0 = 0, j0 = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const double d = std::hypot(g.x1.at(i), g.x2.at(j));
            if (f.ok(i, j) && d < best) {
                best = d;
                i0 = i;
                j0 = j;
            }
        }
    }
    auto align = [&](std::size_t i, std::size_t j, double ref) {
        double& v = f.at(i, j);
        const double k = std::round((ref - v) / period);
        v += k * period;
        if (std::abs(v - ref) > 0.5 * std::numbers::pi) {
            f.valid[g.index(i, j)] = 0;
            return false;
        }
        return true;
    };
    auto walk = [&](std::size_t i, std::size_t j, bool along_x1, int sense, double ref) {
        const std::size_t n = along_x1 ? n1 : n2;
        std::size_t k = along_x1 ? i : j;
        while ((sense > 0 && k + 1 < n) || (sense < 0 && k > 0)) {
            k = sense > 0 ? k + 1 : k - 1;
            const std::size_t a = along_x1 ? k : i, b = along_x1 ? j : k;
            if (!f.ok(a, b)) continue;
            if (align(a, b, ref)) ref = f.at(a, b);
        }
    };
    walk(i0, j0, true, 1, f.at(i0, j0));
    walk(i0, j0, true, -1, f.at(i0, j0));

    std::vector<std::size_t> order;
    for (std::size_t i = i0; i < n1; ++i) order.push_back(i);
    for (std::size_t i = i0; i-- > 0;) order.push_back(i);
    for (std::size_t i : order) {
        std::size_t anchor = n2;
        if (f.ok(i, j0)) {
            anchor = j0;
        } else {
            const std::size_t nb = i > i0 ? i - 1 : i + 1;
            if (i == i0) continue;
            for (std::size_t off = 0; off < n2 && anchor == n2; ++off) {
                for (long cand : {static_cast<long>(j0) + static_cast<long>(off), static_cast<long>(j0) - static_cast<long>(off)}) {
                    if (cand < 0 || cand >= static_cast<long>(n2)) continue;
                    const auto j = static_cast<std::size_t>(cand);
                    if (f.ok(i, j) && f.ok(nb, j) && align(i, j, f.at(nb, j))) {
                        anchor = j;
                        break;
                    }
                }
            }
            if (anchor == n2) continue;
        }
        walk(i, anchor, false, 1, f.at(i, anchor));
        walk(i, anchor, false, -1, f.at(i, anchor));
    }
}

namespace detail {

inline void check_superpose_input(const SuperposeInput& in, bool want_hyperbolic, CaseId elliptic_id) {
    if (want_hyperbolic ? !in.cfg.hyperbolic() : in.cfg.id != elliptic_id) {
        throw Error(ErrorKind::WrongCaseFamily, "formula does not apply to case " + std::to_string(to_int(in.cfg.id)));
    }
    if (in.phi1 == in.phi2) throw Error(ErrorKind::EqualPhis, "phi1 and phi2 must differ");
    (void)congruence_params(in.cfg, in.phi1);
    (void)congruence_params(in.cfg, in.phi2);
    require_same_grid(in.alpha.grid, in.alpha1.grid, "superpose");
    require_same_grid(in.alpha.grid, in.alpha2.grid, "superpose");
}

template <class Node>
void evaluate_nodes(const SuperposeInput& in, Node node, ScalarField* value, ScalarField* margin) {
    const Grid& g = in.alpha.grid;
    parallel_for(g.size(), [&](std::size_t k) {
        if (!(in.alpha.valid[k] && in.alpha1.valid[k] && in.alpha2.valid[k])) return;
        const NodeValue nv = node(in.alpha.values[k], in.alpha1.values[k], in.alpha2.values[k]);
        if (margin && std::isfinite(nv.margin)) {
            margin->values[k] = nv.margin;
            margin->valid[k] = 1;
        }
        if (value && std::isfinite(nv.value)) {
            value->values[k] = nv.value;
            value->valid[k] = 1;
        }
    });
}

}  // namespace detail

/// Signed margin to the singular set of the case's formula: sign(1-a^2)sqrt|1-a^2|
/// for the hyperbolic arctanh form, c sech(a/2)/|den| for the elliptic sinh
/// form, 1 for the arctan form and the normalized pair magnitude for the
/// elliptic sine form.
inline ScalarField superposition_margin(const SuperposeInput& in) {
    ScalarField m(in.alpha.grid, 0.0, false);
    const CaseConfig& c = in.cfg;
    if (c.hyperbolic()) {
        detail::check_superpose_input(in, true, c.id);
        const double K = hyperbolic_coefficient(c, in.phi1, in.phi2);
        detail::evaluate_nodes(in, [&](double a, double a1, double a2) { return hyperbolic_node(c.r, K, a, a1, a2); },
                               nullptr, &m);
    } else {
        detail::check_superpose_input(in, false, c.id);
        const EllipticConstants k = elliptic_structure_constants(in.phi1, in.phi2, c.tau);
        if (c.id == CaseId::Case5) {
            detail::evaluate_nodes(in, [&](double a, double a1, double a2) { return elliptic_sinh_node(k, a, a1, a2); },
                                   nullptr, &m);
        } else {
            detail::evaluate_nodes(in, [&](double a, double a1, double a2) { return elliptic_sine_node(k, a, a1, a2); },
                                   nullptr, &m);
        }
    }
    return m;
}

namespace detail {
inline ScalarField finish(ScalarField value, const ScalarField& margin, const SuperposeOptions& opt, double period) {
    const BoolField mask = singularity_mask(margin, opt.guard);
    for (std::size_t k = 0; k < value.values.size(); ++k) {
        if (!mask.values[k]) value.valid[k] = 0;
    }
    if (opt.unwrap && period > 0.0) unwrap_branches(value, period);
    return value;
}
}  // namespace detail

inline ScalarField superpose_hyperbolic(const SuperposeInput& in, const SuperposeOptions& opt = {}) {
    detail::check_superpose_input(in, true, in.cfg.id);
    const double K = hyperbolic_coefficient(in.cfg, in.phi1, in.phi2);
    ScalarField v(in.alpha.grid, 0.0, false), m(in.alpha.grid, 0.0, false);
    const int r = in.cfg.r;
    detail::evaluate_nodes(in, [&](double a, double a1, double a2) { return hyperbolic_node(r, K, a, a1, a2); }, &v, &m);
    return detail::finish(std::move(v), m, opt, r == 0 ? 4.0 * std::numbers::pi : 0.0);
}

inline ScalarField superpose_elliptic_sinh(const SuperposeInput& in, const SuperposeOptions& opt = {}) {
    detail::check_superpose_input(in, false, CaseId::Case5);
    const EllipticConstants k = elliptic_structure_constants(in.phi1, in.phi2, in.cfg.tau);
    ScalarField v(in.alpha.grid, 0.0, false), m(in.alpha.grid, 0.0, false);
    detail::evaluate_nodes(in, [&](double a, double a1, double a2) { return elliptic_sinh_node(k, a, a1, a2); }, &v, &m);
    return detail::finish(std::move(v), m, opt, 0.0);
}

inline ScalarField superpose_elliptic_sine(const SuperposeInput& in, const SuperposeOptions& opt = {}) {
    detail::check_superpose_input(in, false, CaseId::Case6);
    const EllipticConstants k = elliptic_structure_constants(in.phi1, in.phi2, in.cfg.tau);
    ScalarField v(in.alpha.grid, 0.0, false), m(in.alpha.grid, 0.0, false);
    detail::evaluate_nodes(in, [&](double a, double a1, double a2) { return elliptic_sine_node(k, a, a1, a2); }, &v, &m);
    return detail::finish(std::move(v), m, opt, 4.0 * std::numbers::pi);
}

/// Dispatches on the case family.
inline ScalarField superpose(const SuperposeInput& in, const SuperposeOptions& opt = {}) {
    if (in.cfg.hyperbolic()) return superpose_hyperbolic(in, opt);
    if (in.cfg.id == CaseId::Case5) return superpose_elliptic_sinh(in, opt);
    return superpose_elliptic_sine(in, opt);
}

}  // namespace blc
