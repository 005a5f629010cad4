#pragma once

// Surfaces in R^3_s: the pseudo inner product, fundamental forms, Gaussian
// curvature, the surface transformation along a line congruence and the
// congruence certificate.

#include "blc/backlund.hpp"
#include "blc/case.hpp"
#include "blc/field.hpp"
#include "blc/jet.hpp"
#include "blc/seeds.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

namespace blc {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double k, const Vec3& a) { return {k * a[0], k * a[1], k * a[2]}; }

/// u1 v1 + u2 v2 + (-1)^s u3 v3.
inline double pseudo_dot(int s, const Vec3& u, const Vec3& v) noexcept {
    return u[0] * v[0] + u[1] * v[1] + sign_pow(s) * u[2] * v[2];
}

/// Vector pseudo-orthogonal to u and v: the Euclidean cross product with the
/// third component scaled by (-1)^s.
inline Vec3 pseudo_cross(int s, const Vec3& u, const Vec3& v) noexcept {
    return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], sign_pow(s) * (u[0] * v[1] - u[1] * v[0])};
}

/// Normal scaled so that |<N,N>| = 1; nullopt when <N,N> is within guard of 0.
inline std::optional<Vec3> unit_normal(int s, const Vec3& xu, const Vec3& xv, double guard = 1e-12) {
    const Vec3 n = pseudo_cross(s, xu, xv);
    const double nn = pseudo_dot(s, n, n);
    if (!std::isfinite(nn) || std::abs(nn) <= guard) return std::nullopt;
    return (1.0 / std::sqrt(std::abs(nn))) * n;
}

struct SurfaceMesh {
    Grid grid;
    std::vector<Vec3> points;
    int s = 0;
    std::vector<std::uint8_t> valid;
    std::vector<Vec3> tu;  ///< exact X_x1 when known, else empty
    std::vector<Vec3> tv;  ///< exact X_x2 when known, else empty

    [[nodiscard]] bool ok(std::size_t i, std::size_t j) const { return valid[grid.index(i, j)] != 0; }
    [[nodiscard]] const Vec3& at(std::size_t i, std::size_t j) const { return points[grid.index(i, j)]; }
    [[nodiscard]] bool has_tangents() const { return !tu.empty() && tu.size() == points.size(); }
    [[nodiscard]] std::size_t valid_count() const {
        std::size_t n = 0;
        for (auto v : valid) n += v ? 1 : 0;
        return n;
    }
};

using JetVec3 = std::array<Jet, 3>;

/// Parametrized surface evaluated on jets, giving exact derivatives of any order up to two.
struct AnalyticSurface {
    int s = 0;
    std::function<JetVec3(Jet, Jet)> f;
    std::function<bool(double, double)> domain;

    [[nodiscard]] bool defined(double x1, double x2) const { return !domain || domain(x1, x2); }
    [[nodiscard]] Vec3 point(double x1, double x2) const {
        const JetVec3 r = f(Jet(x1), Jet(x2));
        return {r[0].v, r[1].v, r[2].v};
    }
    /// Directional first and second derivatives along (a, b).
    [[nodiscard]] std::pair<Vec3, Vec3> along(double x1, double x2, double a, double b) const {
        const JetVec3 r = f(Jet(x1, a, 0.0), Jet(x2, b, 0.0));
        return {Vec3{r[0].d, r[1].d, r[2].d}, Vec3{r[0].dd, r[1].dd, r[2].dd}};
    }
};

template <class F>
AnalyticSurface make_surface(int s, F f, std::function<bool(double, double)> domain = {}) {
    return {s, [f](Jet x1, Jet x2) { return f(x1, x2); }, std::move(domain)};
}

/// Samples points and exact tangents.
inline SurfaceMesh sample_surface(const AnalyticSurface& X, const Grid& grid) {
    SurfaceMesh m{grid, std::vector<Vec3>(grid.size()), X.s, std::vector<std::uint8_t>(grid.size(), 0),
                  std::vector<Vec3>(grid.size()), std::vector<Vec3>(grid.size())};
    parallel_for(grid.x1.n, [&](std::size_t i) {
        for (std::size_t j = 0; j < grid.x2.n; ++j) {
            const double x1 = grid.x1.at(i), x2 = grid.x2.at(j);
            if (!X.defined(x1, x2)) continue;
            const std::size_t k = grid.index(i, j);
            m.points[k] = X.point(x1, x2);
            m.tu[k] = X.along(x1, x2, 1.0, 0.0).first;
            m.tv[k] = X.along(x1, x2, 0.0, 1.0).first;
            bool finite = true;
            for (const Vec3* v : {&m.points[k], &m.tu[k], &m.tv[k]}) {
                for (double c : *v) finite = finite && std::isfinite(c);
            }
            m.valid[k] = finite ? 1 : 0;
        }
    });
    return m;
}

struct FormCoefficients {
    ScalarField E, F, G;
    ScalarField L, M, N;
};

/// First and second fundamental forms attached to a solution alpha of the case's equation.
inline FormCoefficients fundamental_forms_from_alpha(const ScalarField& alpha, const CaseConfig& c) {
    const Grid& g = alpha.grid;
    FormCoefficients f{ScalarField(g, 0.0, false), ScalarField(g, 0.0, false), ScalarField(g, 0.0, false),
                       ScalarField(g, 0.0, false), ScalarField(g, 0.0, false), ScalarField(g, 0.0, false)};
    const double eps = c.epsilon, rr = sign_pow(c.r);
    for (std::size_t k = 0; k < alpha.values.size(); ++k) {
        if (!alpha.valid[k]) continue;
        const double C = gen_c(c.l, 0.5 * alpha.values[k]), S = gen_s(c.l, 0.5 * alpha.values[k]);
        f.E.values[k] = eps * C * C;
        f.G.values[k] = rr * eps * S * S;
        f.L.values[k] = c.tau * eps * S * C;
        f.N.values[k] = -c.tau * rr * eps * c.l * S * C;
        for (ScalarField* p : {&f.E, &f.F, &f.G, &f.L, &f.M, &f.N}) p->valid[k] = 1;
    }
    return f;
}

/// K = <N,N> (LN - M^2)/(EG - F^2); nodes with |EG - F^2| <= guard are invalid.
inline ScalarField curvature_from_forms(const FormCoefficients& f, int normal_sign, double guard = 1e-12) {
    ScalarField K(f.E.grid, 0.0, false);
    for (std::size_t k = 0; k < K.values.size(); ++k) {
        if (!f.E.valid[k]) continue;
        const double det = f.E.values[k] * f.G.values[k] - f.F.values[k] * f.F.values[k];
        if (std::abs(det) <= guard) continue;
        K.values[k] = normal_sign * (f.L.values[k] * f.N.values[k] - f.M.values[k] * f.M.values[k]) / det;
        K.valid[k] = 1;
    }
    return K;
}

/// Curvature of the forms attached to alpha; <N,N> = (-1)^(s+r) for these surfaces.
inline ScalarField curvature_from_alpha(const ScalarField& alpha, const CaseConfig& c, double guard = 1e-12) {
    return curvature_from_forms(fundamental_forms_from_alpha(alpha, c), sign_pow(c.s + c.r), guard);
}

namespace detail {

struct NodeFrame {
    Vec3 xu, xv;
};

/// Tangents at a node: stored exact tangents, else central differences.
inline std::optional<NodeFrame> frame_at(const SurfaceMesh& m, std::size_t i, std::size_t j) {
    const Grid& g = m.grid;
    if (!m.ok(i, j)) return std::nullopt;
    if (m.has_tangents()) return NodeFrame{m.tu[g.index(i, j)], m.tv[g.index(i, j)]};
    if (i == 0 || j == 0 || i + 1 >= g.x1.n || j + 1 >= g.x2.n) return std::nullopt;
    if (!(m.ok(i - 1, j) && m.ok(i + 1, j) && m.ok(i, j - 1) && m.ok(i, j + 1))) return std::nullopt;
    return NodeFrame{(0.5 / g.x1.h) * (m.at(i + 1, j) - m.at(i - 1, j)),
                     (0.5 / g.x2.h) * (m.at(i, j + 1) - m.at(i, j - 1))};
}

/// (|X_uu|/|X_u|)^2 + (|X_vv|/|X_v|)^2 in Euclidean norms by differences, 0
/// where the stencil is incomplete. Estimates how fast derivatives grow.
inline double bending(const SurfaceMesh& m, std::size_t i, std::size_t j) {
    const Grid& g = m.grid;
    if (i == 0 || j == 0 || i + 1 >= g.x1.n || j + 1 >= g.x2.n) return 0.0;
    if (!(m.ok(i, j) && m.ok(i - 1, j) && m.ok(i + 1, j) && m.ok(i, j - 1) && m.ok(i, j + 1))) return 0.0;
    auto norm = [](const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); };
    const Vec3& c = m.at(i, j);
    const double du = norm(m.at(i + 1, j) - m.at(i - 1, j)) / (2 * g.x1.h);
    const double dv = norm(m.at(i, j + 1) - m.at(i, j - 1)) / (2 * g.x2.h);
    const double duu = norm(m.at(i + 1, j) - 2.0 * c + m.at(i - 1, j)) / (g.x1.h * g.x1.h);
    const double dvv = norm(m.at(i, j + 1) - 2.0 * c + m.at(i, j - 1)) / (g.x2.h * g.x2.h);
    const double a = du > 0 ? duu / du : 0.0, b = dv > 0 ? dvv / dv : 0.0;
    return a * a + b * b;
}

}  // namespace detail

/// Forms of a mesh by central differences (first and second order) and the
/// pseudo-unit normal; the M coefficient uses the four diagonal neighbours.
inline FormCoefficients mesh_forms(const SurfaceMesh& m, std::vector<double>* normal_norm = nullptr,
                                   double guard = 1e-12) {
    const Grid& g = m.grid;
    FormCoefficients f{ScalarField(g, 0.0, false), ScalarField(g, 0.0, false), ScalarField(g, 0.0, false),
                       ScalarField(g, 0.0, false), ScalarField(g, 0.0, false), ScalarField(g, 0.0, false)};
    if (normal_norm) normal_norm->assign(g.size(), 0.0);
    const double h1 = g.x1.h, h2 = g.x2.h;
    for (std::size_t i = 1; i + 1 < g.x1.n; ++i) {
        for (std::size_t j = 1; j + 1 < g.x2.n; ++j) {
            bool all = true;
            for (int a = -1; a <= 1 && all; ++a) {
                for (int b = -1; b <= 1 && all; ++b) all = m.ok(i + a, j + b);
            }
            if (!all) continue;
            const Vec3& c = m.at(i, j);
            const Vec3 xu = (0.5 / h1) * (m.at(i + 1, j) - m.at(i - 1, j));
            const Vec3 xv = (0.5 / h2) * (m.at(i, j + 1) - m.at(i, j - 1));
            const Vec3 xuu = (1.0 / (h1 * h1)) * (m.at(i + 1, j) - 2.0 * c + m.at(i - 1, j));
            const Vec3 xvv = (1.0 / (h2 * h2)) * (m.at(i, j + 1) - 2.0 * c + m.at(i, j - 1));
            const Vec3 xuv = (0.25 / (h1 * h2)) *
                             (m.at(i + 1, j + 1) - m.at(i + 1, j - 1) - m.at(i - 1, j + 1) + m.at(i - 1, j - 1));
            const auto n = unit_normal(m.s, xu, xv, guard);
            if (!n) continue;
            const std::size_t k = g.index(i, j);
            f.E.values[k] = pseudo_dot(m.s, xu, xu);
            f.F.values[k] = pseudo_dot(m.s, xu, xv);
            f.G.values[k] = pseudo_dot(m.s, xv, xv);
            f.L.values[k] = pseudo_dot(m.s, xuu, *n);
            f.M.values[k] = pseudo_dot(m.s, xuv, *n);
            f.N.values[k] = pseudo_dot(m.s, xvv, *n);
            for (ScalarField* p : {&f.E, &f.F, &f.G, &f.L, &f.M, &f.N}) p->valid[k] = 1;
            if (normal_norm) (*normal_norm)[k] = pseudo_dot(m.s, *n, *n);
        }
    }
    return f;
}

/// Gaussian curvature <N,N>(LN - M^2)/(EG - F^2) by finite differences.
/// Nodes with a degenerate metric are masked; if none survive the metric is
/// degenerate everywhere.
inline ScalarField numerical_curvature(const SurfaceMesh& m, double guard = 1e-12) {
    std::vector<double> nn;
    const FormCoefficients f = mesh_forms(m, &nn, guard);
    ScalarField K(m.grid, 0.0, false);
    for (std::size_t k = 0; k < K.values.size(); ++k) {
        if (!f.E.valid[k]) continue;
        const double det = f.E.values[k] * f.G.values[k] - f.F.values[k] * f.F.values[k];
        if (std::abs(det) <= guard) continue;
        K.values[k] = nn[k] * (f.L.values[k] * f.N.values[k] - f.M.values[k] * f.M.values[k]) / det;
        K.valid[k] = 1;
    }
    if (K.valid_count() == 0) throw Error(ErrorKind::DegenerateMetric, "no node has a non-degenerate metric");
    return K;
}

/// Curvature of an analytic surface from exact derivatives.
inline ScalarField exact_curvature(const AnalyticSurface& X, const Grid& grid) {
    ScalarField K(grid, 0.0, false);
    for (std::size_t i = 0; i < grid.x1.n; ++i) {
        for (std::size_t j = 0; j < grid.x2.n; ++j) {
            const double x1 = grid.x1.at(i), x2 = grid.x2.at(j);
            if (!X.defined(x1, x2)) continue;
            const auto [xu, xuu] = X.along(x1, x2, 1.0, 0.0);
            const auto [xv, xvv] = X.along(x1, x2, 0.0, 1.0);
            const Vec3 xdd = X.along(x1, x2, 1.0, 1.0).second;
            const Vec3 xuv = 0.5 * (xdd - xuu - xvv);
            const auto n = unit_normal(X.s, xu, xv);
            if (!n) continue;
            const double E = pseudo_dot(X.s, xu, xu), F = pseudo_dot(X.s, xu, xv), G = pseudo_dot(X.s, xv, xv);
            const double L = pseudo_dot(X.s, xuu, *n), M = pseudo_dot(X.s, xuv, *n), N = pseudo_dot(X.s, xvv, *n);
            K.set(i, j, pseudo_dot(X.s, *n, *n) * (L * N - M * M) / (E * G - F * F));
        }
    }
    return K;
}

/// Index of a mesh from the sign of EG - F^2 at the majority of valid nodes:
/// 0 for a Riemannian induced metric, 1 for a Lorentzian one.
inline int detect_index(const SurfaceMesh& m) {
    const FormCoefficients f = mesh_forms(m);
    long pos = 0, neg = 0;
    for (std::size_t k = 0; k < f.E.values.size(); ++k) {
        if (!f.E.valid[k]) continue;
        const double det = f.E.values[k] * f.G.values[k] - f.F.values[k] * f.F.values[k];
        if (det > 0) ++pos;
        if (det < 0) ++neg;
    }
    if (pos == 0 && neg == 0) throw Error(ErrorKind::DegenerateMetric, "no node with a usable metric");
    return neg > pos ? 1 : 0;
}

/// Index of the transformed surface: (-1)^rbar = delta (-1)^(s+r+1).
inline int predicted_index(const CaseConfig& c) noexcept { return c.target_index(); }

/// Xbar = X + lambda (C(a'/2)/C_l(a/2) X_x1 + S(a'/2)/S_l(a/2) X_x2), the
/// primed functions indexed by (-1)^r. Nodes where C_l or S_l of alpha/2 is
/// within guard of 0 are masked.
inline SurfaceMesh transform_surface(const SurfaceMesh& X, const ScalarField& alpha, const ScalarField& alpha_prime,
                                     const BTSystem& sys, double guard = 1e-10) {
    require_same_grid(X.grid, alpha.grid, "transform_surface");
    require_same_grid(X.grid, alpha_prime.grid, "transform_surface");
    const CaseConfig& c = sys.cfg;
    const Grid& g = X.grid;
    SurfaceMesh out{g, std::vector<Vec3>(g.size()), X.s, std::vector<std::uint8_t>(g.size(), 0), {}, {}};
    std::size_t degenerate = 0, usable = 0;
    for (std::size_t i = 0; i < g.x1.n; ++i) {
        for (std::size_t j = 0; j < g.x2.n; ++j) {
            const std::size_t k = g.index(i, j);
            if (!alpha.valid[k] || !alpha_prime.valid[k]) continue;
            const auto fr = detail::frame_at(X, i, j);
            if (!fr) continue;
            ++usable;
            const double Ca = gen_c(c.l, 0.5 * alpha.values[k]), Sa = gen_s(c.l, 0.5 * alpha.values[k]);
            if (std::abs(Ca) <= guard || std::abs(Sa) <= guard) {
                ++degenerate;
                continue;
            }
            const int rho = c.primed_xi();
            const double a1 = gen_c(rho, 0.5 * alpha_prime.values[k]) / Ca;
            const double a2 = gen_s(rho, 0.5 * alpha_prime.values[k]) / Sa;
            out.points[k] = X.points[k] + sys.params.lambda * (a1 * fr->xu + a2 * fr->xv);
            out.valid[k] = 1;
        }
    }
    if (usable > 0 && degenerate == usable) {
        throw Error(ErrorKind::DegenerateAlpha, "C_l or S_l of alpha/2 vanishes at every node");
    }
    return out;
}

struct CongruenceReport {
    std::size_t nodes = 0;
    double max_length_dev = 0.0;   ///< max |<v,v> - epsilon lambda^2|
    double mean_length_dev = 0.0;
    bool causal_ok = true;         ///< sign of <v,v> agrees with epsilon everywhere
    double max_normal_dev = 0.0;   ///< max over nodes of min(|<N,Nbar> - Lambda|, |<N,Nbar> + Lambda|)
    double mean_normal_dev = 0.0;
    double positive_orientation = 1.0;  ///< fraction of nodes where <N,Nbar> is closer to +Lambda
    double max_tangency = 0.0;     ///< max of |<v,N>| and |<v,Nbar>|
    double mean_tangency = 0.0;
    /// The same deviations divided by h^2 (1 + kappa), kappa being the squared
    /// ratio of second to first differences of both meshes at the node.
    double max_length_scaled = 0.0;
    double max_normal_scaled = 0.0;
    double max_tangency_scaled = 0.0;

    [[nodiscard]] bool passes_scaled(double c) const {
        return nodes > 0 && causal_ok && max_length_scaled <= c && max_normal_scaled <= c && max_tangency_scaled <= c;
    }

    [[nodiscard]] bool passes(double tol_length, double tol_normal, double tol_tangency) const {
        return nodes > 0 && causal_ok && max_length_dev <= tol_length && max_normal_dev <= tol_normal &&
               max_tangency <= tol_tangency;
    }
};

/// Certifies that segments X -> Xbar form the congruence of `sys`. The normal
/// of Xbar is only defined up to sign, and the sign of the cross-product normal
/// flips across curves where the metric degenerates, so the normal condition
/// is tested against +Lambda or -Lambda per node. Nodes where either induced
/// metric has |EG - F^2| <= metric_guard are skipped.
inline CongruenceReport congruence_check(const SurfaceMesh& X, const SurfaceMesh& Xbar, const BTSystem& sys,
                                         double metric_guard = 0.0) {
    require_same_grid(X.grid, Xbar.grid, "congruence_check");
    if (X.s != Xbar.s) throw Error(ErrorKind::GridMismatch, "meshes carry different signatures");
    const int s = X.s;
    const double eps = sys.cfg.epsilon, lam2 = sys.params.lambda * sys.params.lambda, Lam = sys.params.Lambda;
    CongruenceReport rep;
    double sum_len = 0.0, sum_nrm = 0.0, sum_tan = 0.0;
    std::size_t positive = 0;
    auto det = [s](const detail::NodeFrame& q) {
        const double F = pseudo_dot(s, q.xu, q.xv);
        return pseudo_dot(s, q.xu, q.xu) * pseudo_dot(s, q.xv, q.xv) - F * F;
    };
    const Grid& g = X.grid;
    const double h2 = std::pow(std::max(g.x1.h, g.x2.h), 2);
    for (std::size_t i = 0; i < g.x1.n; ++i) {
        for (std::size_t j = 0; j < g.x2.n; ++j) {
            const auto f = detail::frame_at(X, i, j);
            const auto fb = detail::frame_at(Xbar, i, j);
            if (!f || !fb) continue;
            const double scale = h2 * (1.0 + std::max(detail::bending(X, i, j), detail::bending(Xbar, i, j)));
            if (std::abs(det(*f)) <= metric_guard || std::abs(det(*fb)) <= metric_guard) continue;
            const auto n = unit_normal(s, f->xu, f->xv);
            const auto nb = unit_normal(s, fb->xu, fb->xv);
            if (!n || !nb) continue;
            const Vec3 v = Xbar.at(i, j) - X.at(i, j);
            const double vv = pseudo_dot(s, v, v);
            const double len = std::abs(vv - eps * lam2);
            if (vv * eps < 0.0) rep.causal_ok = false;
            const double nnb = pseudo_dot(s, *n, *nb);
            const double plus = std::abs(nnb - Lam), minus = std::abs(nnb + Lam);
            const double nrm = std::min(plus, minus);
            if (plus <= minus) ++positive;
            const double tan = std::max(std::abs(pseudo_dot(s, v, *n)), std::abs(pseudo_dot(s, v, *nb)));
            rep.max_length_dev = std::max(rep.max_length_dev, len);
            rep.max_normal_dev = std::max(rep.max_normal_dev, nrm);
            rep.max_tangency = std::max(rep.max_tangency, tan);
            rep.max_length_scaled = std::max(rep.max_length_scaled, len / scale);
            rep.max_normal_scaled = std::max(rep.max_normal_scaled, nrm / scale);
            rep.max_tangency_scaled = std::max(rep.max_tangency_scaled, tan / scale);
            sum_len += len;
            sum_nrm += nrm;
            sum_tan += tan;
            ++rep.nodes;
        }
    }
    if (rep.nodes == 0) return rep;
    const double n = static_cast<double>(rep.nodes);
    rep.mean_length_dev = sum_len / n;
    rep.mean_normal_dev = sum_nrm / n;
    rep.mean_tangency = sum_tan / n;
    rep.positive_orientation = static_cast<double>(positive) / n;
    return rep;
}

enum class BuiltinName { TimelikeK1, TimelikeKminus1 };

struct BuiltinSurface {
    AnalyticSurface surface;
    AnalyticSolution alpha;  ///< solution paired with the surface through the forms
    CaseConfig cfg;          ///< case whose forms match the surface
    SurfaceMesh mesh;
};

/// Time-like surfaces in R^3_1 with K = +1 (paired with 2 ln tanh(-x1/2), case 4)
/// and K = -1 (paired with 4 arctan e^x1, case 6).
inline BuiltinSurface builtin_surface(BuiltinName name, const Grid& grid) {
    BuiltinSurface b;
    if (name == BuiltinName::TimelikeK1) {
        if (grid.x1.min <= 0.0 && grid.x1.max() >= 0.0) {
            throw Error(ErrorKind::GridContainsSingularAxis, "the K=+1 surface is singular on x1=0");
        }
        b.surface = make_surface(1, [](auto x1, auto x2) {
            using std::cos, std::sin, std::sinh, std::cosh;
            const auto sh = sinh(x1);
            return std::array{cos(x2) / sh, sin(x2) / sh, x1 - cosh(x1) / sh};
        });
        b.cfg = case_from_id(4, -1);
        b.alpha = kink_seed(b.cfg, std::numbers::pi / 2, 0.0);
    } else {
        b.surface = make_surface(1, [](auto x1, auto x2) {
            using std::cosh, std::sinh, std::tanh;
            const auto ch = cosh(x1);
            return std::array{x1 - tanh(x1), cosh(x2) / ch, sinh(x2) / ch};
        });
        b.cfg = case_from_id(6, 1);
        b.alpha = example_solution({SeedKind::Example4Alpha});
    }
    b.mesh = sample_surface(b.surface, grid);
    return b;
}

}  // namespace blc
