#pragma once

// Discrete case algebra for the six Backlund-type line congruences in R^3_s:
// admissible (delta, epsilon, r, s, tau) tuples, the generalized trigonometric
// functions C_xi / S_xi / T_xi and the lambda-Lambda relation.

#include "blc/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace blc {

enum class CaseId : int { Case1 = 1, Case2, Case3, Case4, Case5, Case6 };

constexpr int to_int(CaseId id) noexcept { return static_cast<int>(id); }

/// (-1)^n for a non-negative integer n.
constexpr int sign_pow(int n) noexcept { return (n % 2 == 0) ? 1 : -1; }

struct CaseConfig {
    int delta = -1;    ///< normalized Gaussian curvature
    int epsilon = 1;   ///< causal type of the congruence
    int r = 0;         ///< index of the first surface
    int s = 0;         ///< signature of the ambient space
    int tau = 1;       ///< orientation
    int l = 1;         ///< (-1)^(r+s+1) * delta
    CaseId id = CaseId::Case1;

    /// Subscript of S in the equation for the transformed function, (-1)^r.
    [[nodiscard]] constexpr int primed_xi() const noexcept { return sign_pow(r); }
    /// Index of the surface produced by the transformation: (-1)^rbar = delta (-1)^(s+r+1).
    [[nodiscard]] constexpr int target_index() const noexcept {
        return (delta * sign_pow(s + r + 1) == 1) ? 0 : 1;
    }
    /// Cases 1-4: the transformation maps solutions of an equation to itself.
    [[nodiscard]] constexpr bool self_transform() const noexcept { return l == sign_pow(r); }
    [[nodiscard]] constexpr bool hyperbolic() const noexcept { return to_int(id) <= 4; }

    friend constexpr bool operator==(const CaseConfig&, const CaseConfig&) = default;
};

/// Builds a CaseConfig, rejecting any tuple outside the six admissible cases.
inline CaseConfig derive_case(int delta, int epsilon, int r, int s, int tau) {
    auto unit = [](int v) { return v == 1 || v == -1; };
    auto bit = [](int v) { return v == 0 || v == 1; };
    if (!unit(delta) || !unit(epsilon) || !unit(tau) || !bit(r) || !bit(s)) {
        throw Error(ErrorKind::InvalidCase, "parameters outside their discrete sets");
    }
    if (r > s) throw Error(ErrorKind::InvalidCase, "index r must not exceed signature s");
    if (delta == 1 && s != 1) throw Error(ErrorKind::InvalidCase, "delta=+1 requires s=1");
    if (epsilon == -1 && !(delta == 1 && s == 1 && r == 1)) {
        throw Error(ErrorKind::InvalidCase, "epsilon=-1 requires delta=+1 and r=s=1");
    }

    CaseConfig c{delta, epsilon, r, s, tau, sign_pow(r + s + 1) * delta, CaseId::Case1};
    if (s == 0) {
        c.id = CaseId::Case1;
    } else if (delta == 1) {
        c.id = (epsilon == -1) ? CaseId::Case4 : (r == 0 ? CaseId::Case2 : CaseId::Case3);
    } else {
        c.id = (r == 0) ? CaseId::Case5 : CaseId::Case6;
    }
    return c;
}

/// Canonical (delta, epsilon, r, s) for a case number, with the given orientation.
inline CaseConfig case_from_id(int id, int tau = 1) {
    switch (id) {
    case 1: return derive_case(-1, 1, 0, 0, tau);
    case 2: return derive_case(1, 1, 0, 1, tau);
    case 3: return derive_case(1, 1, 1, 1, tau);
    case 4: return derive_case(1, -1, 1, 1, tau);
    case 5: return derive_case(-1, 1, 0, 1, tau);
    case 6: return derive_case(-1, 1, 1, 1, tau);
    default: throw Error(ErrorKind::InvalidCase, "case id must be in 1..6, got " + std::to_string(id));
    }
}

/// Cases 5 and 6 exchange the elliptic sinh-Gordon and elliptic sine-Gordon
/// equations; the transformed function is governed by the other case.
inline CaseConfig partner_case(const CaseConfig& c) {
    switch (c.id) {
    case CaseId::Case5: return case_from_id(6, c.tau);
    case CaseId::Case6: return case_from_id(5, c.tau);
    default: return c;
    }
}

struct GenTrig {
    double C;
    double S;
    double T;
};

/// cos/sin/tan for xi=+1, cosh/sinh/tanh for xi=-1. Defined on all of R.
inline GenTrig gen_trig(int xi, double phi) noexcept {
    if (xi == 1) return {std::cos(phi), std::sin(phi), std::tan(phi)};
    return {std::cosh(phi), std::sinh(phi), std::tanh(phi)};
}

inline double gen_c(int xi, double x) noexcept { return xi == 1 ? std::cos(x) : std::cosh(x); }
inline double gen_s(int xi, double x) noexcept { return xi == 1 ? std::sin(x) : std::sinh(x); }
inline double gen_t(int xi, double x) noexcept { return xi == 1 ? std::tan(x) : std::tanh(x); }

struct CongruenceParams {
    double phi = 0.0;
    double lambda = 1.0;  ///< distance of the congruence
    double Lambda = 0.0;  ///< inner product of corresponding normals
    CaseId id = CaseId::Case1;
};

/// Open/closed interval of admissible phi for a case.
struct PhiRange {
    double lo;
    double hi;
    bool lo_closed;
    [[nodiscard]] bool contains(double phi) const noexcept {
        return (lo_closed ? phi >= lo : phi > lo) && phi < hi && std::isfinite(phi);
    }
};

inline PhiRange phi_range(CaseId id) noexcept {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (id) {
    case CaseId::Case1:
    case CaseId::Case4: return {0.0, std::numbers::pi, false};
    case CaseId::Case2:
    case CaseId::Case3: return {0.0, inf, false};
    case CaseId::Case5:
    case CaseId::Case6: return {0.0, inf, true};
    }
    return {0.0, 0.0, false};
}

/// (lambda, Lambda) for a case and angle parameter.
inline CongruenceParams congruence_params(const CaseConfig& c, double phi) {
    if (!phi_range(c.id).contains(phi)) {
        throw Error(ErrorKind::PhiOutOfRange,
                    "phi=" + std::to_string(phi) + " not admissible for case " + std::to_string(to_int(c.id)));
    }
    switch (c.id) {
    case CaseId::Case1:
    case CaseId::Case4: return {phi, std::sin(phi), std::cos(phi), c.id};
    case CaseId::Case2:
    case CaseId::Case3: return {phi, std::sinh(phi), std::cosh(phi), c.id};
    case CaseId::Case5:
    case CaseId::Case6: return {phi, std::cosh(phi), std::sinh(phi), c.id};
    }
    return {};
}

/// delta * [(-1)^(s+1) Lambda^2 - lambda^2 epsilon]; equals 1 for admissible parameters.
inline double lambda_relation(const CaseConfig& c, const CongruenceParams& p) noexcept {
    return c.delta * (sign_pow(c.s + 1) * p.Lambda * p.Lambda - p.lambda * p.lambda * c.epsilon);
}

/// A second-order equation  a_11 + op * a_22 + rhs * S_xi(a) = 0.
struct Equation {
    int op = -1;
    int rhs = -1;
    int xi = 1;

    friend constexpr bool operator==(const Equation&, const Equation&) = default;

    [[nodiscard]] bool elliptic() const noexcept { return op == 1; }

    [[nodiscard]] std::string name() const {
        const std::string kind = (xi == 1) ? "sine-Gordon" : "sinh-Gordon";
        if (op == 1) return "elliptic " + kind;
        // the wave-operator equations are written a_11 - a_22 = -rhs * S(a)
        return kind + (rhs == -1 ? " (+)" : " (-)");
    }
};

/// Equation solved by alpha (index_flag=0, S_l) or by the transformed
/// function (index_flag=1, S_(-1)^r).
inline Equation equation_for(const CaseConfig& c, int index_flag) {
    if (index_flag != 0 && index_flag != 1) {
        throw Error(ErrorKind::InvalidConfig, "index_flag must be 0 or 1");
    }
    return Equation{c.delta * sign_pow(c.s), c.epsilon * c.delta, index_flag == 0 ? c.l : c.primed_xi()};
}

}  // namespace blc
