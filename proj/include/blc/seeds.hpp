#pragma once

// Closed-form starting solutions: the trivial solution, the one-kink family
// produced from it by each transformation, and the named explicit solutions.

#include "blc/case.hpp"
#include "blc/field.hpp"

#include <cmath>
#include <optional>

namespace blc {

/// Default exclusion band, measured in the argument of ln / arctanh.
inline constexpr double kDomainGuard = 1e-6;

inline AnalyticSolution zero_seed() {
    AnalyticSolution a;
    a.eval = [](double, double) { return 0.0; };
    a.grad = [](double, double) { return Gradient{}; };
    a.hess = [](double, double) { return SecondDerivatives{}; };
    return a;
}

/// Phase of the kink: x1/lambda - delta*tau*(Lambda/lambda)*x2 + c.
struct KinkPhase {
    double a1;
    double a2;
    double c;
    [[nodiscard]] double operator()(double x1, double x2) const noexcept { return a1 * x1 + a2 * x2 + c; }
};

inline KinkPhase kink_phase(const CaseConfig& cfg, double phi, double c) {
    const CongruenceParams p = congruence_params(cfg, phi);
    return {1.0 / p.lambda, -cfg.delta * cfg.tau * p.Lambda / p.lambda, c};
}

/// The kink obtained from the zero solution: 4 arctan(e^xi) when r=0 and
/// 2 ln tanh(-xi/2) on xi<0 when r=1. Derivatives are closed form.
inline AnalyticSolution kink_seed(const CaseConfig& cfg, double phi, double c, double guard = kDomainGuard) {
    const KinkPhase xi = kink_phase(cfg, phi, c);
    const bool sine = cfg.r == 0;
    const int rho = cfg.primed_xi();
    // profile f(xi) with f' = 2 S_rho(f/2) and f'' = S_rho(f)
    auto profile = [sine](double t) {
        return sine ? 4.0 * std::atan(std::exp(t)) : 2.0 * std::log(std::tanh(-0.5 * t));
    };
    AnalyticSolution a;
    a.eval = [=](double x1, double x2) { return profile(xi(x1, x2)); };
    a.grad = [=](double x1, double x2) {
        const double f1 = 2.0 * gen_s(rho, 0.5 * profile(xi(x1, x2)));
        return Gradient{xi.a1 * f1, xi.a2 * f1};
    };
    a.hess = [=](double x1, double x2) {
        const double f2 = gen_s(rho, profile(xi(x1, x2)));
        return SecondDerivatives{xi.a1 * xi.a1 * f2, xi.a2 * xi.a2 * f2};
    };
    if (!sine) {
        a.domain = [=](double x1, double x2) {
            const double t = xi(x1, x2);
            return t < 0.0 && std::tanh(-0.5 * t) > guard;
        };
    }
    return a;
}

enum class SeedKind { Zero, Kink, Example2Alpha, Example4Alpha, Example4Alpha1, Example4Alpha2 };

struct SeedSpec {
    SeedKind kind = SeedKind::Zero;
    int case_id = 1;
    double phi = 0.0;
    double c = 0.0;
    std::optional<double> extra;
    int tau = 1;
    double guard = kDomainGuard;
};

namespace detail {

inline AnalyticSolution example4_alpha() {
    return make_analytic([](auto x1, auto) {
        using std::atan, std::exp;
        return 4.0 * atan(exp(x1));
    });
}

inline AnalyticSolution example4_alpha1(double c1, double guard) {
    auto arg = [c1](auto x1, auto x2) {
        using std::cosh;
        return (c1 - x2) / cosh(x1);
    };
    return make_analytic(
        [arg](auto x1, auto x2) {
            using std::atanh;
            return 4.0 * atanh(arg(x1, x2));
        },
        [arg, guard](double x1, double x2) { return std::abs(arg(x1, x2)) < 1.0 - guard; });
}

inline AnalyticSolution example4_alpha2(double phi2, double c2, double guard) {
    const double sp = std::sinh(phi2), cp = std::cosh(phi2);
    auto ratio = [sp, cp, c2](auto x1, auto x2) {
        using std::sinh, std::cosh;
        const auto xi = (x1 + sp * x2) / cp + c2;
        return sp * (sinh(xi) - sinh(x1)) / (sinh(xi) * sinh(x1) + 1.0 - cp * cosh(xi) * cosh(x1));
    };
    return make_analytic(
        [ratio](auto x1, auto x2) {
            using std::atanh;
            return 2.0 * atanh(ratio(x1, x2));
        },
        [ratio, guard](double x1, double x2) {
            const double q = ratio(x1, x2);
            return std::isfinite(q) && std::abs(q) < 1.0 - guard;
        });
}

}  // namespace detail

/// Named closed forms. Example2Alpha is the case-4 kink with tau=-1; the
/// Example4 family lives in case 6 (phi = phi_2 and c = c_2 for Example4Alpha2).
inline AnalyticSolution example_solution(const SeedSpec& spec) {
    switch (spec.kind) {
    case SeedKind::Example2Alpha: return kink_seed(case_from_id(4, -1), spec.phi, spec.c, spec.guard);
    case SeedKind::Example4Alpha: return detail::example4_alpha();
    case SeedKind::Example4Alpha1: return detail::example4_alpha1(spec.c, spec.guard);
    case SeedKind::Example4Alpha2:
        if (!phi_range(CaseId::Case6).contains(spec.phi)) {
            throw Error(ErrorKind::PhiOutOfRange, "Example4Alpha2 needs phi >= 0");
        }
        return detail::example4_alpha2(spec.phi, spec.c, spec.guard);
    case SeedKind::Zero:
    case SeedKind::Kink: break;
    }
    throw Error(ErrorKind::UnknownSpec, "example_solution takes one of the named example kinds");
}

/// Any seed spec, including Zero and Kink.
inline AnalyticSolution make_seed(const SeedSpec& spec) {
    switch (spec.kind) {
    case SeedKind::Zero: return zero_seed();
    case SeedKind::Kink: return kink_seed(case_from_id(spec.case_id, spec.tau), spec.phi, spec.c, spec.guard);
    default: return example_solution(spec);
    }
}

}  // namespace blc
