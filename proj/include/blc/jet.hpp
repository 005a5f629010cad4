#pragma once

// Second-order forward-mode jets along one direction: a value together with
// its first and second directional derivatives. Closed forms written as
// templates over the scalar type get exact gradients and Hessian diagonals.

#include <cmath>

namespace blc {

struct Jet {
    double v = 0.0;
    double d = 0.0;
    double dd = 0.0;

    constexpr Jet() = default;
    constexpr Jet(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
    constexpr Jet(double value, double d1, double d2) : v(value), d(d1), dd(d2) {}

    static constexpr Jet variable(double value) { return {value, 1.0, 0.0}; }
};

constexpr Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
constexpr Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
constexpr Jet operator-(Jet a) { return {-a.v, -a.d, -a.dd}; }
constexpr Jet operator*(Jet a, Jet b) { return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd}; }
constexpr Jet operator/(Jet a, Jet b) {
    const double q = a.v / b.v;
    const double qd = (a.d - q * b.d) / b.v;
    const double qdd = (a.dd - 2.0 * qd * b.d - q * b.dd) / b.v;
    return {q, qd, qdd};
}
constexpr Jet operator+(Jet a, double b) { return {a.v + b, a.d, a.dd}; }
constexpr Jet operator+(double a, Jet b) { return b + a; }
constexpr Jet operator-(Jet a, double b) { return {a.v - b, a.d, a.dd}; }
constexpr Jet operator-(double a, Jet b) { return {a - b.v, -b.d, -b.dd}; }
constexpr Jet operator*(Jet a, double b) { return {a.v * b, a.d * b, a.dd * b}; }
constexpr Jet operator*(double a, Jet b) { return b * a; }
constexpr Jet operator/(Jet a, double b) { return {a.v / b, a.d / b, a.dd / b}; }
constexpr Jet operator/(double a, Jet b) { return Jet(a) / b; }

namespace detail {
/// Chain rule for f(a) given f, f', f'' at a.v.
constexpr Jet chain(Jet a, double f, double f1, double f2) {
    return {f, f1 * a.d, f2 * a.d * a.d + f1 * a.dd};
}
}  // namespace detail

inline Jet sin(Jet a) { const double s = std::sin(a.v), c = std::cos(a.v); return detail::chain(a, s, c, -s); }
inline Jet cos(Jet a) { const double s = std::sin(a.v), c = std::cos(a.v); return detail::chain(a, c, -s, -c); }
inline Jet sinh(Jet a) { const double s = std::sinh(a.v), c = std::cosh(a.v); return detail::chain(a, s, c, s); }
inline Jet cosh(Jet a) { const double s = std::sinh(a.v), c = std::cosh(a.v); return detail::chain(a, c, s, c); }
inline Jet exp(Jet a) { const double e = std::exp(a.v); return detail::chain(a, e, e, e); }
inline Jet log(Jet a) { return detail::chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Jet sqrt(Jet a) { const double r = std::sqrt(a.v); return detail::chain(a, r, 0.5 / r, -0.25 / (r * a.v)); }
inline Jet tanh(Jet a) {
    const double t = std::tanh(a.v), s2 = 1.0 - t * t;
    return detail::chain(a, t, s2, -2.0 * t * s2);
}
inline Jet atan(Jet a) {
    const double q = 1.0 / (1.0 + a.v * a.v);
    return detail::chain(a, std::atan(a.v), q, -2.0 * a.v * q * q);
}
inline Jet atanh(Jet a) {
    const double q = 1.0 / (1.0 - a.v * a.v);
    return detail::chain(a, std::atanh(a.v), q, 2.0 * a.v * q * q);
}

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }

}  // namespace blc
