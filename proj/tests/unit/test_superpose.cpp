#include "blc/backlund.hpp"
#include "blc/seeds.hpp"
#include "blc/superpose.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

using namespace blc;
using std::numbers::pi;

namespace {

const double kGolden = std::log((1 + std::sqrt(5.0)) / 2);

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::Io;
}

ScalarField constant(double v) { return ScalarField(Grid{Axis{0.0, 1.0, 1}, Axis{0.0, 1.0, 1}}, v); }

/// alpha* at a single node without branch unwrapping; nullopt where masked.
std::optional<double> one_node(const CaseConfig& c, double a, double a1, double a2, double phi1, double phi2) {
    SuperposeOptions opt;
    opt.unwrap = false;
    const ScalarField f = superpose({c, constant(a), constant(a1), constant(a2), phi1, phi2}, opt);
    if (!f.ok(0, 0)) return std::nullopt;
    return f.at(0, 0);
}

/// Coefficient of each printed hyperbolic formula.
double printed_K(int id, int tau, double phi1, double phi2) {
    const double sp = (phi2 + phi1) / 2, sm = (phi2 - phi1) / 2;
    switch (id) {
    case 1: return -tau * std::sin(sp) / std::sin(sm);
    case 2:
    case 3: return tau * std::sinh(sp) / std::sinh(sm);
    default: return tau * std::sin(sp) / std::sin(sm);
    }
}

std::pair<double, double> draw_phis(std::mt19937_64& rng, CaseId id) {
    const PhiRange range = phi_range(id);
    std::uniform_real_distribution<double> u(range.lo + 0.05, std::isfinite(range.hi) ? range.hi - 0.05 : 2.5);
    double p1 = u(rng), p2 = u(rng);
    while (std::abs(p1 - p2) < 0.05) p2 = u(rng);
    return {p1, p2};
}

}  // namespace

TEST(Superpose, HyperbolicMatchesPrintedFormulas) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int id = 1; id <= 4; ++id) {
        for (int tau : {1, -1}) {
            const CaseConfig c = case_from_id(id, tau);
            int evaluated = 0;
            for (int n = 0; n < 400; ++n) {
                const auto [p1, p2] = draw_phis(rng, c.id);
                const double a = u(rng), a1 = u(rng), a2 = u(rng);
                const double K = printed_K(id, tau, p1, p2);
                const auto v = one_node(c, a, a1, a2, p1, p2);
                if (id <= 2) {
                    ASSERT_TRUE(v.has_value());
                    const double lhs = std::tan((*v - a) / 4), rhs = K * std::tan((a1 - a2) / 4);
                    ASSERT_NEAR(lhs, rhs, 1e-11 * (1 + std::abs(rhs)) * (1 + rhs * rhs)) << "case " << id;
                    ++evaluated;
                } else {
                    const double rhs = K * std::tanh((a1 - a2) / 4);
                    ASSERT_EQ(v.has_value(), std::abs(rhs) < 1.0 - 1e-9) << "case " << id;
                    if (!v) continue;
                    ASSERT_NEAR(std::tanh((*v - a) / 4), rhs, 1e-12) << "case " << id;
                    ++evaluated;
                }
            }
            EXPECT_GT(evaluated, 50);
        }
    }
}

TEST(Superpose, EllipticSinhMatchesPrintedFormula) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    for (int tau : {1, -1}) {
        const CaseConfig c = case_from_id(5, tau);
        int evaluated = 0;
        for (int n = 0; n < 1000; ++n) {
            const auto [p1, p2] = draw_phis(rng, c.id);
            const double a = u(rng), a1 = u(rng), a2 = u(rng);
            const double P = tau * (std::sinh(p2) - std::sinh(p1)) * std::sin((a2 - a1) / 2);
            const double Q = (1 + std::sinh(p1) * std::sinh(p2)) * std::cos((a2 - a1) / 2) - std::cosh(p1) * std::cosh(p2);
            const double t = std::tanh(a / 2);
            const double rhs = (P - Q * t) / (Q - P * t);
            const auto v = one_node(c, a, a1, a2, p1, p2);
            if (!v) continue;
            ASSERT_NEAR(std::tanh(*v / 2), rhs, 1e-12);
            ++evaluated;
        }
        EXPECT_GT(evaluated, 500);
    }
}

TEST(Superpose, EllipticSineMatchesPrintedFormula) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    for (int tau : {1, -1}) {
        const CaseConfig c = case_from_id(6, tau);
        for (int n = 0; n < 1000; ++n) {
            const auto [p1, p2] = draw_phis(rng, c.id);
            const double a = u(rng), a1 = u(rng), a2 = u(rng);
            const double P = tau * (std::sinh(p2) - std::sinh(p1)) * std::sinh((a2 - a1) / 2);
            const double Q = (1 + std::sinh(p1) * std::sinh(p2)) * std::cosh((a2 - a1) / 2) - std::cosh(p1) * std::cosh(p2);
            // tan(v/2) = (P - Q tan(a/2))/(Q + P tan(a/2)), compared as a cross product
            const double num = P * std::cos(a / 2) - Q * std::sin(a / 2), den = Q * std::cos(a / 2) + P * std::sin(a / 2);
            const auto v = one_node(c, a, a1, a2, p1, p2);
            ASSERT_TRUE(v.has_value());
            const double cross = std::sin(*v / 2) * den - std::cos(*v / 2) * num;
            ASSERT_LT(std::abs(cross), 1e-12 * std::hypot(num, den));
        }
    }
}

TEST(Superpose, EqualTransformsGiveBaseOrItsNegative) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int id = 1; id <= 6; ++id) {
        const CaseConfig c = case_from_id(id, -1);
        for (int n = 0; n < 100; ++n) {
            const auto [p1, p2] = draw_phis(rng, c.id);
            const double a = u(rng), ap = u(rng);
            const auto v = one_node(c, a, ap, ap, p1, p2);
            ASSERT_TRUE(v.has_value());
            if (id <= 4) {
                ASSERT_NEAR(*v, a, 1e-14);
            } else if (id == 5) {
                ASSERT_NEAR(*v, -a, 1e-12);
            } else {
                ASSERT_NEAR(std::remainder(*v + a, 2 * pi), 0.0, 1e-12);
            }
        }
    }
}

TEST(Superpose, SwappingParametersLeavesResultInvariant) {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int id = 1; id <= 4; ++id) {
        const CaseConfig c = case_from_id(id, 1);
        for (int n = 0; n < 200; ++n) {
            const auto [p1, p2] = draw_phis(rng, c.id);
            EXPECT_NEAR(hyperbolic_coefficient(c, p1, p2), -hyperbolic_coefficient(c, p2, p1), 1e-12);
            const double a = u(rng), a1 = u(rng), a2 = u(rng);
            const auto v = one_node(c, a, a1, a2, p1, p2), w = one_node(c, a, a2, a1, p2, p1);
            ASSERT_EQ(v.has_value(), w.has_value());
            if (v) ASSERT_NEAR(*v, *w, 1e-12);
        }
    }
}

TEST(Superpose, EllipticConstantsIdentity) {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int n = 0; n < 1000; ++n) {
        const double p1 = u(rng), p2 = u(rng);
        const EllipticConstants k = elliptic_structure_constants(p1, p2, 1);
        ASSERT_NEAR(k.B * k.B - k.L * k.L, k.A * k.A, 1e-12 * k.B * k.B);
        const EllipticConstants m = elliptic_structure_constants(p1, p2, -1);
        EXPECT_EQ(m.A, -k.A);
    }
}

TEST(Superpose, Example2Alpha12) {
    const CaseConfig c = case_from_id(4, -1);
    const Grid g{Axis::span(-4, -0.05, 0.05), Axis::span(-2, 2, 0.05)};
    const ScalarField a1 = sample(kink_seed(c, pi / 2, 0.0), g), a2 = sample(kink_seed(c, pi / 3, 0.0), g);
    const ScalarField a12 = superpose({c, sample(zero_seed(), g), a1, a2, pi / 2, pi / 3});
    const double ratio = std::sin(5 * pi / 12) / std::sin(pi / 12);
    std::size_t compared = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!a1.valid[k] || !a2.valid[k]) continue;
        const double printed = 4 * std::atanh(ratio * std::tanh((a1.values[k] - a2.values[k]) / 4));
        if (!std::isfinite(printed)) {
            EXPECT_FALSE(a12.valid[k]);
            continue;
        }
        if (!a12.valid[k]) continue;
        ++compared;
        ASSERT_NEAR(a12.values[k], printed, 1e-12 * (1 + std::abs(printed)));
    }
    EXPECT_GT(compared, g.size() / 4);
}

TEST(Superpose, Example3ExplicitForm) {
    const CaseConfig c = case_from_id(5, 1);
    const Grid g = Grid::square(-3, 3, 0.05);
    const ScalarField a1 = sample(kink_seed(c, 0.0, 0.0), g), a2 = sample(kink_seed(c, kGolden, 0.0), g);
    const ScalarField a12 = superpose({c, sample(zero_seed(), g), a1, a2, 0.0, kGolden});
    const double r5 = std::sqrt(5.0);
    std::size_t compared = 0;
    for (std::size_t i = 0; i < g.x1.n; ++i) {
        for (std::size_t j = 0; j < g.x2.n; ++j) {
            const double x1 = g.x1.at(i), x2 = g.x2.at(j);
            const double e2 = std::exp((2 * x1 + x2) / r5), e1 = std::exp(x1);
            const double t = (e2 - e1) / (1 + e2 * e1);
            ASSERT_NEAR(t, std::tan((a2.at(i, j) - a1.at(i, j)) / 4), 1e-12);
            const double arg = t / ((1 - r5 / 2) - (1 + r5 / 2) * t * t);
            if (!a12.ok(i, j)) continue;
            ++compared;
            ASSERT_NEAR(a12.at(i, j), 2 * std::atanh(arg), 1e-10 * (1 + 1 / (1 - arg * arg)));
        }
    }
    EXPECT_GT(compared, g.size() / 2);
}

TEST(Superpose, Example4PrintedTangent) {
    const CaseConfig c = case_from_id(6, 1);
    const double phi2 = std::log(1 + std::sqrt(2.0));
    const Grid g = Grid::square(-1, 1, 0.05);
    const ScalarField a = sample(example_solution({SeedKind::Example4Alpha}), g);
    const ScalarField a1 = sample(example_solution({SeedKind::Example4Alpha1}), g);
    const ScalarField a2 = sample(example_solution({SeedKind::Example4Alpha2, 6, phi2}), g);
    const ScalarField a12 = superpose({c, a, a1, a2, 0.0, phi2});
    std::size_t compared = 0;
    for (std::size_t i = 0; i < g.x1.n; ++i) {
        for (std::size_t j = 0; j < g.x2.n; ++j) {
            if (!a12.ok(i, j)) continue;
            const double d = (a2.at(i, j) - a1.at(i, j)) / 2, sx = std::sinh(g.x1.at(i));
            const double P = std::sinh(phi2) * std::sinh(d), Q = std::cosh(d) - std::cosh(phi2);
            const double num = sx * P + Q, den = sx * Q - P;
            const double v = a12.at(i, j) / 2;
            ASSERT_LT(std::abs(std::sin(v) * den - std::cos(v) * num), 1e-12 * std::hypot(num, den));
            ++compared;
        }
    }
    EXPECT_GT(compared, g.size() / 2);
}

TEST(Superpose, SuperposedFieldIsAssociatedToBothParents) {
    // Example 2 diamond: alpha_12 is the phi_2 transform of alpha_1 and the phi_1 transform of alpha_2
    const CaseConfig c = case_from_id(4, -1);
    auto res = [&](double h) {
        const Grid g{Axis::span(-4, -1.5, h), Axis::span(-1, 1, h)};
        const ScalarField a1 = sample(kink_seed(c, pi / 2, -1.0), g), a2 = sample(kink_seed(c, pi / 3, -1.0), g);
        const ScalarField a12 = superpose({c, sample(zero_seed(), g), a1, a2, pi / 2, pi / 3});
        EXPECT_EQ(a12.valid_count(), g.size());
        return std::max(bt_residual(make_bt_system(c, pi / 3), a1, a12).max_abs(),
                        bt_residual(make_bt_system(c, pi / 2), a2, a12).max_abs());
    };
    const double r1 = res(0.02), r2 = res(0.01);
    EXPECT_LT(r2, 1e-3);
    EXPECT_NEAR(r1 / r2, 4.0, 0.5);
}

TEST(Superpose, Errors) {
    const ScalarField z = constant(0.0);
    EXPECT_EQ(kind_of([&] { (void)superpose({case_from_id(1), z, z, z, 1.0, 1.0}); }), ErrorKind::EqualPhis);
    EXPECT_EQ(kind_of([&] { (void)superpose({case_from_id(5), z, z, z, 0.5, 0.5}); }), ErrorKind::EqualPhis);
    EXPECT_EQ(kind_of([&] { (void)superpose_hyperbolic({case_from_id(5), z, z, z, 0.0, 1.0}); }),
              ErrorKind::WrongCaseFamily);
    EXPECT_EQ(kind_of([&] { (void)superpose_elliptic_sinh({case_from_id(6), z, z, z, 0.0, 1.0}); }),
              ErrorKind::WrongCaseFamily);
    EXPECT_EQ(kind_of([&] { (void)superpose_elliptic_sine({case_from_id(2), z, z, z, 0.5, 1.0}); }),
              ErrorKind::WrongCaseFamily);
    EXPECT_EQ(kind_of([&] { (void)superpose({case_from_id(1), z, z, z, 0.5, 4.0}); }), ErrorKind::PhiOutOfRange);
    const ScalarField other(Grid::square(0, 1, 0.5));
    EXPECT_EQ(kind_of([&] { (void)superpose({case_from_id(1), z, other, z, 0.5, 1.0}); }), ErrorKind::GridMismatch);
}

TEST(SingularityMask, ZeroInputsAreUnmasked) {
    const Grid g = Grid::square(-1, 1, 0.1);
    const ScalarField z = sample(zero_seed(), g);
    for (int id = 1; id <= 6; ++id) {
        const CaseConfig c = case_from_id(id);
        const auto [p1, p2] = id == 1 || id == 4 ? std::pair{0.5, 1.5} : std::pair{0.2, 1.1};
        const ScalarField m = superposition_margin({c, z, z, z, p1, p2});
        for (double guard : {0.0, 1e-10, 1e-3, 0.1}) {
            EXPECT_EQ(singularity_mask(m, guard).count_true(), g.size()) << "case " << id;
        }
        EXPECT_EQ(superpose({c, z, z, z, p1, p2}).valid_count(), g.size());
    }
}

TEST(SingularityMask, PointOnExample3CurveIsMasked) {
    // on x1 = 0, tan((alpha_2 - alpha_1)/4) = tanh(x2/(2 sqrt 5)); the curve has t = 1/(2 + sqrt 5)
    const CaseConfig c = case_from_id(5, 1);
    const double tc = 0.5 / (1 + std::sqrt(5.0) / 2);
    const double x2c = 2 * std::sqrt(5.0) * std::atanh(tc);
    const double h = 0.01;
    const Grid g{Axis::span(-0.5, 0.5, h), Axis{x2c - 50 * h, h, 101}};
    const ScalarField z = sample(zero_seed(), g);
    const ScalarField a1 = sample(kink_seed(c, 0.0, 0.0), g), a2 = sample(kink_seed(c, kGolden, 0.0), g);
    const ScalarField m = superposition_margin({c, z, a1, a2, 0.0, kGolden});
    const std::size_t i0 = 50, j0 = 50;
    ASSERT_NEAR(g.x1.at(i0), 0.0, 1e-12);
    ASSERT_NEAR(g.x2.at(j0), x2c, 1e-12);
    EXPECT_LT(std::abs(m.at(i0, j0)), 1e-6);
    for (double guard : {1e-10, 1e-6, 1e-3}) {
        const BoolField mask = singularity_mask(m, guard);
        EXPECT_FALSE(mask.at(i0, j0));
        EXPECT_TRUE(mask.at(i0, 0));
        EXPECT_TRUE(mask.at(i0, 100));
    }
    const ScalarField a12 = superpose({c, z, a1, a2, 0.0, kGolden});
    EXPECT_FALSE(a12.ok(i0, j0));
}

TEST(SingularityMask, ShrinksMonotonicallyAsGuardDecreases) {
    const CaseConfig c = case_from_id(5, 1);
    const Grid g = Grid::square(-3, 3, 0.02);
    const ScalarField z = sample(zero_seed(), g);
    const ScalarField m = superposition_margin(
        {c, z, sample(kink_seed(c, 0.0, 0.0), g), sample(kink_seed(c, kGolden, 0.0), g), 0.0, kGolden});
    std::size_t prev = g.size();
    std::size_t crossing = 0;
    for (double guard : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
        const std::size_t masked = g.size() - singularity_mask(m, guard).count_true();
        EXPECT_LE(masked, prev);
        prev = masked;
        crossing = masked;
    }
    // sign changes alone keep both curves masked
    const std::size_t at_zero = g.size() - singularity_mask(m, 0.0).count_true();
    EXPECT_LE(at_zero, crossing);
    EXPECT_GT(at_zero, g.x1.n);
}
