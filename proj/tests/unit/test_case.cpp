#include "blc/case.hpp"
#include "blc/pde.hpp"
#include "blc/seeds.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace blc;
using std::numbers::pi;

namespace {

struct TableRow {
    int delta, epsilon, r, s, id, l;
    double lambda_at_1, Lambda_at_1;  // (lambda, Lambda) at phi = 1
};

// (delta, epsilon, r, s) -> case number and l, hand-copied from the case list
const TableRow kTable[] = {
    {-1, 1, 0, 0, 1, 1, std::sin(1.0), std::cos(1.0)},
    {1, 1, 0, 1, 2, 1, std::sinh(1.0), std::cosh(1.0)},
    {1, 1, 1, 1, 3, -1, std::sinh(1.0), std::cosh(1.0)},
    {1, -1, 1, 1, 4, -1, std::sin(1.0), std::cos(1.0)},
    {-1, 1, 0, 1, 5, -1, std::cosh(1.0), std::sinh(1.0)},
    {-1, 1, 1, 1, 6, 1, std::cosh(1.0), std::sinh(1.0)},
};

}  // namespace

TEST(DeriveCase, MatchesCaseTable) {
    for (const auto& row : kTable) {
        for (int tau : {1, -1}) {
            const CaseConfig c = derive_case(row.delta, row.epsilon, row.r, row.s, tau);
            EXPECT_EQ(to_int(c.id), row.id);
            EXPECT_EQ(c.l, row.l);
            EXPECT_EQ(c.tau, tau);
            EXPECT_EQ(c, case_from_id(row.id, tau));
        }
    }
}

TEST(DeriveCase, PrintedExamples) {
    const CaseConfig c1 = derive_case(-1, 1, 0, 0, -1);
    EXPECT_EQ(c1.id, CaseId::Case1);
    EXPECT_EQ(c1.l, 1);
    const CaseConfig c4 = derive_case(1, -1, 1, 1, -1);
    EXPECT_EQ(c4.id, CaseId::Case4);
    EXPECT_EQ(c4.l, -1);
    try {
        (void)derive_case(1, -1, 0, 1, 1);
        FAIL() << "expected InvalidCase";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidCase);
    }
}

TEST(DeriveCase, ExactlySixAdmissibleTuples) {
    int admissible = 0;
    for (int delta : {-1, 1}) {
        for (int eps : {-1, 1}) {
            for (int r : {0, 1}) {
                for (int s : {0, 1}) {
                    try {
                        const CaseConfig c = derive_case(delta, eps, r, s, 1);
                        ++admissible;
                        // l (-1)^(r+s+1) delta = 1
                        EXPECT_EQ(c.l * sign_pow(r + s + 1) * delta, 1);
                    } catch (const Error& e) {
                        EXPECT_EQ(e.kind(), ErrorKind::InvalidCase);
                    }
                }
            }
        }
    }
    EXPECT_EQ(admissible, 6);
}

TEST(DeriveCase, RejectsValuesOutsideDiscreteSets) {
    EXPECT_THROW((void)derive_case(0, 1, 0, 0, 1), Error);
    EXPECT_THROW((void)derive_case(-1, 2, 0, 0, 1), Error);
    EXPECT_THROW((void)derive_case(-1, 1, 2, 1, 1), Error);
    EXPECT_THROW((void)derive_case(-1, 1, 0, 0, 0), Error);
    EXPECT_THROW((void)case_from_id(7), Error);
}

TEST(DeriveCase, PartnerAndTargetIndex) {
    EXPECT_EQ(partner_case(case_from_id(5, -1)), case_from_id(6, -1));
    EXPECT_EQ(partner_case(case_from_id(6, 1)), case_from_id(5, 1));
    for (int id = 1; id <= 4; ++id) {
        const CaseConfig c = case_from_id(id);
        EXPECT_EQ(partner_case(c), c);
        EXPECT_TRUE(c.self_transform());
        EXPECT_EQ(c.target_index(), c.r);
    }
    // the index flips in the elliptic cases
    EXPECT_EQ(case_from_id(5).target_index(), 1);
    EXPECT_EQ(case_from_id(6).target_index(), 0);
    EXPECT_FALSE(case_from_id(5).self_transform());
    EXPECT_FALSE(case_from_id(6).self_transform());
}

TEST(CongruenceParams, ShapesPerCase) {
    for (const auto& row : kTable) {
        const CongruenceParams p = congruence_params(case_from_id(row.id), 1.0);
        EXPECT_DOUBLE_EQ(p.lambda, row.lambda_at_1);
        EXPECT_DOUBLE_EQ(p.Lambda, row.Lambda_at_1);
    }
}

TEST(CongruenceParams, PrintedExamples) {
    const CongruenceParams p1 = congruence_params(case_from_id(1), pi / 2);
    EXPECT_NEAR(p1.lambda, 1.0, 1e-15);
    EXPECT_NEAR(p1.Lambda, 0.0, 1e-15);
    const CongruenceParams p5 = congruence_params(case_from_id(5), 0.0);
    EXPECT_DOUBLE_EQ(p5.lambda, 1.0);
    EXPECT_DOUBLE_EQ(p5.Lambda, 0.0);
    const CaseConfig c2 = case_from_id(2);
    const CongruenceParams p2 = congruence_params(c2, std::log(1 + std::sqrt(2.0)));
    EXPECT_NEAR(p2.lambda, 1.0, 1e-14);
    EXPECT_NEAR(p2.Lambda, std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(lambda_relation(c2, p2), 1.0, 1e-12);
}

TEST(CongruenceParams, RangesAreEnforced) {
    auto rejects = [](int id, double phi) {
        try {
            (void)congruence_params(case_from_id(id), phi);
        } catch (const Error& e) {
            return e.kind() == ErrorKind::PhiOutOfRange;
        }
        return false;
    };
    EXPECT_TRUE(rejects(1, 0.0));
    EXPECT_TRUE(rejects(1, pi));
    EXPECT_TRUE(rejects(4, -0.1));
    EXPECT_TRUE(rejects(2, 0.0));
    EXPECT_TRUE(rejects(3, -1.0));
    EXPECT_TRUE(rejects(5, -1e-9));
    EXPECT_TRUE(rejects(6, std::numeric_limits<double>::infinity()));
    EXPECT_TRUE(rejects(1, std::nan("")));
    EXPECT_FALSE(rejects(6, 0.0));
    EXPECT_FALSE(rejects(1, 3.1));
}

TEST(CongruenceParams, LambdaRelationProperty) {
    std::mt19937_64 rng(11);
    for (int id = 1; id <= 6; ++id) {
        const CaseConfig c = case_from_id(id);
        const PhiRange range = phi_range(c.id);
        std::uniform_real_distribution<double> u(range.lo + 1e-6, std::isfinite(range.hi) ? range.hi - 1e-6 : 5.0);
        for (int k = 0; k < 1000; ++k) {
            const CongruenceParams p = congruence_params(c, u(rng));
            ASSERT_LT(std::abs(lambda_relation(c, p) - 1.0), 1e-12 * std::max(1.0, p.Lambda * p.Lambda)) << "case " << id;
            ASSERT_EQ(p.id, c.id);
        }
    }
}

TEST(GenTrig, PrintedExamples) {
    const GenTrig a = gen_trig(1, 0.0), b = gen_trig(-1, 0.0);
    EXPECT_EQ(a.C, 1.0);
    EXPECT_EQ(a.S, 0.0);
    EXPECT_EQ(a.T, 0.0);
    EXPECT_EQ(b.C, 1.0);
    EXPECT_EQ(b.S, 0.0);
    EXPECT_EQ(b.T, 0.0);
    EXPECT_NEAR(gen_trig(-1, std::log((1 + std::sqrt(5.0)) / 2)).S, 0.5, 1e-15);
}

TEST(GenTrig, PythagoreanIdentitySweep) {
    for (int xi : {1, -1}) {
        for (int k = 0; k < 1000; ++k) {
            const double phi = -4.0 + 8.0 * k / 999.0;
            const GenTrig t = gen_trig(xi, phi);
            ASSERT_NEAR(t.C * t.C + xi * t.S * t.S, 1.0, 1e-12 * std::max(1.0, t.C * t.C));
            if (std::abs(t.C) > 1e-8) ASSERT_NEAR(t.T, t.S / t.C, 1e-12 * std::max(1.0, std::abs(t.T)));
            ASSERT_EQ(gen_c(xi, phi), t.C);
            ASSERT_EQ(gen_s(xi, phi), t.S);
            ASSERT_EQ(gen_t(xi, phi), t.T);
        }
    }
}

TEST(Equation, ClassicalNames) {
    EXPECT_EQ(equation_for(case_from_id(1), 0).name(), "sine-Gordon (+)");
    EXPECT_EQ(equation_for(case_from_id(2), 0).name(), "sine-Gordon (-)");
    EXPECT_EQ(equation_for(case_from_id(3), 0).name(), "sinh-Gordon (-)");
    EXPECT_EQ(equation_for(case_from_id(4), 0).name(), "sinh-Gordon (+)");
    EXPECT_EQ(equation_for(case_from_id(5), 0).name(), "elliptic sinh-Gordon");
    EXPECT_EQ(equation_for(case_from_id(5), 1).name(), "elliptic sine-Gordon");
    EXPECT_EQ(equation_for(case_from_id(6), 0).name(), "elliptic sine-Gordon");
    EXPECT_EQ(equation_for(case_from_id(6), 1).name(), "elliptic sinh-Gordon");
    for (int id = 1; id <= 4; ++id) EXPECT_EQ(equation_for(case_from_id(id), 0), equation_for(case_from_id(id), 1));
    EXPECT_THROW((void)equation_for(case_from_id(1), 2), Error);
}

TEST(Equation, ResidualMatchesClassicalForms) {
    // a11 - a22 = sin a (case 1), = -sin a (case 2), = -sinh a (case 3), = sinh a (case 4),
    // a11 + a22 = sinh a (case 5 seed), = sin a (case 6 seed)
    const double a = 0.7, a11 = 0.3, a22 = -0.2;
    EXPECT_NEAR(equation_residual(equation_for(case_from_id(1), 0), a, a11, a22), a11 - a22 - std::sin(a), 1e-15);
    EXPECT_NEAR(equation_residual(equation_for(case_from_id(2), 0), a, a11, a22), a11 - a22 + std::sin(a), 1e-15);
    EXPECT_NEAR(equation_residual(equation_for(case_from_id(3), 0), a, a11, a22), a11 - a22 + std::sinh(a), 1e-15);
    EXPECT_NEAR(equation_residual(equation_for(case_from_id(4), 0), a, a11, a22), a11 - a22 - std::sinh(a), 1e-15);
    EXPECT_NEAR(equation_residual(equation_for(case_from_id(5), 0), a, a11, a22), a11 + a22 - std::sinh(a), 1e-15);
    EXPECT_NEAR(equation_residual(equation_for(case_from_id(6), 0), a, a11, a22), a11 + a22 - std::sin(a), 1e-15);
}

TEST(PdeResidual, ZeroFieldAnyCase) {
    const Grid g = Grid::square(-1, 1, 0.1);
    for (int id = 1; id <= 6; ++id) {
        for (int flag : {0, 1}) {
            EXPECT_EQ(stats(pde_residual(sample(zero_seed(), g), case_from_id(id), flag)).max_abs, 0.0);
            EXPECT_EQ(stats(pde_residual(zero_seed(), case_from_id(id), flag, g)).max_abs, 0.0);
        }
    }
}

TEST(PdeResidual, KinkConvergesAtOrderTwo) {
    const CaseConfig c = case_from_id(1);
    const AnalyticSolution k = kink_seed(c, pi / 2, 0.0);
    double prev = 0.0;
    for (double h : {0.04, 0.02, 0.01}) {
        const double r = stats(pde_residual(k, c, 1, Grid::square(-2, 2, h), DerivativeMode::FiniteDifference)).max_abs;
        if (prev > 0) EXPECT_NEAR(std::log2(prev / r), 2.0, 0.1);
        prev = r;
    }
    EXPECT_LT(stats(pde_residual(k, c, 1, Grid::square(-2, 2, 0.01))).max_abs, 1e-13);
}

TEST(PdeResidual, Example4SeedSolvesEllipticSineGordon) {
    const CaseConfig c = case_from_id(6);
    const AnalyticSolution a = example_solution({SeedKind::Example4Alpha});
    double prev = 0.0;
    for (double h : {0.04, 0.02}) {
        const ScalarField f = sample(a, Grid::square(-2, 2, h));
        const double r = stats(pde_residual(f, c, 0)).max_abs;
        if (prev > 0) EXPECT_NEAR(prev / r, 4.0, 0.3);
        prev = r;
    }
    EXPECT_LT(stats(pde_residual(a, c, 0, Grid::square(-2, 2, 0.02))).max_abs, 1e-13);
}

TEST(PdeResidual, GridTooSmall) {
    const Grid g{Axis::span(0, 0.1, 0.1), Axis::span(0, 1, 0.1)};
    try {
        (void)pde_residual(sample(zero_seed(), g), case_from_id(1), 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::GridTooSmall);
    }
}

TEST(AnalyticSolution, GradientMatchesCentralDifferences) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int id = 1; id <= 6; ++id) {
        const CaseConfig c = case_from_id(id);
        const AnalyticSolution k = kink_seed(c, 1.0, c.r == 1 ? -5.0 : 0.3);
        for (int n = 0; n < 50; ++n) {
            const double x1 = u(rng), x2 = u(rng);
            double h = 1e-3;
            double err[2];
            for (int q = 0; q < 2; ++q, h /= 2) {
                const Gradient g = k.grad(x1, x2);
                const double d1 = (k(x1 + h, x2) - k(x1 - h, x2)) / (2 * h);
                const double d2 = (k(x1, x2 + h) - k(x1, x2 - h)) / (2 * h);
                err[q] = std::max(std::abs(d1 - g.d1), std::abs(d2 - g.d2));
            }
            ASSERT_LT(err[0], 1e-5);
            if (err[0] > 1e-9) ASSERT_GT(err[0] / err[1], 3.0);
        }
    }
}
