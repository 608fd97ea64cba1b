#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "bergman/kernels.hpp"

using namespace bergman;

namespace {
const QuadratureSpec kSpec{1e-12, 1e-14, 10};
const QuadratureSpec kDiscSpec{1e-7, 1e-7, 10};
}  // namespace

TEST(DiscPointType, RejectsPointsOutside) {
    EXPECT_THROW(DiscPoint(1.0, 0.0), std::domain_error);
    EXPECT_THROW(DiscPoint(0.8, 0.7), std::domain_error);
    EXPECT_NO_THROW(DiscPoint(0.8, 0.3));
}

TEST(ReproducingKernel, AtOrigin) {
    EXPECT_EQ(reproducing_kernel({0.0, 0.0}, Params(0.5, -0.5)), Complex(1.0, 0.0));
}

TEST(ReproducingKernel, ClassicalBergmanIdentity) {
    // alpha = beta = 0: K(xi) = 2F1(1,2;1;xi) = (1-xi)^{-2}
    const auto v = reproducing_kernel({0.5, 0.0}, Params(0.0, 0.0));
    EXPECT_NEAR(v.real(), 4.0, 4e-12);
    EXPECT_NEAR(std::abs(v.imag()), 0.0, 1e-12);
}

TEST(ReproducingKernel, MatchesUnrolledPartialSums) {
    const Params p(0.5, -0.5);
    const Complex xi{0.4, -0.3};
    Complex sum{1.0, 0.0};
    Complex zpow{1.0, 0.0};
    for (int n = 1; n <= 200; ++n) {
        const double coeff_log = log_pochhammer(p.alpha + p.beta + 2.0, n) -
                                 log_pochhammer(p.beta + 1.0, n);
        zpow *= xi;
        sum += std::exp(coeff_log) * zpow;
    }
    const auto v = reproducing_kernel(xi, p, 1e-14);
    EXPECT_LE(std::abs(v - sum), 1e-12);
}

TEST(ReproducingKernel, RadiusViolation) {
    EXPECT_THROW(reproducing_kernel({0.96, 0.0}, Params(0.5, -0.5)), std::domain_error);
}

TEST(BasisEn, Values) {
    const Params p00(0.0, 0.0);
    EXPECT_EQ(basis_e_n(0, DiscPoint(0.3, 0.2), p00), Complex(1.0, 0.0));
    // (2)_2/(1)_2 = 3: e_2(0.5) = sqrt(3) * 0.25
    const auto v = basis_e_n(2, DiscPoint(0.5, 0.0), p00);
    EXPECT_NEAR(v.real(), std::sqrt(3.0) * 0.25, 1e-13);
}

TEST(BasisEn, UnitNormUnderRadialQuadrature) {
    for (const Params& p : {Params(0.5, -0.5), Params(0.0, 0.0)}) {
        const double B = h_total(p);
        for (int n = 0; n <= 10; ++n) {
            const double log_norm2 = log_pochhammer(p.alpha + p.beta + 2.0, n) -
                                     log_pochhammer(p.beta + 1.0, n);
            const auto mom = integrate_unit_interval(
                [&](double t, double tc) {
                    return std::pow(t, p.beta + n) * std::pow(tc, p.alpha) / B;
                },
                kSpec);
            ASSERT_TRUE(mom.converged);
            EXPECT_NEAR(std::exp(log_norm2) * mom.value, 1.0, 1e-10) << n;
        }
    }
}

TEST(PsiN, UnweightedHandValue) {
    // alpha = beta = 0, z = 0.6: psi_1 = (0.36 - 1)/sqrt(1/3)
    const auto v = psi_n(1, DiscPoint(0.6, 0.0), Params(0.0, 0.0), kSpec);
    EXPECT_NEAR(v.real(), -0.64 * std::sqrt(3.0), 1e-10);
    EXPECT_NEAR(v.imag(), 0.0, 1e-14);
}

TEST(PsiN, VanishesTowardBoundary) {
    const Params p(0.5, -0.5);
    const double near_b = std::abs(psi_n(2, DiscPoint(0.999, 0.0), p, kSpec));
    const double mid = std::abs(psi_n(2, DiscPoint(0.6, 0.0), p, kSpec));
    EXPECT_LT(near_b, 0.05 * mid);
}

TEST(PsiN, PoleAtZeroForPsiZero) {
    EXPECT_THROW(psi_n(0, DiscPoint(0.0, 0.0), Params(0.5, -0.5), kSpec),
                 std::domain_error);
    EXPECT_NO_THROW(psi_n(1, DiscPoint(0.0, 0.0), Params(0.5, -0.5), kSpec));
}

TEST(TauClosed, XiZeroCollapsesToLeadingTerm) {
    const Params p(0.5, -0.5);
    const DiscPoint z(0.4, 0.3);
    const auto v = tau_closed(z, DiscPoint(0.0, 0.0), p);
    const double t = std::norm(z.value);
    const Complex expected = incomplete_beta_h(t, p) / (z.value * h_total(p));
    EXPECT_LE(std::abs(v - expected), 1e-12);
}

TEST(TauClosed, UnweightedHandValue) {
    // alpha = beta = 0, z = 0.5, xi = 0.4: 2 + (0.25-1)*(1-0.2)^{-2}*2 = -0.34375
    const auto v = tau_closed(DiscPoint(0.5, 0.0), DiscPoint(0.4, 0.0), Params(0.0, 0.0));
    EXPECT_NEAR(v.real(), -0.34375, 1e-12);
    EXPECT_NEAR(v.imag(), 0.0, 1e-13);
}

TEST(TauClosed, ResidueLimitAsXiVanishes) {
    const Params p(1.0, 0.0);
    const DiscPoint z(0.35, -0.55);
    const Complex limit = incomplete_beta_h(std::norm(z.value), p) /
                          (z.value * h_total(p));
    const auto v = tau_closed(z, DiscPoint(1e-9, 0.0), p);
    EXPECT_LE(std::abs(v - limit), 1e-7);
}

TEST(TauClosed, ErrorsOnPole) {
    const Params p(0.5, -0.5);
    EXPECT_THROW(tau_closed(DiscPoint(0.0, 0.0), DiscPoint(0.1, 0.0), p),
                 std::domain_error);
}

TEST(TauNumeric, TrivialXiReduction) {
    // alpha = beta = 0, z = 0.5, xi = 0: numeric ~ h(0.25)/(0.5 * 1) = 0.5
    const auto rep = tau_numeric(DiscPoint(0.5, 0.0), DiscPoint(0.0, 0.0),
                                 Params(0.0, 0.0), kDiscSpec);
    EXPECT_NEAR(rep.numeric.real(), 0.5, 1e-4);
    EXPECT_LE(rep.abs_gap, 1e-4);
}

TEST(TauNumeric, OracleAgreementSpecPoints) {
    {
        const auto rep = tau_numeric(DiscPoint(0.3, 0.2), DiscPoint(-0.4, 0.0),
                                     Params(0.5, -0.5), kDiscSpec);
        EXPECT_LE(rep.abs_gap, 1e-4);
    }
    {
        const auto rep = tau_numeric(DiscPoint(0.0, 0.6), DiscPoint(0.5, 0.3),
                                     Params(1.0, 0.0), kDiscSpec);
        EXPECT_LE(rep.abs_gap, 1e-4);
    }
}

TEST(TauNumeric, RejectsPointsBeyondResolutionContract) {
    const Params p(0.5, -0.5);
    EXPECT_THROW(tau_numeric(DiscPoint(0.85, 0.0), DiscPoint(0.1, 0.0), p, kDiscSpec),
                 std::domain_error);
    EXPECT_THROW(tau_numeric(DiscPoint(0.1, 0.0), DiscPoint(0.85, 0.0), p, kDiscSpec),
                 std::domain_error);
}

TEST(KernelOracleSamples, FixedAcrossCalls) {
    const auto a = kernel_check_sample_pairs();
    const auto b = kernel_check_sample_pairs();
    ASSERT_EQ(a.size(), 5u);
    for (size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].first, b[i].first);
        EXPECT_EQ(a[i].second, b[i].second);
        EXPECT_LT(std::abs(a[i].first), 0.76);
        EXPECT_GT(std::abs(a[i].first), 0.14);
        EXPECT_LT(std::abs(a[i].second), 0.76);
    }
}

TEST(GramPsi, NearIdentity) {
    for (const Params& p : {Params(0.5, -0.5), Params(0.0, 0.0)}) {
        const auto G = gram_psi(10, p, kSpec);
        ASSERT_EQ(G.size(), 11u);
        for (int m = 0; m <= 10; ++m) {
            for (int k = 0; k <= 10; ++k) {
                if (m == k)
                    EXPECT_NEAR(G[m][k], 1.0, 1e-8) << m;
                else
                    EXPECT_EQ(G[m][k], 0.0);
            }
        }
    }
}

TEST(GramPsi, UnweightedDiagonalAgainstSymbolicDn) {
    // alpha = beta = 0: d_n^2 = 2/(n(n+1)(n+2)) for n >= 1, d_0^2 = 1/2
    const Params p(0.0, 0.0);
    EXPECT_NEAR(d_n_coefficient(0, p, kSpec), std::sqrt(0.5), 1e-11);
    for (int n = 1; n <= 10; ++n) {
        const double sym = std::sqrt(2.0 / (n * (n + 1.0) * (n + 2.0)));
        EXPECT_NEAR(d_n_coefficient(n, p, kSpec), sym, 1e-10 * sym) << n;
        const auto D = detail::difference_integral_T(n, p, kSpec);
        EXPECT_NEAR(D.value / (h_total(p) * sym * sym), 1.0, 1e-10) << n;
    }
}

TEST(GramPsi, CostGuard) {
    EXPECT_THROW(gram_psi(33, Params(0.0, 0.0), kSpec), std::domain_error);
    EXPECT_THROW(gram_psi(0, Params(0.0, 0.0), kSpec), std::domain_error);
}
