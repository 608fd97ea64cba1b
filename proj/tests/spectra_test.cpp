#include <gtest/gtest.h>

#include <cmath>

#include <thread>

#include "bergman/spectra.hpp"

using namespace bergman;

namespace {
constexpr double kPi = 3.14159265358979323846;
const QuadratureSpec kSpec{1e-12, 1e-14, 10};

double rel_gap(double a, double b) { return std::abs(a - b) / std::abs(b); }

// closed forms at alpha = beta = 0, derived from I_n = 1/(n+1), J_n = 1/(n+2)
double sT_unweighted(int n) { return std::sqrt(2.0 / (n * (n + 2.0))); }
double sR_unweighted(int n) { return 1.0 / std::sqrt((n + 1.0) * (n + 2.0)); }
}  // namespace

TEST(HTotal, KnownValues) {
    EXPECT_NEAR(h_total(Params(0.0, 0.0)), 1.0, 1e-14);
    EXPECT_NEAR(h_total(Params(0.5, -0.5)), kPi / 2.0, 1e-13);
    EXPECT_NEAR(h_total(Params(2.0, 0.0)), 1.0 / 3.0, 1e-14);
    // agrees with the incomplete beta at r = 1
    const Params p(1.7, -0.25);
    EXPECT_NEAR(h_total(p), incomplete_beta_h(1.0, p), 1e-12 * h_total(p));
}

TEST(ComputeIn, UnweightedClosedForm) {
    const Params p(0.0, 0.0);
    for (int n : {0, 1, 2, 5, 20}) {
        const auto q = compute_I_n(n, p, Method::quadrature, kSpec);
        ASSERT_TRUE(q.converged);
        EXPECT_NEAR(q.value, 1.0 / (n + 1.0), 1e-12);
        const auto h = compute_I_n(n, p, Method::hypergeometric, kSpec);
        ASSERT_TRUE(h.converged);
        EXPECT_NEAR(h.value, 1.0 / (n + 1.0), 1e-12);
    }
}

TEST(ComputeIn, DualRouteAgreement) {
    const auto q = compute_I_n(1, Params(1.0, 0.0), Method::quadrature, kSpec);
    const auto h = compute_I_n(1, Params(1.0, 0.0), Method::hypergeometric, kSpec);
    ASSERT_TRUE(q.converged && h.converged);
    EXPECT_NEAR(q.value, 0.25, 1e-12);  // symbolic: 2 int (r - r^2/2)(1-r) dr
    EXPECT_LE(rel_gap(q.value, h.value), 1e-9);
}

TEST(ComputeIn, AcceleratedSmallMarginRoute) {
    // alpha = -0.5 gives 3F2 margin s = 1; value frozen from a 30-digit oracle
    const Params p(-0.5, -0.4, /*strict=*/false);
    const auto h = compute_I_n(3, p, Method::hypergeometric, kSpec);
    ASSERT_TRUE(h.converged);
    EXPECT_NEAR(h.value, 0.86257150823933467, 1e-9);
    const auto q = compute_I_n(3, p, Method::quadrature, kSpec);
    ASSERT_TRUE(q.converged);
    EXPECT_LE(rel_gap(h.value, q.value), 1e-8);
}

TEST(ComputeIn, MonotoneDecayToZero) {
    const Params p(0.5, -0.5);
    double prev = compute_I_n(1, p, Method::quadrature, kSpec).value;
    for (int n : {2, 4, 8, 16, 32, 64}) {
        const double cur = compute_I_n(n, p, Method::quadrature, kSpec).value;
        EXPECT_LT(cur, prev);
        prev = cur;
    }
    EXPECT_LT(prev, 0.05);
}

TEST(ComputeIn, IZeroGuard) {
    EXPECT_THROW(compute_I_n(0, Params(0.5, -0.5), Method::quadrature, kSpec),
                 std::domain_error);
    EXPECT_NO_THROW(compute_I_n(0, Params(0.5, -0.25), Method::quadrature, kSpec));
}

TEST(ComputeJn, UnweightedClosedForm) {
    const Params p(0.0, 0.0);
    for (int n : {0, 1, 3, 10}) {
        const auto q = compute_J_n(n, p, Method::quadrature, kSpec);
        ASSERT_TRUE(q.converged);
        EXPECT_NEAR(q.value, 1.0 / (n + 2.0), 1e-12);
        const auto s = compute_J_n(n, p, Method::hypergeometric, kSpec);
        ASSERT_TRUE(s.converged);
        EXPECT_NEAR(s.value, 1.0 / (n + 2.0), 1e-12);
    }
}

TEST(ComputeJn, TerminatingSeriesMatchesQuadrature) {
    // alpha = 1: (-1)_k kills k >= 2; J_2 = 19/210 symbolically
    const Params p(1.0, 0.0);
    const auto s = compute_J_n(2, p, Method::hypergeometric, kSpec);
    const auto q = compute_J_n(2, p, Method::quadrature, kSpec);
    ASSERT_TRUE(s.converged && q.converged);
    EXPECT_NEAR(s.value, 19.0 / 210.0, 1e-13);
    EXPECT_LE(rel_gap(s.value, q.value), 1e-10);
}

TEST(ComputeJn, SeriesNeverSilentlyWrong) {
    // across the four reference parameter sets: either the series converges
    // and matches quadrature to 1e-6, or it must say so
    const Params sets[] = {Params(-0.5, -0.4, false), Params(0.0, 0.0),
                           Params(0.5, -0.5), Params(1.7, -0.25)};
    for (const auto& p : sets) {
        for (int n : {1, 5, 17}) {
            const auto s = compute_J_n(n, p, Method::hypergeometric, kSpec);
            // decay margins >= 2 must genuinely converge; alpha = -0.5 may
            // self-report once the k-tail stalls
            if (p.alpha >= 0.0) {
                EXPECT_TRUE(s.converged)
                    << "alpha=" << p.alpha << " beta=" << p.beta << " n=" << n;
            }
            if (s.converged) {
                const auto q = compute_J_n(n, p, Method::quadrature, kSpec);
                EXPECT_LE(rel_gap(s.value, q.value), 1e-6)
                    << "alpha=" << p.alpha << " beta=" << p.beta << " n=" << n;
            }
        }
    }
}

TEST(ComputeJn, JZeroGuardInExploratoryRange) {
    // J_0 integrand ~ r^{3 beta + 1}: integrable only for beta > -2/3
    EXPECT_THROW(compute_J_n(0, Params(0.5, -0.7, false), Method::quadrature, kSpec),
                 std::domain_error);
    EXPECT_NO_THROW(compute_J_n(0, Params(0.5, -0.6, false), Method::quadrature, kSpec));
    EXPECT_NO_THROW(compute_J_n(1, Params(0.5, -0.7, false), Method::quadrature, kSpec));
}

TEST(ComputeJn, DominatedByIn) {
    for (const Params& p : {Params(0.5, -0.5), Params(1.7, -0.25)}) {
        for (int n : {1, 2, 8}) {
            const double J = compute_J_n(n, p, Method::quadrature, kSpec).value;
            const double I = compute_I_n(n, p, Method::quadrature, kSpec).value;
            EXPECT_LE(J, I);
        }
    }
}

TEST(MellinUp, UnweightedMoments) {
    const Params p(0.0, 0.0);
    const auto m1 = mellin_u_p(7.0, 1.0, p, kSpec);
    ASSERT_TRUE(m1.converged);
    EXPECT_NEAR(m1.value, 1.0 / 56.0, 1e-13);
    const auto m2 = mellin_u_p(5.0, 2.0, p, kSpec);
    ASSERT_TRUE(m2.converged);
    EXPECT_NEAR(m2.value, 1.0 / 105.0, 1e-13);
}

TEST(MellinUp, LargeEtaAsymptote) {
    // eta^{p(alpha+1)+1} M_{u_p}(eta) -> Gamma(p(alpha+1)+1) / (alpha+1)^p
    const Params p(0.5, -0.5);
    const double power = 2.0, eta = 1e4;
    const auto m = mellin_u_p(eta, power, p, kSpec);
    ASSERT_TRUE(m.converged);
    const double expo = power * (p.alpha + 1.0) + 1.0;
    const double limit = std::exp(log_gamma(expo)) / std::pow(p.alpha + 1.0, power);
    const double scaled = std::pow(eta, expo) * m.value;
    EXPECT_LE(std::abs(scaled / limit - 1.0), 0.01);
}

TEST(SingularValueT, ReferenceTableValues) {
    const Params p(0.5, -0.5);
    EXPECT_LE(rel_gap(singular_value_T(2, p, Method::quadrature, kSpec).value,
                      0.4206514145), 1e-7);
    EXPECT_LE(rel_gap(singular_value_T(21, p, Method::quadrature, kSpec).value,
                      0.01534612597), 1e-7);
}

TEST(SingularValueT, UnweightedClosedForm) {
    const Params p(0.0, 0.0);
    EXPECT_LE(rel_gap(singular_value_T(3, p, Method::quadrature, kSpec).value,
                      std::sqrt(2.0 / 15.0)), 1e-10);
}

TEST(SingularValueT, FirstSingularValue) {
    // s_0 = sqrt(J_0 / B); frozen 30-digit oracle value at (0.5, -0.5)
    const Params p(0.5, -0.5);
    const auto r = singular_value_T(0, p, Method::quadrature, kSpec);
    EXPECT_LE(rel_gap(r.value, 1.2163009160634746), 1e-9);
}

TEST(SingularValueR, ReferenceTableValues) {
    const Params p(0.5, -0.5);
    EXPECT_LE(rel_gap(singular_value_R(1, p, Method::quadrature, kSpec).value,
                      0.3250006690), 1e-7);
    EXPECT_LE(rel_gap(singular_value_R(15, p, Method::quadrature, kSpec).value,
                      0.01477548936), 1e-7);
}

TEST(SingularValueR, UnweightedClosedForm) {
    const Params p(0.0, 0.0);
    EXPECT_LE(rel_gap(singular_value_R(4, p, Method::quadrature, kSpec).value,
                      1.0 / std::sqrt(30.0)), 1e-10);
}

TEST(SingularValues, RouteAgreement) {
    const Params sets[] = {Params(-0.5, -0.4, false), Params(0.0, 0.0),
                           Params(0.5, -0.5), Params(1.7, -0.25)};
    for (const auto& p : sets) {
        for (int n : {1, 2, 7, 23, 50}) {
            const auto tq = singular_value_T(n, p, Method::quadrature, kSpec);
            const auto th = singular_value_T(n, p, Method::hypergeometric, kSpec);
            EXPECT_LE(rel_gap(th.value, tq.value), 1e-7)
                << "T alpha=" << p.alpha << " beta=" << p.beta << " n=" << n;
            const auto rq = singular_value_R(n, p, Method::quadrature, kSpec);
            const auto rh = singular_value_R(n, p, Method::hypergeometric, kSpec);
            EXPECT_LE(rel_gap(rh.value, rq.value), 1e-7)
                << "R alpha=" << p.alpha << " beta=" << p.beta << " n=" << n;
        }
    }
}

TEST(SingularValues, PositiveAndStrictlyDecreasing) {
    const Params sets[] = {Params(0.0, 0.0), Params(0.5, -0.5), Params(1.7, -0.25)};
    for (const auto& p : sets) {
        double prevT = singular_value_T(1, p, Method::quadrature, kSpec).value;
        double prevR = singular_value_R(1, p, Method::quadrature, kSpec).value;
        EXPECT_GT(prevT, 0.0);
        EXPECT_GT(prevR, 0.0);
        for (int n = 2; n <= 60; ++n) {
            const double t = singular_value_T(n, p, Method::quadrature, kSpec).value;
            const double r = singular_value_R(n, p, Method::quadrature, kSpec).value;
            EXPECT_LT(t, prevT) << "T n=" << n;
            EXPECT_LT(r, prevR) << "R n=" << n;
            prevT = t;
            prevR = r;
        }
    }
}

TEST(SingularValues, MellinIdentitySubset) {
    for (const Params& p : {Params(0.0, 0.0), Params(0.5, -0.5)}) {
        for (int n : {1, 2, 5, 12, 30}) {
            const double tm = singular_value_T_mellin(n + 1, p, kSpec);
            const double tt = singular_value_T(n + 1, p, Method::quadrature, kSpec).value;
            EXPECT_LE(rel_gap(tm, tt), 1e-8) << "T n=" << n;
            const double rm = singular_value_R_mellin(n, p, kSpec);
            const double rr = singular_value_R(n, p, Method::quadrature, kSpec).value;
            EXPECT_LE(rel_gap(rm, rr), 1e-8) << "R n=" << n;
        }
    }
}

TEST(SingularValues, MellinRouteTakesOverAtLargeN) {
    // the n > 200 ladder must join smoothly with the direct integral
    const Params p(0.5, -0.5);
    const auto direct = detail::difference_integral_T(201, p, kSpec);
    const double via_direct =
        std::exp(0.5 * (detail::log_gamma_ratio_T(201, p) + std::log(direct.value)));
    const auto rec = singular_value_T(201, p, Method::quadrature, kSpec);
    EXPECT_LE(rel_gap(rec.value, via_direct), 1e-9);
}

TEST(SingularValues, UnweightedClosedFormSweep) {
    const Params p(0.0, 0.0);
    for (int n = 1; n <= 100; ++n) {
        EXPECT_LE(rel_gap(singular_value_T(n, p, Method::quadrature, kSpec).value,
                          sT_unweighted(n)), 1e-10) << n;
        EXPECT_LE(rel_gap(singular_value_R(n, p, Method::quadrature, kSpec).value,
                          sR_unweighted(n)), 1e-10) << n;
    }
}

TEST(DnCoefficient, UnweightedValues) {
    const Params p(0.0, 0.0);
    EXPECT_NEAR(d_n_coefficient(1, p, kSpec), std::sqrt(1.0 / 3.0), 1e-12);
    EXPECT_NEAR(d_n_coefficient(0, p, kSpec), std::sqrt(0.5), 1e-12);
}

TEST(DnCoefficient, RelatesToSingularValueT) {
    const Params p(0.5, -0.5);
    const double d2 = d_n_coefficient(2, p, kSpec);
    const double factor = std::exp(0.5 * (log_pochhammer(p.alpha + p.beta + 2.0, 2) -
                                          log_pochhammer(p.beta + 1.0, 2)));
    const double s2 = singular_value_T(2, p, Method::quadrature, kSpec).value;
    EXPECT_LE(rel_gap(d2 * factor, s2), 1e-9);
}

TEST(DnCoefficient, IdentityAcrossParameterSets) {
    const Params sets[] = {Params(0.0, 0.0), Params(0.5, -0.5), Params(1.7, -0.25)};
    for (const auto& p : sets) {
        for (int n : {1, 5, 14, 30}) {
            const double dn = d_n_coefficient(n, p, kSpec);
            const double factor =
                std::exp(0.5 * (log_pochhammer(p.alpha + p.beta + 2.0, n) -
                                log_pochhammer(p.beta + 1.0, n)));
            const double sn = singular_value_T(n, p, Method::quadrature, kSpec).value;
            EXPECT_LE(rel_gap(dn * factor, sn), 1e-9)
                << "alpha=" << p.alpha << " n=" << n;
        }
    }
}

TEST(AsymptoticConstantsOp, ReferenceApproximants) {
    const auto c = asymptotic_constants(Params(0.5, -0.5));
    EXPECT_LE(rel_gap(c.c_R, 0.9577979850), 1e-9);                        // ~s_1(R)
    EXPECT_LE(rel_gap(c.c_T * std::pow(2.0, -1.5), 0.5436176218), 1e-9);  // ~s_2(T)
}

TEST(AsymptoticConstantsOp, UnweightedValues) {
    const auto c = asymptotic_constants(Params(0.0, 0.0));
    EXPECT_NEAR(c.c_T, std::sqrt(2.0), 1e-13);
    EXPECT_NEAR(c.c_R, 1.0, 1e-13);
}

TEST(AsymptoticLaw, DeviationHalvesAlongDoublingGrid) {
    for (const Params& p : {Params(0.5, -0.5), Params(0.0, 0.0)}) {
        const auto c = asymptotic_constants(p);
        double prevT = std::numeric_limits<double>::infinity();
        double prevR = std::numeric_limits<double>::infinity();
        for (int n : {256, 512, 1024}) {
            const double scale = std::pow(n, p.alpha + 1.0);
            const double devT =
                std::abs(scale * singular_value_T(n, p, Method::quadrature, kSpec).value /
                             c.c_T - 1.0);
            const double devR =
                std::abs(scale * singular_value_R(n, p, Method::quadrature, kSpec).value /
                             c.c_R - 1.0);
            EXPECT_LE(devT, prevT);
            EXPECT_LE(devR, prevR);
            prevT = devT;
            prevR = devR;
        }
        EXPECT_LE(prevT, 0.01);
        EXPECT_LE(prevR, 0.01);
    }
}

TEST(AsymptoticMethod, RefusesNZero) {
    const Params p(0.5, -0.5);
    EXPECT_THROW(singular_value_T(0, p, Method::asymptotic), std::domain_error);
    EXPECT_THROW(singular_value_R(0, p, Method::asymptotic), std::domain_error);
    EXPECT_GT(singular_value_T(1, p, Method::asymptotic).value, 0.0);
}

TEST(SchattenPartialSum, TelescopingLimits) {
    const Params p(0.0, 0.0);
    const int N = 2000;
    // sum s_n(R)^2, n = 0..N  ->  1 - 1/(N+2)
    const double sumR = schatten_partial_sum(2.0, N, OperatorTag::R, p, kSpec);
    EXPECT_NEAR(sumR, 1.0 - 1.0 / (N + 2.0), 2e-8);
    // sum s_n(T)^2, n = 1..N  ->  3/2 - 1/(N+1) - 1/(N+2); n = 0 adds J_0/B = 1/2
    const double sumT = schatten_partial_sum(2.0, N, OperatorTag::T, p, kSpec);
    const double expectedT = 0.5 + 1.5 - 1.0 / (N + 1.0) - 1.0 / (N + 2.0);
    EXPECT_NEAR(sumT, expectedT, 2e-8);
}

TEST(SchattenPartialSum, DivergenceDiagnosticAtCriticalExponent) {
    // p = 1/(alpha+1): s_n^p ~ c^p/n, so octave increments approach c^p ln 2
    const Params p(0.5, -0.5);
    const double power = 1.0 / (p.alpha + 1.0);
    const double s1 = schatten_partial_sum(power, 2500, OperatorTag::R, p, kSpec);
    const double s2 = schatten_partial_sum(power, 5000, OperatorTag::R, p, kSpec);
    const double s3 = schatten_partial_sum(power, 10000, OperatorTag::R, p, kSpec);
    const double inc1 = s2 - s1, inc2 = s3 - s2;
    EXPECT_GT(inc2, 0.5 * inc1);  // no plateau in sight
    EXPECT_GT(inc2, 0.01);
}

TEST(NormPhiQ, UnweightedHandValue) {
    // || 1/z ||_1 with the flat measure: (1/pi) int |z|^{-1} dxdy = 2
    EXPECT_NEAR(norm_phi_q(1.0, Params(0.0, 0.0)), 2.0, 1e-13);
}

TEST(NormPhiQ, MatchesQuadratureOfDefiningIntegral) {
    const Params p(0.5, -0.5);
    const double q = 0.5;
    const double B = h_total(p);
    const auto moment = integrate_unit_interval(
        [&](double t, double tc) {
            return std::pow(t, p.beta - 0.5 * q) * std::pow(tc, p.alpha) / B;
        },
        kSpec);
    ASSERT_TRUE(moment.converged);
    EXPECT_LE(rel_gap(norm_phi_q(q, p), std::pow(moment.value, 1.0 / q)), 1e-11);
}

TEST(NormPhiQ, DomainGuards) {
    const Params p(0.5, -0.5);
    EXPECT_THROW(norm_phi_q(1.0, p), std::domain_error);   // q >= 2(beta+1) = 1
    EXPECT_THROW(norm_phi_q(1e-7, p), std::domain_error);  // below the q -> 0 guard
    EXPECT_NO_THROW(norm_phi_q(0.99, p));
}

TEST(IntegralContracts, ErrorWithinDeclaredToleranceWhenConverged) {
    const QuadratureSpec spec{1e-9, 1e-11, 10};
    for (const Params& p : {Params(0.5, -0.5), Params(1.7, -0.25), Params(0.0, 0.0)}) {
        for (int n : {1, 4, 19, 42}) {
            for (Method route : {Method::quadrature, Method::hypergeometric}) {
                const auto I = compute_I_n(n, p, route, spec);
                if (I.converged)
                    EXPECT_LE(I.error_est,
                              std::max(spec.abs_tol, spec.rel_tol * std::abs(I.value)))
                        << "I alpha=" << p.alpha << " n=" << n;
                const auto J = compute_J_n(n, p, route, spec);
                if (J.converged)
                    EXPECT_LE(J.error_est,
                              std::max(spec.abs_tol, spec.rel_tol * std::abs(J.value)))
                        << "J alpha=" << p.alpha << " n=" << n;
            }
            const auto M = mellin_u_p(n + 0.5, 2.0, p, spec);
            if (M.converged)
                EXPECT_LE(M.error_est,
                          std::max(spec.abs_tol, spec.rel_tol * std::abs(M.value)));
        }
    }
}

TEST(Concurrency, RecordsIndependentOfThreading) {
    // pure computations: concurrent table generation must reproduce the
    // serial values bit for bit
    const Params p(0.5, -0.5);
    std::vector<double> serial(16);
    for (int n = 1; n <= 16; ++n)
        serial[n - 1] = singular_value_T(n, p, Method::quadrature, kSpec).value;
    std::vector<double> parallel(16);
    std::vector<std::thread> workers;
    for (int w = 0; w < 4; ++w) {
        workers.emplace_back([&, w] {
            for (int n = 1 + w; n <= 16; n += 4)
                parallel[n - 1] = singular_value_T(n, p, Method::quadrature, kSpec).value;
        });
    }
    for (auto& t : workers) t.join();
    for (int i = 0; i < 16; ++i) EXPECT_EQ(serial[i], parallel[i]) << i;
}

TEST(Records, FieldsSane) {
    const Params p(0.5, -0.5);
    const auto rec = singular_value_T(3, p, Method::quadrature, kSpec);
    EXPECT_EQ(rec.op, OperatorTag::T);
    EXPECT_EQ(rec.n, 3);
    EXPECT_EQ(rec.method, Method::quadrature);
    EXPECT_GE(rec.value, 0.0);
    EXPECT_TRUE(std::isfinite(rec.error_est));
}
