#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "bergman/params.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/special_functions.hpp"

namespace bergman {

enum class OperatorTag { T, R };
enum class Method { quadrature, hypergeometric, asymptotic };

inline const char* to_string(OperatorTag op) { return op == OperatorTag::T ? "T" : "R"; }
inline const char* to_string(Method m) {
    switch (m) {
        case Method::quadrature: return "quadrature";
        case Method::hypergeometric: return "hypergeometric";
        default: return "asymptotic";
    }
}

struct SingularValueRecord {
    OperatorTag op;
    int n;
    double value;
    Method method;
    double error_est;
};

// Limits of n^{alpha+1} s_n for the two operators.
struct AsymptoticConstants {
    double c_T;
    double c_R;
};

// h(1) = B(beta+1, alpha+1), the complete value of the incomplete beta h.
inline double h_total(const Params& p) { return beta_fn(p.beta + 1.0, p.alpha + 1.0); }

namespace detail {

// int_0^x t^{e0} (1-t)^{e1} dt for e0, e1 > -1, without Params gating. The
// complement h(1)-h(r) equals this with (e0,e1) = (alpha,beta) at x = 1-r,
// which is what keeps the tail factors cancellation-free.
inline double incomplete_beta_integral(double x, double e0, double e1) {
    if (x <= 0.0) return 0.0;
    const double a = e0 + 1.0, b = e1 + 1.0;
    if (x >= 1.0) return beta_fn(a, b);
    if (x <= 0.25) {
        double coeff = 1.0, sum = 1.0 / a, term;
        for (int k = 1; k < 200; ++k) {
            coeff *= (k - 1.0 - e1) / k * x;
            term = coeff / (a + k);
            sum += term;
            if (std::abs(term) < 2 * eps * std::abs(sum)) break;
        }
        return std::pow(x, a) * sum;
    }
    const double logB = log_beta(a, b);
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - logB);
    double reg;
    if (x < (a + 1.0) / (a + b + 2.0))
        reg = front * beta_cf(a, b, x) / a;
    else
        reg = 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
    return std::exp(logB) * reg;
}

// (h(1) - h(r)) / h(1), evaluated from the distance to 1.
inline double h_deficit_ratio(double one_minus_r, const Params& p, double h1) {
    return incomplete_beta_integral(one_minus_r, p.alpha, p.beta) / h1;
}

// h(r) / r^{beta+1}, analytic at 0; pairing this with fused exponents keeps
// integrands like (h/h1)^2 r^{beta+n-1} from evaluating 0 * inf near r = 0.
inline double h_over_leading_power(double r, const Params& p) {
    const double a = p.beta + 1.0;
    if (r <= 0.25) {
        double coeff = 1.0, sum = 1.0 / a, term;
        for (int k = 1; k < 200; ++k) {
            coeff *= (k - 1.0 - p.alpha) / k * r;
            term = coeff / (a + k);
            sum += term;
            if (std::abs(term) < 2 * eps * std::abs(sum)) break;
        }
        return sum;
    }
    return incomplete_beta_h(r, p) / std::pow(r, a);
}

// Integrals of the spectra decay fast in n; scaling an integrand by a rough
// magnitude guess (clamped to 1) keeps the quadrature's absolute tolerance
// engaged at every n instead of washing out below it.
template <typename F>
IntegralResult integrate_scaled(F&& f, double magnitude_guess, const QuadratureSpec& spec) {
    const double scale = std::min(1.0, std::max(magnitude_guess, 1e-250));
    auto r = integrate_unit_interval(
        [&](double x, double xc) { return f(x, xc) / scale; }, spec);
    r.value *= scale;
    r.error_est *= scale;
    return r;
}

}  // namespace detail

// I_n = int_0^1 (h/h(1)) r^{beta+n-1} (1-r)^alpha dr, by direct quadrature or
// by the 3F2 closed form
//   B(alpha+1, 2beta+n+1) / ((beta+1) B(alpha+1,beta+1))
//     * 3F2(-alpha, beta+1, 2beta+n+1; beta+2, alpha+2beta+n+2; 1).
inline IntegralResult compute_I_n(int n, const Params& p, Method route,
                                  const QuadratureSpec& spec = {}) {
    if (n < 0) throw std::domain_error("compute_I_n: n >= 0 required");
    if (n == 0 && !(2.0 * p.beta + 1.0 > 0.0))
        throw std::domain_error(
            "compute_I_n: I_0 diverges for beta <= -1/2 (integrand ~ r^{2 beta})");
    const double h1 = h_total(p);
    const double log_guess = log_beta(p.alpha + 1.0, 2.0 * p.beta + n + 1.0) -
                             std::log(p.beta + 1.0) - std::log(h1);
    if (route == Method::quadrature) {
        // (h/h1) r^{beta+n-1} = (h r^{-beta-1}/h1) r^{2 beta + n}
        return detail::integrate_scaled(
            [&](double r, double rc) {
                return detail::h_over_leading_power(r, p) / h1 *
                       std::pow(r, 2.0 * p.beta + n) * std::pow(rc, p.alpha);
            },
            std::exp(log_guess), spec);
    }
    if (route != Method::hypergeometric)
        throw std::domain_error("compute_I_n: route must be quadrature or hypergeometric");
    const double tol = std::max(1e-14, 0.5 * spec.rel_tol);
    const auto f = hyp_3f2_unit(-p.alpha, p.beta + 1.0, 2.0 * p.beta + n + 1.0,
                                p.beta + 2.0, p.alpha + 2.0 * p.beta + n + 2.0, tol);
    const double pre = std::exp(log_beta(p.alpha + 1.0, 2.0 * p.beta + n + 1.0) -
                                std::log(p.beta + 1.0) -
                                log_beta(p.alpha + 1.0, p.beta + 1.0));
    IntegralResult out;
    out.value = pre * f.value;
    out.error_est = pre * f.abs_error_est + 4 * detail::eps * std::abs(out.value);
    out.evaluations = f.terms_used;
    out.converged = f.converged &&
                    out.error_est <= std::max(spec.abs_tol, spec.rel_tol * std::abs(out.value));
    return out;
}

namespace detail {

struct JSeriesControl {
    double tol_abs = 1e-13;
    int max_outer = 20000;
    long max_inner_terms = 10000000;  // work cap; exceeding it self-reports
};

// J_n by the corrected k-sum: with F_k the inner 3F2 value,
//   J_n = [ sum_k (-alpha)_k / ((beta+1+k) k!) * B(alpha+1, 3beta+n+k+2) * F_k ]
//         / ((beta+1) B^2(alpha+1, beta+1)),
//   F_k = 3F2(-alpha, beta+1, 3beta+n+k+2; beta+2, 3beta+alpha+n+k+3; 1).
// Known displays of this sum carry the Gamma-ratio upside down; the form here
// is the one the I_n formula induces and the one quadrature confirms.
inline IntegralResult j_series(int n, const Params& p, const JSeriesControl& ctl) {
    const double alpha = p.alpha, beta = p.beta;
    const double P =
        1.0 / ((beta + 1.0) * std::exp(2.0 * log_beta(alpha + 1.0, beta + 1.0)));
    const double s_outer = 2.0 * alpha + 2.0;

    IntegralResult out;
    double u = 1.0;                       // (-alpha)_k / k!
    double sum = 0.0, sum_abs = 0.0, inner_err = 0.0;
    double prev1 = 0.0, term = 0.0;
    double cp_k1 = 0.0, cp_t1 = 0.0, cp_k2 = 0.0, cp_t2 = 0.0;
    bool inner_ok = true;
    int checkpoint = 64;
    const int kpos = static_cast<int>(std::ceil(std::max(0.0, alpha))) + 1;
    double best_extrap = std::numeric_limits<double>::quiet_NaN();
    double best_extrap_err = std::numeric_limits<double>::infinity();

    int k = 0;
    for (; k < ctl.max_outer; ++k) {
        if (k > 0) {
            u *= (k - 1.0 - alpha) / k;
            if (u == 0.0) {  // terminating: alpha is a non-negative integer
                out.converged = inner_ok;
                break;
            }
        }
        const double M = 3.0 * beta + n + k + 2.0;
        const double w = u / (beta + 1.0 + k) * beta_fn(alpha + 1.0, M);
        // per-term error budget shrinks like 1/(k+1)^2 so the accumulated
        // inner error stays a fixed fraction of the total tolerance
        const double budget = 0.15 * ctl.tol_abs / ((k + 1.0) * (k + 1.0));
        const double tol_inner =
            std::min(1e-2, std::max(1e-14, budget / std::max(1e-300, std::abs(w) * P)));
        const auto f = hyp_3f2_unit(-alpha, beta + 1.0, M, beta + 2.0, M + alpha + 1.0,
                                    tol_inner);
        out.evaluations += f.terms_used;
        if (!f.converged) inner_ok = false;
        if (out.evaluations > ctl.max_inner_terms) inner_ok = false;
        inner_err += std::abs(w) * f.abs_error_est;
        prev1 = term;
        term = w * f.value;
        sum += term;
        sum_abs += std::abs(term);

        if (!inner_ok && out.evaluations > ctl.max_inner_terms) {
            out.value = std::isfinite(best_extrap) ? best_extrap : sum * P;
            out.error_est = std::isfinite(best_extrap)
                                ? best_extrap_err
                                : (std::abs(term) * (k + 1.0) + inner_err) * P;
            out.converged = false;
            return out;
        }
        if (k <= kpos + 2) continue;
        // geometric-harmonic tail bound on the outer sum
        const double tail_ghm =
            std::abs(term) * (1.0 + s_outer) / (s_outer * std::max(1e-3, 1.0 - std::abs(term / prev1)));
        if (tail_ghm + inner_err <= ctl.tol_abs / P) {
            out.converged = inner_ok;
            out.error_est = (tail_ghm + inner_err) * P;
            break;
        }
        if (k == checkpoint) {
            checkpoint *= 2;
            if (cp_k1 > 0.0 && cp_k2 > 0.0) {
                const auto m = algebraic_tail(s_outer, cp_k1, cp_t1, cp_k2, cp_t2,
                                              static_cast<double>(k), term);
                if (m.ok) {
                    const double est = (3.0 * std::abs(m.tail3 - m.tail2) + inner_err +
                                        8 * eps * sum_abs) * P;
                    if (est < best_extrap_err) {
                        best_extrap = (sum + m.tail3) * P;
                        best_extrap_err = est;
                    }
                    if (est <= ctl.tol_abs) {
                        out.value = best_extrap;
                        out.error_est = est;
                        out.converged = inner_ok;
                        return out;
                    }
                }
            }
            cp_k1 = cp_k2;
            cp_t1 = cp_t2;
            cp_k2 = static_cast<double>(k);
            cp_t2 = term;
        }
    }
    if (k >= ctl.max_outer) {
        // ran out of outer terms: report the best value we have, honestly
        if (std::isfinite(best_extrap)) {
            out.value = best_extrap;
            out.error_est = best_extrap_err;
        } else {
            out.value = sum * P;
            out.error_est = (std::abs(term) * (k + 1.0) + inner_err) * P;
        }
        out.converged = false;
        return out;
    }
    out.value = sum * P;
    if (out.error_est == 0.0)
        out.error_est = (inner_err + 4 * eps * sum_abs) * P;
    return out;
}

}  // namespace detail

// J_n = int_0^1 (h/h(1))^2 r^{beta+n-1} (1-r)^alpha dr; route=hypergeometric
// runs the corrected series above and self-reports non-convergence when the
// k-tail cannot be pinned down (possible for non-integer alpha).
inline IntegralResult compute_J_n(int n, const Params& p, Method route,
                                  const QuadratureSpec& spec = {}) {
    if (n < 0) throw std::domain_error("compute_J_n: n >= 0 required");
    if (n == 0 && !(3.0 * p.beta + 1.0 > -1.0))
        throw std::domain_error(
            "compute_J_n: J_0 requires 3 beta + 1 > -1 (integrand ~ r^{3 beta + 1})");
    const double h1 = h_total(p);
    if (route == Method::quadrature) {
        // (h/h1)^2 r^{beta+n-1} = (h r^{-beta-1}/h1)^2 r^{3 beta + n + 1}
        const double log_guess = log_beta(p.alpha + 1.0, 3.0 * p.beta + n + 2.0) -
                                 2.0 * std::log((p.beta + 1.0) * h1);
        return detail::integrate_scaled(
            [&](double r, double rc) {
                const double g = detail::h_over_leading_power(r, p) / h1;
                return g * g * std::pow(r, 3.0 * p.beta + n + 1.0) * std::pow(rc, p.alpha);
            },
            std::exp(log_guess), spec);
    }
    if (route != Method::hypergeometric)
        throw std::domain_error("compute_J_n: route must be quadrature or hypergeometric");
    detail::JSeriesControl ctl;
    // J_n decays with n; tie the series tolerance to its magnitude so that a
    // converged flag always certifies relative accuracy
    const double log_guess = log_beta(p.alpha + 1.0, 3.0 * p.beta + n + 2.0) -
                             2.0 * std::log((p.beta + 1.0) * h1);
    const double guess = std::min(1.0, std::max(std::exp(log_guess), 1e-150));
    ctl.tol_abs = std::max(1e-13, 0.5 * spec.rel_tol) * guess;
    auto out = detail::j_series(n, p, ctl);
    out.converged = out.converged &&
                    out.error_est <= std::max(spec.abs_tol, spec.rel_tol * std::abs(out.value));
    return out;
}

// Mellin transform of u_p(r) = (h(1)-h(r))^p:  M_{u_p}(eta) = int_0^1 u_p r^{eta-1} dr.
inline IntegralResult mellin_u_p(double eta, double power, const Params& p,
                                 const QuadratureSpec& spec = {}) {
    if (!(eta > 0.0)) throw std::domain_error("mellin_u_p: eta > 0 required");
    if (!(power > 0.0)) throw std::domain_error("mellin_u_p: p > 0 required");
    // M_{u_p}(eta) ~ Gamma(p(alpha+1)+1) / ((alpha+1)^p eta^{p(alpha+1)+1})
    const double expo = power * (p.alpha + 1.0) + 1.0;
    const double log_guess = log_gamma(expo) - power * std::log(p.alpha + 1.0) -
                             expo * std::log(eta);
    return detail::integrate_scaled(
        [&](double r, double rc) {
            const double deficit = detail::incomplete_beta_integral(rc, p.alpha, p.beta);
            return std::pow(deficit, power) * std::pow(r, eta - 1.0);
        },
        std::exp(log_guess), spec);
}

// c_T = lim n^{alpha+1} s_n(T) and c_R = lim n^{alpha+1} s_n(R), in log space.
inline AsymptoticConstants asymptotic_constants(const Params& p) {
    const double a = p.alpha;
    const double logB = log_beta(a + 1.0, p.beta + 1.0);
    const double log_cT =
        -std::log(a + 1.0) - logB + 0.5 * (log_gamma(3.0 * a + 3.0) - log_gamma(a + 1.0));
    const double log_cR = -logB + log_gamma(2.0 * a + 2.0) - log_gamma(a + 2.0);
    return {std::exp(log_cT), std::exp(log_cR)};
}

namespace detail {

// Closed-formula differences as single cancellation-free integrals:
//   D_T(n) = int (1 - h/h1)^2 r^{beta+n-1} (1-r)^alpha dr = B - 2 I_n + J_n
//   D_R(n) = int (1 - h/h1)   r^{beta+n}   (1-r)^alpha dr = B(.,beta+n+1) - I_{n+1}
inline double log_gamma_ratio_T(int n, const Params& p) {
    // Gamma(alpha+beta+2+n) / (Gamma(alpha+1) Gamma(beta+1+n))
    return log_gamma(p.alpha + p.beta + 2.0 + n) - log_gamma(p.alpha + 1.0) -
           log_gamma(p.beta + 1.0 + n);
}

inline IntegralResult difference_integral_T(int n, const Params& p,
                                            const QuadratureSpec& spec) {
    const double h1 = h_total(p);
    // D_T ~ s_n^2 / Gamma-ratio ~ c_T^2 n^{-2 alpha - 2} exp(-lgr)
    const auto c = asymptotic_constants(p);
    const double log_guess = 2.0 * std::log(c.c_T) -
                             (2.0 * p.alpha + 2.0) * std::log(static_cast<double>(n)) -
                             log_gamma_ratio_T(n, p);
    return integrate_scaled(
        [&](double r, double rc) {
            const double d = h_deficit_ratio(rc, p, h1);
            return d * d * std::pow(r, p.beta + n - 1.0) * std::pow(rc, p.alpha);
        },
        std::exp(log_guess), spec);
}

inline IntegralResult difference_integral_R(int n, const Params& p,
                                            const QuadratureSpec& spec) {
    const double h1 = h_total(p);
    const auto c = asymptotic_constants(p);
    const double log_pre = 0.5 * (std::log(p.alpha + p.beta + 2.0 + n) -
                                  std::log(p.beta + 1.0 + n)) +
                           log_gamma(p.alpha + p.beta + 2.0 + n) -
                           log_gamma(p.beta + 1.0 + n) - log_gamma(p.alpha + 1.0);
    const double log_guess = std::log(c.c_R) -
                             (p.alpha + 1.0) * std::log(static_cast<double>(std::max(n, 1))) -
                             log_pre;
    return integrate_scaled(
        [&](double r, double rc) {
            return h_deficit_ratio(rc, p, h1) * std::pow(r, p.beta + n) *
                   std::pow(rc, p.alpha);
        },
        std::exp(log_guess), spec);
}

inline constexpr int mellin_route_cutoff = 200;

}  // namespace detail

// s_{n+1}^2(T) = n (alpha+beta+2)_{n+1} / (3 h(1)^3 (beta+1)_{n+1}) M_{u_3}(n),
// the integration-by-parts identity; valid for producing s_m, m >= 2.
inline double singular_value_T_mellin(int n, const Params& p,
                                      const QuadratureSpec& spec = {}) {
    if (n < 2)
        throw std::domain_error("singular_value_T_mellin: identity valid for n >= 2");
    const int m = n - 1;
    const auto M3 = mellin_u_p(static_cast<double>(m), 3.0, p, spec);
    const double h1 = h_total(p);
    const double log_s2 = std::log(static_cast<double>(m)) +
                          log_pochhammer(p.alpha + p.beta + 2.0, n) -
                          log_pochhammer(p.beta + 1.0, n) + std::log(M3.value) -
                          std::log(3.0) - 3.0 * std::log(h1);
    return std::exp(0.5 * log_s2);
}

// s_n(R) = n/(2 h(1)^2) sqrt((a+b+2)_n (a+b+2)_{n+1} / ((b+1)_n (b+1)_{n+1})) M_{u_2}(n).
inline double singular_value_R_mellin(int n, const Params& p,
                                      const QuadratureSpec& spec = {}) {
    if (n < 1)
        throw std::domain_error("singular_value_R_mellin: identity valid for n >= 1");
    const auto M2 = mellin_u_p(static_cast<double>(n), 2.0, p, spec);
    const double h1 = h_total(p);
    const double ab2 = p.alpha + p.beta + 2.0, b1 = p.beta + 1.0;
    const double log_s = std::log(n / 2.0) - 2.0 * std::log(h1) +
                         0.5 * (log_pochhammer(ab2, n) + log_pochhammer(ab2, n + 1) -
                                log_pochhammer(b1, n) - log_pochhammer(b1, n + 1)) +
                         std::log(M2.value);
    return std::exp(log_s);
}

// Singular values of T = C P. Quadrature evaluates the defining difference as
// a single cancellation-free integral (identical to B - 2I + J); past n = 200
// both non-asymptotic methods switch to the Mellin identity, whose integrand
// is concentrated near r = 1 and stays well-conditioned at large n.
inline SingularValueRecord singular_value_T(int n, const Params& p, Method method,
                                            const QuadratureSpec& spec = {}) {
    if (n < 0) throw std::domain_error("singular_value_T: n >= 0 required");
    SingularValueRecord rec{OperatorTag::T, n, 0.0, method, 0.0};
    const double h1 = h_total(p);

    if (method == Method::asymptotic) {
        if (n == 0)
            throw std::domain_error("singular_value_T: asymptotic method refuses n = 0");
        const auto c = asymptotic_constants(p);
        rec.value = c.c_T * std::exp(-(p.alpha + 1.0) * std::log(static_cast<double>(n)));
        rec.error_est = 4 * detail::eps * rec.value;
        return rec;
    }

    if (n == 0) {
        auto J0 = compute_J_n(0, p, method, spec);
        if (method == Method::hypergeometric && !J0.converged)
            J0 = compute_J_n(0, p, Method::quadrature, spec);  // defer to quadrature
        if (!(J0.value > 0.0))
            throw std::runtime_error("singular_value_T: nonpositive J_0 signals quadrature failure");
        rec.value = std::sqrt(J0.value / h1);
        rec.error_est = rec.value * 0.5 * (J0.error_est / J0.value);
        if (!J0.converged) rec.error_est = std::numeric_limits<double>::infinity();
        return rec;
    }

    if (n > detail::mellin_route_cutoff && n >= 2) {
        const auto M3 = mellin_u_p(static_cast<double>(n - 1), 3.0, p, spec);
        rec.value = singular_value_T_mellin(n, p, spec);
        rec.error_est = rec.value * 0.5 * (M3.error_est / M3.value);
        if (!M3.converged) rec.error_est = std::numeric_limits<double>::infinity();
        return rec;
    }

    const double lgr = detail::log_gamma_ratio_T(n, p);
    double D, D_err;
    bool conv = true;
    if (method == Method::quadrature) {
        const auto d = detail::difference_integral_T(n, p, spec);
        D = d.value;
        D_err = d.error_est;
        conv = d.converged;
    } else {
        const double B = beta_fn(p.alpha + 1.0, p.beta + n);
        const auto I = compute_I_n(n, p, Method::hypergeometric, spec);
        auto J = compute_J_n(n, p, Method::hypergeometric, spec);
        if (!J.converged) J = compute_J_n(n, p, Method::quadrature, spec);  // defer to quadrature
        D = B - 2.0 * I.value + J.value;
        D_err = 2.0 * I.error_est + J.error_est + 8 * detail::eps * B;
        conv = I.converged && J.converged;
        if (!(D > 0.0) || D_err > 3e-8 * D) {
            // the subtraction cancels catastrophically: switch routes
            const auto d = detail::difference_integral_T(n, p, spec);
            D = d.value;
            D_err = d.error_est;
            conv = conv && d.converged;
        }
    }
    if (!(D > 0.0))
        throw std::runtime_error(
            "singular_value_T: negative radicand at n = " + std::to_string(n) +
            " signals quadrature failure");
    rec.value = std::exp(0.5 * (lgr + std::log(D)));
    rec.error_est = rec.value * 0.5 * (D_err / D);
    if (!conv) rec.error_est = std::numeric_limits<double>::infinity();
    return rec;
}

// Singular values of R = P C P; the n = 0 record is the first singular value.
inline SingularValueRecord singular_value_R(int n, const Params& p, Method method,
                                            const QuadratureSpec& spec = {}) {
    if (n < 0) throw std::domain_error("singular_value_R: n >= 0 required");
    SingularValueRecord rec{OperatorTag::R, n, 0.0, method, 0.0};

    if (method == Method::asymptotic) {
        if (n == 0)
            throw std::domain_error("singular_value_R: asymptotic method refuses n = 0");
        const auto c = asymptotic_constants(p);
        rec.value = c.c_R * std::exp(-(p.alpha + 1.0) * std::log(static_cast<double>(n)));
        rec.error_est = 4 * detail::eps * rec.value;
        return rec;
    }

    if (n > detail::mellin_route_cutoff) {
        const auto M2 = mellin_u_p(static_cast<double>(n), 2.0, p, spec);
        rec.value = singular_value_R_mellin(n, p, spec);
        rec.error_est = rec.value * (M2.error_est / std::abs(M2.value));
        if (!M2.converged) rec.error_est = std::numeric_limits<double>::infinity();
        return rec;
    }

    const double log_pre = 0.5 * (std::log(p.alpha + p.beta + 2.0 + n) -
                                  std::log(p.beta + 1.0 + n)) +
                           log_gamma(p.alpha + p.beta + 2.0 + n) -
                           log_gamma(p.beta + 1.0 + n) - log_gamma(p.alpha + 1.0);
    double D, D_err;
    bool conv = true;
    if (method == Method::quadrature) {
        const auto d = detail::difference_integral_R(n, p, spec);
        D = d.value;
        D_err = d.error_est;
        conv = d.converged;
    } else {
        const double B = beta_fn(p.alpha + 1.0, p.beta + n + 1.0);
        const auto I = compute_I_n(n + 1, p, Method::hypergeometric, spec);
        D = B - I.value;
        D_err = I.error_est + 8 * detail::eps * B;
        conv = I.converged;
        if (!(D > 0.0) || D_err > 3e-8 * D) {
            const auto d = detail::difference_integral_R(n, p, spec);
            D = d.value;
            D_err = d.error_est;
            conv = conv && d.converged;
        }
    }
    if (!(D > 0.0))
        throw std::runtime_error(
            "singular_value_R: negative factor at n = " + std::to_string(n) +
            " signals quadrature failure");
    rec.value = std::exp(log_pre) * D;
    rec.error_est = rec.value * (D_err / D);
    if (!conv) rec.error_est = std::numeric_limits<double>::infinity();
    return rec;
}

// d_n coefficients of the psi_n decomposition; satisfy
// s_n(T) = d_n sqrt((alpha+beta+2)_n / (beta+1)_n).
inline double d_n_coefficient(int n, const Params& p, const QuadratureSpec& spec = {}) {
    if (n < 0) throw std::domain_error("d_n_coefficient: n >= 0 required");
    const double h1 = h_total(p);
    if (n == 0) {
        const auto J0 = compute_J_n(0, p, Method::quadrature, spec);
        return std::sqrt(J0.value / h1);
    }
    const auto D = detail::difference_integral_T(n, p, spec);
    return std::sqrt(D.value / h1);
}

// Partial sum of s_n^p over n = 0..N (the Schatten diagnostic). The fastest
// dependable route is the quadrature/Mellin ladder used by the value methods.
inline double schatten_partial_sum(double power, int N, OperatorTag op, const Params& p,
                                   const QuadratureSpec& spec = {}) {
    if (!(power > 0.0)) throw std::domain_error("schatten_partial_sum: p > 0 required");
    if (N < 1) throw std::domain_error("schatten_partial_sum: N >= 1 required");
    double sum = 0.0;
    for (int n = 0; n <= N; ++n) {
        const auto rec = (op == OperatorTag::T) ? singular_value_T(n, p, Method::quadrature, spec)
                                                : singular_value_R(n, p, Method::quadrature, spec);
        sum += std::pow(rec.value, power);
    }
    return sum;
}

// The norm constant ||phi||_q for phi(z) = 1/z:
//   ||phi||_q^q = B(beta+1-q/2, alpha+1) / B(beta+1, alpha+1), 0 < q < 2(beta+1).
inline double norm_phi_q(double q, const Params& p) {
    if (!(q >= 1e-6))
        throw std::domain_error("norm_phi_q: q below 1e-6 guard (q -> 0 limit not evaluated)");
    if (!(q < 2.0 * (p.beta + 1.0)))
        throw std::domain_error("norm_phi_q: requires q < 2(beta+1), got q = " +
                                std::to_string(q));
    const double lg = log_beta(p.beta + 1.0 - 0.5 * q, p.alpha + 1.0) -
                      log_beta(p.beta + 1.0, p.alpha + 1.0);
    return std::exp(lg / q);
}

}  // namespace bergman
