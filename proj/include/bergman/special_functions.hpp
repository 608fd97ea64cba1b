#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "bergman/params.hpp"

namespace bergman {

// Outcome of a truncated series evaluation. `converged` is set only when the
// tail estimate reached the requested absolute tolerance; the value and the
// estimate are reported either way.
template <typename Scalar>
struct SeriesEval {
    Scalar value{};
    double abs_error_est = 0.0;
    int terms_used = 0;
    bool converged = false;
};

namespace detail {

inline constexpr double eps = std::numeric_limits<double>::epsilon();

inline bool is_nonpositive_integer(double x) {
    return x <= 0.5 && std::abs(x - std::round(x)) < 1e-12;
}

inline double abs_val(double x) { return std::abs(x); }
inline double abs_val(const std::complex<double>& x) { return std::abs(x); }

}  // namespace detail

// log Gamma(x) for x > 0. Backed by the C library's lgamma_r, which is
// correctly rounded to within a couple of ulp on the positive axis and does
// not touch the signgam global.
inline double log_gamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("log_gamma: requires x > 0, got " + std::to_string(x));
#if defined(__unix__) || defined(__APPLE__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

// B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b), evaluated in log space.
inline double beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("beta_fn: requires a, b > 0");
    return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

inline double log_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("log_beta: requires a, b > 0");
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

// log (a)_n for a > 0, n >= 0, with (a)_0 = 1.
inline double log_pochhammer(double a, std::int64_t n) {
    if (!(a > 0.0))
        throw std::domain_error("log_pochhammer: requires a > 0");
    if (n < 0)
        throw std::domain_error("log_pochhammer: requires n >= 0");
    if (n == 0) return 0.0;
    return log_gamma(a + static_cast<double>(n)) - log_gamma(a);
}

namespace detail {

// Hurwitz zeta sum_{k>=0} (q+k)^{-a} for a > 1, q > 0, by Euler-Maclaurin.
// Accurate to ~1e-14 relative once the summation base exceeds ~48.
inline double hurwitz_zeta(double a, double q) {
    double s = 0.0;
    while (q < 48.0) {
        s += std::pow(q, -a);
        q += 1.0;
    }
    const double qa = std::pow(q, -a);
    double em = qa * q / (a - 1.0) + 0.5 * qa;
    const double q2 = 1.0 / (q * q);
    double fact = a * qa / q;                       // (a)_1 q^{-a-1}
    em += fact / 12.0;                              // B2/2!
    fact *= (a + 1.0) * (a + 2.0) * q2;             // (a)_3 q^{-a-3}
    em -= fact / 720.0;                             // B4/4!
    fact *= (a + 3.0) * (a + 4.0) * q2;             // (a)_5 q^{-a-5}
    em += fact / 30240.0;                           // B6/6!
    return s + em;
}

// Tail of an algebraically decaying series. Given the last up-to-three terms
// t(k_i) of a one-signed tail behaving like k^{-1-s}(c0 + c1/k + c2/k^2),
// returns sum_{k>K} model(k). Fitting through two and three points gives the
// refinement pair used for the error estimate.
struct TailModel {
    double tail3 = 0.0;   // three-coefficient model
    double tail2 = 0.0;   // two-coefficient model
    bool ok = false;
};

inline TailModel algebraic_tail(double s, double kk0, double t0, double kk1, double t1,
                                double kk2, double t2) {
    // samples t(kk0), t(kk1), t(kk2) with kk0 < kk1 < kk2 = K; wide spacing
    // keeps the fit insensitive to the recurrence's rounding drift.
    TailModel m;
    if (t0 == 0.0 || t1 == 0.0 || t2 == 0.0) return m;
    if ((t0 > 0) != (t2 > 0) || (t1 > 0) != (t2 > 0)) return m;
    const long double k0 = kk0, k1 = kk1, k2 = kk2;
    const long double K = kk2;
    const long double p = 1.0L + static_cast<long double>(s);
    const long double g0 = static_cast<long double>(t0) * std::pow(k0, p);
    const long double g1 = static_cast<long double>(t1) * std::pow(k1, p);
    const long double g2 = static_cast<long double>(t2) * std::pow(k2, p);
    const long double x0 = 1.0L / k0, x1 = 1.0L / k1, x2 = 1.0L / k2;
    // Quadratic through (x_i, g_i): c0 + c1 x + c2 x^2 (Newton form).
    const long double d01 = (g1 - g0) / (x1 - x0);
    const long double d12 = (g2 - g1) / (x2 - x1);
    const long double c2q = (d12 - d01) / (x2 - x0);
    const long double c1q = d01 - c2q * (x0 + x1);
    const long double c0q = g0 - x0 * (c1q + c2q * x0);
    // Linear through the last two points.
    const long double c1l = d12;
    const long double c0l = g2 - c1l * x2;
    const double z1 = hurwitz_zeta(s + 1.0, static_cast<double>(K) + 1.0);
    const double z2 = hurwitz_zeta(s + 2.0, static_cast<double>(K) + 1.0);
    const double z3 = hurwitz_zeta(s + 3.0, static_cast<double>(K) + 1.0);
    m.tail3 = static_cast<double>(c0q) * z1 + static_cast<double>(c1q) * z2 +
              static_cast<double>(c2q) * z3;
    m.tail2 = static_cast<double>(c0l) * z1 + static_cast<double>(c1l) * z2;
    m.ok = std::isfinite(m.tail3) && std::isfinite(m.tail2);
    return m;
}

}  // namespace detail

// Gauss hypergeometric series 2F1(a, b; c; z) summed directly. The caller
// contract keeps |z| <= 0.95 so the plain power series with a term-ratio tail
// bound is enough; no continuation transformations.
//
//   2F1(a,b;c;z) = sum_k (a)_k (b)_k / ((c)_k k!) z^k
template <typename Scalar>
SeriesEval<Scalar> gauss_2f1(double a, double b, double c, Scalar z, double tol,
                             int max_terms = 20000) {
    if (detail::is_nonpositive_integer(c))
        throw std::domain_error("gauss_2f1: c must not be a non-positive integer");
    const double az = detail::abs_val(z);
    if (az > 0.95 * (1.0 + 64 * detail::eps))
        throw std::domain_error("gauss_2f1: |z| <= 0.95 required (series radius contract)");

    SeriesEval<Scalar> out;
    Scalar term = Scalar(1);
    Scalar sum = term;
    double sum_abs = 1.0;
    out.terms_used = 1;
    if (az == 0.0) {
        out.converged = true;
        out.value = sum;
        return out;
    }

    int k_terminate = -1;  // series is a polynomial if a or b is in -N
    if (detail::is_nonpositive_integer(a)) k_terminate = static_cast<int>(-std::round(a));
    if (detail::is_nonpositive_integer(b)) {
        const int kb = static_cast<int>(-std::round(b));
        if (k_terminate < 0 || kb < k_terminate) k_terminate = kb;
    }

    // smallest k past all sign changes of the recurrence factors
    const double kpos_d = std::max({0.0, -a, -b, -c});
    const int kpos = static_cast<int>(std::ceil(kpos_d)) + 1;

    for (int k = 0; k + 1 < max_terms; ++k) {
        if (k_terminate >= 0 && k >= k_terminate) {
            out.abs_error_est = 4 * detail::eps * sum_abs;
            out.converged = out.abs_error_est <= tol;
            break;
        }
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        sum_abs += detail::abs_val(term);
        ++out.terms_used;
        if (k + 1 >= kpos) {
            // ratio bound valid for all later terms: split the step factor as
            // [(a+j)/(1+j)] * [(b+j)/(c+j)] * z and majorize each at j = k+1
            const double kk = k + 1.0;
            const double f1 = 1.0 + std::max(0.0, (a - 1.0) / (kk + 1.0));
            const double f2 = 1.0 + std::max(0.0, (b - c) / (c + kk));
            const double rho = az * f1 * f2;
            if (rho < 1.0) {
                const double tail = detail::abs_val(term) * rho / (1.0 - rho);
                const double noise_floor = 4 * detail::eps * sum_abs;
                out.abs_error_est = tail + noise_floor;
                if (out.abs_error_est <= tol) {
                    out.converged = true;
                    break;
                }
                // the estimate is pinned to the rounding floor of the sum:
                // further terms cannot improve it
                if (tail <= 0.25 * noise_floor) break;
            }
        }
    }
    if (!out.converged && out.abs_error_est == 0.0)
        out.abs_error_est = detail::abs_val(term) * out.terms_used;
    out.value = sum;
    return out;
}

inline SeriesEval<double> gauss_2f1(double a, double b, double c, double x, double tol,
                                    int max_terms = 20000) {
    return gauss_2f1<double>(a, b, c, x, tol, max_terms);
}

// 3F2(a1,a2,a3; b1,b2; 1). Requires the convergence margin
// s = b1+b2-a1-a2-a3 > 0; terms then decay like k^{-1-s}. Two tail controls:
//  - geometric-harmonic majorant from the current term ratio (fast path),
//  - for small s, algebraic-tail extrapolation: fit k^{-1-s}(c0+c1/k+c2/k^2)
//    to the last terms and sum the model with Hurwitz-zeta values; the error
//    estimate is the spread between the 2- and 3-coefficient models.
inline SeriesEval<double> hyp_3f2_unit(double a1, double a2, double a3, double b1,
                                       double b2, double tol, int max_terms = 400000) {
    if (detail::is_nonpositive_integer(b1) || detail::is_nonpositive_integer(b2))
        throw std::domain_error("hyp_3f2_unit: lower parameters must not be non-positive integers");
    const double s = b1 + b2 - a1 - a2 - a3;
    if (!(s > 0.0))
        throw std::domain_error("hyp_3f2_unit: divergent series, margin s = " +
                                std::to_string(s) + " <= 0");

    SeriesEval<double> out;
    double term = 1.0, sum = 1.0, sum_abs = 1.0;
    double cp_k1 = 0.0, cp_t1 = 0.0, cp_k2 = 0.0, cp_t2 = 0.0;  // checkpoint history
    bool have_extrap = false;
    double extrap_value = 0.0, extrap_err = 0.0;
    out.terms_used = 1;

    int k_terminate = -1;
    for (double ai : {a1, a2, a3}) {
        if (detail::is_nonpositive_integer(ai)) {
            const int ka = static_cast<int>(-std::round(ai));
            if (k_terminate < 0 || ka < k_terminate) k_terminate = ka;
        }
    }
    const double kpos_d = std::max({0.0, -a1, -a2, -a3, -b1, -b2});
    const int kpos = static_cast<int>(std::ceil(kpos_d)) + 1;
    int checkpoint = 512;

    for (int k = 0; k + 1 < max_terms; ++k) {
        if (k_terminate >= 0 && k >= k_terminate) {
            out.abs_error_est = 4 * detail::eps * sum_abs;
            out.converged = out.abs_error_est <= tol;
            break;
        }
        const double ratio =
            (a1 + k) * (a2 + k) * (a3 + k) / ((b1 + k) * (b2 + k) * (k + 1.0));
        term *= ratio;
        sum += term;
        sum_abs += std::abs(term);
        ++out.terms_used;
        const int kk = k + 1;  // index of the term just added
        if (kk <= kpos) continue;

        const double ratio_next =
            (a1 + kk) * (a2 + kk) * (a3 + kk) / ((b1 + kk) * (b2 + kk) * (kk + 1.0));
        if (ratio_next > 0.0 && ratio_next < 1.0) {
            // harmonic model 1 - ratio ~ (1+s)/k  =>  tail ~ |t| (1+s)/(s(1-ratio))
            const double tail = std::abs(term) * (1.0 + s) / (s * (1.0 - ratio_next));
            const double noise_floor = 4 * detail::eps * sum_abs;
            out.abs_error_est = tail + noise_floor;
            if (out.abs_error_est <= tol) {
                out.converged = true;
                break;
            }
            if (tail <= 0.25 * noise_floor) break;  // pinned to the rounding floor
        }
        if (kk == checkpoint && kk >= kpos + 8) {
            checkpoint *= 2;
            if (cp_k1 > 0.0 && cp_k2 > 0.0) {
                const auto m = detail::algebraic_tail(s, cp_k1, cp_t1, cp_k2, cp_t2,
                                                      static_cast<double>(kk), term);
                if (m.ok) {
                    const double est =
                        3.0 * std::abs(m.tail3 - m.tail2) + 8 * detail::eps * sum_abs;
                    have_extrap = true;
                    extrap_value = sum + m.tail3;
                    extrap_err = est;
                    if (est <= tol) {
                        out.value = extrap_value;
                        out.abs_error_est = est;
                        out.converged = true;
                        return out;
                    }
                }
            }
            cp_k1 = cp_k2;
            cp_t1 = cp_t2;
            cp_k2 = static_cast<double>(kk);
            cp_t2 = term;
        }
    }
    if (out.converged) {
        out.value = sum;
    } else if (have_extrap && extrap_err < out.abs_error_est) {
        out.value = extrap_value;  // best non-converged estimate
        out.abs_error_est = extrap_err;
    } else {
        out.value = sum;
        if (out.abs_error_est == 0.0) out.abs_error_est = std::abs(term) * out.terms_used;
    }
    return out;
}

namespace detail {

// Continued fraction for the regularized incomplete beta (Lentz's method).
inline double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 400;
    constexpr double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double f = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        f *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        f *= del;
        if (std::abs(del - 1.0) < 4 * eps) return f;
    }
    throw std::runtime_error("beta_cf: continued fraction failed to converge");
}

}  // namespace detail

// h(r) = int_0^r t^beta (1-t)^alpha dt, the incomplete beta integral of the
// weight; h(1) = B(beta+1, alpha+1). Continued fraction scaled by the complete
// beta value, with the direct power series t^beta expansion near r = 0.
inline double incomplete_beta_h(double r, const Params& p) {
    if (!(r >= 0.0 && r <= 1.0))
        throw std::domain_error("incomplete_beta_h: r must lie in [0,1]");
    const double a = p.beta + 1.0;   // exponent at 0 plus one
    const double b = p.alpha + 1.0;  // exponent at 1 plus one
    if (r == 0.0) return 0.0;
    if (r == 1.0) return beta_fn(a, b);

    if (r <= 0.25) {
        // h(r) = sum_k (-alpha)_k / (k! (beta+k+1)) r^{beta+k+1}
        double coeff = 1.0, sum = 1.0 / a, term = sum;
        for (int k = 1; k < 200; ++k) {
            coeff *= (k - 1.0 - p.alpha) / k * r;
            term = coeff / (a + k);
            sum += term;
            if (std::abs(term) < 2 * detail::eps * std::abs(sum)) break;
        }
        return std::pow(r, a) * sum;
    }

    const double logB = log_beta(a, b);
    const double front = std::exp(a * std::log(r) + b * std::log1p(-r) - logB);
    double reg;
    if (r < (a + 1.0) / (a + b + 2.0))
        reg = front * detail::beta_cf(a, b, r) / a;
    else
        reg = 1.0 - front * detail::beta_cf(b, a, 1.0 - r) / b;
    return std::exp(logB) * reg;
}

}  // namespace bergman
