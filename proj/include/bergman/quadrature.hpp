#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "bergman/params.hpp"
#include "bergman/special_functions.hpp"

namespace bergman {

struct QuadratureSpec {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    int max_level = 10;

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol < 1.0) || !(abs_tol > 0.0 && abs_tol < 1.0))
            throw std::domain_error("QuadratureSpec: tolerances must lie in (0,1)");
        if (max_level < 3 || max_level > 12)
            throw std::domain_error("QuadratureSpec: max_level must lie in [3,12]");
    }
};

template <typename Scalar>
struct BasicIntegralResult {
    Scalar value{};
    double error_est = 0.0;
    long evaluations = 0;
    bool converged = false;
};

using IntegralResult = BasicIntegralResult<double>;

namespace detail {

// tanh-sinh (double-exponential) node: abscissa x in (0,1), its exact distance
// to 1, and the transformed trapezoid weight dx/dt at the node.
struct TsNode {
    double x;
    double xc;  // 1 - x, computed without cancellation
    double w;
};

inline constexpr int ts_table_max_level = 12;
inline constexpr double ts_t_cap = 6.0;  // e^{2u} stays below overflow

// Level 0 holds t = 0, +-1, ..., +-6; level L>0 holds the odd multiples of
// 2^-L. The trapezoid sum at level L uses levels 0..L with step 2^-L.
inline const std::vector<std::vector<TsNode>>& ts_tables() {
    static std::vector<std::vector<TsNode>> tables;
    static std::once_flag built;
    std::call_once(built, [] {
        tables.resize(ts_table_max_level + 1);
        for (int level = 0; level <= ts_table_max_level; ++level) {
            const double h = std::ldexp(1.0, -level);
            std::vector<TsNode>& tab = tables[level];
            const int stride = (level == 0) ? 1 : 2;
            const int start = (level == 0) ? 0 : 1;
            for (int k = start;; k += stride) {
                const double t = k * h;
                if (t > ts_t_cap) break;
                const double u = 1.5707963267948966 * std::sinh(t);
                const double e2u = std::exp(2.0 * u);
                const double xc = 1.0 / (1.0 + e2u);
                const double x = 1.0 - xc;  // = e2u/(1+e2u), fine away from 0
                const double sech = 2.0 / (std::exp(u) + std::exp(-u));
                const double w =
                    0.7853981633974483 * std::cosh(t) * sech * sech;
                if (k == 0) {
                    tab.push_back({x, xc, w});
                } else {
                    tab.push_back({x, xc, w});        // right of the midpoint
                    tab.push_back({xc, x, w});        // mirrored node
                }
            }
        }
    });
    return tables;
}

template <typename Scalar>
double result_abs(const Scalar& v) {
    if constexpr (std::is_same_v<Scalar, double>)
        return std::abs(v);
    else
        return std::abs(v);
}

}  // namespace detail

// Integral of f over (0,1) by tanh-sinh transformed trapezoid sums with level
// doubling. Handles algebraic endpoint singularities of exponent > -1. The
// integrand is called as f(x, xc) with xc = 1-x exact at the node, so factors
// like (1-x)^alpha keep full precision near the right endpoint. The error
// estimate is the last level difference plus the outermost-node residue (the
// latter guards exponents so close to -1 that the node range truncates mass).
template <typename Scalar, typename F>
BasicIntegralResult<Scalar> integrate_unit_interval_t(F&& f, const QuadratureSpec& spec) {
    spec.validate();
    const auto& tables = detail::ts_tables();
    BasicIntegralResult<Scalar> out;

    auto eval = [&](const detail::TsNode& node) -> Scalar {
        const Scalar v = f(node.x, node.xc);
        ++out.evaluations;
        if (!std::isfinite(detail::result_abs(v)))
            throw std::runtime_error(
                "integrate_unit_interval: integrand returned a non-finite value at x = " +
                std::to_string(node.x));
        return v;
    };

    Scalar weighted_prev{};
    double edge_residue = 0.0;
    // level 0
    {
        Scalar acc{};
        double e1 = 0.0, e2 = 0.0;
        for (const auto& node : tables[0]) {
            const Scalar v = node.w * eval(node);
            acc += v;
            e2 = e1;
            e1 = detail::result_abs(v);
        }
        edge_residue = std::max(e1, e2);
        weighted_prev = acc;  // step h=1
    }
    Scalar value_prev = weighted_prev;
    double diff = std::numeric_limits<double>::infinity();

    for (int level = 1; level <= spec.max_level; ++level) {
        const double h = std::ldexp(1.0, -level);
        Scalar acc{};
        double e1 = 0.0, e2 = 0.0;
        for (const auto& node : tables[level]) {
            const Scalar v = node.w * eval(node);
            acc += v;
            e2 = e1;
            e1 = detail::result_abs(v);
        }
        edge_residue = std::max(e1, e2);
        weighted_prev = weighted_prev + acc;       // running sum of w*f over all nodes
        const Scalar value = h * weighted_prev;
        diff = detail::result_abs(Scalar(value - value_prev));
        value_prev = value;
        const double tol =
            std::max(spec.abs_tol, spec.rel_tol * detail::result_abs(value));
        const double est = diff + edge_residue * h;
        if (level >= 3 && est <= tol) {
            out.value = value;
            out.error_est = est;
            out.converged = true;
            return out;
        }
    }
    out.value = value_prev;
    out.error_est = diff + edge_residue * std::ldexp(1.0, -spec.max_level);
    out.converged = false;
    return out;
}

// Plain real integrand taking (x, 1-x).
template <typename F>
IntegralResult integrate_unit_interval(F&& f, const QuadratureSpec& spec) {
    return integrate_unit_interval_t<double>(
        [&](double x, double xc) { return f(x, xc); }, spec);
}

namespace detail {

// C^4 window: 1 on [0, 1/2], 0 on [1, inf), order-9 smoothstep between.
inline double bump_window(double d, double radius) {
    const double q = 2.0 * d / radius - 1.0;
    if (q <= 0.0) return 1.0;
    if (q >= 1.0) return 0.0;
    const double q4 = q * q * q * q;
    const double step =
        q * q4 * (126.0 + q * (-420.0 + q * (540.0 + q * (-315.0 + q * 70.0))));
    return 1.0 - step;
}

inline constexpr double disc_patch_floor = 1e-3;

}  // namespace detail

// Integral of g against the probability measure
//   d mu = |w|^{2 beta} (1-|w|^2)^alpha / B(alpha+1, beta+1) dA(w)
// over the unit disc. Allowed singular points: the origin (measure exponent
// and/or an integrable 1/|w| growth) plus at most one interior point z with
// growth O(1/|w-z|). Domain splitting: a smooth window around each singular
// point is integrated in local polar coordinates (the area Jacobian cancels
// the growth), the windowed remainder in global polar coordinates; the radial
// direction always runs through the tanh-sinh rule, the angular direction
// through doubling trapezoid sums with nested reuse.
template <typename Scalar, typename G>
BasicIntegralResult<Scalar> integrate_disc_t(G&& g, std::vector<std::complex<double>> singular_at,
                                             const Params& p, const QuadratureSpec& spec) {
    spec.validate();
    using cplx = std::complex<double>;

    bool origin_singular = false;
    cplx z{0.0, 0.0};
    bool have_z = false;
    for (const cplx& s : singular_at) {
        if (!(std::abs(s) < 1.0))
            throw std::domain_error("integrate_disc: singular points must lie inside the disc");
        if (std::abs(s) < 1e-12) {
            origin_singular = true;
        } else if (!have_z) {
            z = s;
            have_z = true;
        } else {
            throw std::domain_error(
                "integrate_disc: at most one interior singular point besides the origin");
        }
    }
    (void)origin_singular;  // the origin patch always exists for the measure exponent
    if (have_z && std::abs(z) < 2.0 * detail::disc_patch_floor)
        throw std::domain_error(
            "integrate_disc: singular points closer than twice the local-disc radius");

    const double rho0 = have_z ? std::min(0.1, 0.5 * std::abs(z)) : 0.1;
    const double rho_z =
        have_z ? std::min({0.1, 0.5 * std::abs(z), 0.5 * (1.0 - std::abs(z))}) : 0.0;
    if (have_z && rho_z < detail::disc_patch_floor)
        throw std::domain_error("integrate_disc: singular point too close to the boundary");

    const double B = beta_fn(p.alpha + 1.0, p.beta + 1.0);
    const double two_pi = 6.283185307179586;

    BasicIntegralResult<Scalar> out;
    QuadratureSpec radial = spec;
    radial.abs_tol = std::max(spec.abs_tol / 32.0, 1e-15);
    radial.rel_tol = std::max(spec.rel_tol / 16.0, 1e-14);

    double radial_err_max = 0.0;
    bool angular_all_converged = true;

    // One component = angular trapezoid (doubling, nested) over radial integrals.
    auto angular_sweep = [&](auto&& radial_integral, int m_start, int m_max,
                             double theta_budget) -> Scalar {
        std::vector<Scalar> vals;  // radial integrals at theta_j = two_pi*j/M
        int M = m_start;
        vals.reserve(m_max);
        for (int j = 0; j < M; ++j) {
            vals.push_back(radial_integral(two_pi * j / M));
        }
        Scalar sum{};
        for (const Scalar& v : vals) sum += v;
        Scalar est_prev = sum * (two_pi / M);
        double diff = std::numeric_limits<double>::infinity();
        while (M < m_max) {
            std::vector<Scalar> next;
            next.reserve(2 * M);
            for (int j = 0; j < M; ++j) {
                next.push_back(vals[j]);
                next.push_back(radial_integral(two_pi * (2 * j + 1) / (2 * M)));
            }
            vals.swap(next);
            M *= 2;
            sum = Scalar{};
            for (const Scalar& v : vals) sum += v;
            const Scalar est = sum * (two_pi / M);
            diff = detail::result_abs(Scalar(est - est_prev));
            est_prev = est;
            if (diff <= theta_budget) break;
        }
        out.error_est += diff;
        if (!(diff <= theta_budget)) angular_all_converged = false;
        return est_prev;
    };

    // 2-D budget is driven by the absolute goal; components below work in the
    // raw scale (before the 1/(pi B) normalization).
    const double target = spec.abs_tol * (two_pi / 2.0) * B;

    // Origin patch: w = s e^{i th}, measure becomes s^{2 beta + 1} (1-s^2)^alpha.
    {
        auto radial_integral = [&](double theta) -> Scalar {
            const cplx dir = std::polar(1.0, theta);
            auto fr = [&](double v, double vc) -> Scalar {
                (void)vc;
                const double s = rho0 * v;
                const double win = detail::bump_window(s, rho0);
                if (win == 0.0) return Scalar{};
                const cplx w = s * dir;
                const double dens =
                    std::pow(s, 2.0 * p.beta + 1.0) * std::pow(1.0 - s * s, p.alpha);
                return Scalar(g(w)) * (win * dens * rho0);
            };
            auto r = integrate_unit_interval_t<Scalar>(fr, radial);
            radial_err_max = std::max(radial_err_max, r.error_est);
            out.evaluations += r.evaluations;
            return r.value;
        };
        out.value += angular_sweep(radial_integral, 8, 512, target / 6.0);
    }

    // Patch around z: w = z + s e^{i th}; s cancels the 1/|w-z| growth.
    if (have_z) {
        auto radial_integral = [&](double theta) -> Scalar {
            const cplx dir = std::polar(1.0, theta);
            auto fr = [&](double v, double vc) -> Scalar {
                (void)vc;
                const double s = rho_z * v;
                // below ~eps*|z| the sum z + s*dir rounds to z itself; those
                // nodes carry double-exponentially small weight, so drop them
                if (s < 1e-13) return Scalar{};
                const double win = detail::bump_window(s, rho_z);
                if (win == 0.0) return Scalar{};
                const cplx w = z + s * dir;
                const double aw = std::abs(w);
                const double dens =
                    std::pow(aw, 2.0 * p.beta) * std::pow(1.0 - aw * aw, p.alpha);
                return Scalar(g(w)) * (s * win * dens * rho_z);
            };
            auto r = integrate_unit_interval_t<Scalar>(fr, radial);
            radial_err_max = std::max(radial_err_max, r.error_est);
            out.evaluations += r.evaluations;
            return r.value;
        };
        out.value += angular_sweep(radial_integral, 8, 512, target / 6.0);
    }

    // Windowed remainder in global polar coordinates.
    {
        auto radial_integral = [&](double theta) -> Scalar {
            const cplx dir = std::polar(1.0, theta);
            auto fr = [&](double r, double rc) -> Scalar {
                double win = 1.0 - detail::bump_window(r, rho0);
                if (have_z && win > 0.0)
                    win *= 1.0 - detail::bump_window(std::abs(r * dir - z), rho_z);
                if (win == 0.0) return Scalar{};
                const cplx w = r * dir;
                const double one_minus_r2 = rc * (1.0 + r);
                const double dens =
                    std::pow(r, 2.0 * p.beta + 1.0) * std::pow(one_minus_r2, p.alpha);
                return Scalar(g(w)) * (win * dens);
            };
            auto res = integrate_unit_interval_t<Scalar>(fr, radial);
            radial_err_max = std::max(radial_err_max, res.error_est);
            out.evaluations += res.evaluations;
            return res.value;
        };
        out.value += angular_sweep(radial_integral, 16, 1024, target / 3.0);
    }

    const double norm = 1.0 / ((two_pi / 2.0) * B);  // 1/(pi B)
    out.value *= norm;
    out.error_est = (out.error_est + two_pi * radial_err_max) * norm;
    const double tol = std::max(spec.abs_tol, spec.rel_tol * detail::result_abs(out.value));
    out.converged = angular_all_converged && out.error_est <= tol;
    return out;
}

template <typename G>
IntegralResult integrate_disc(G&& g, const std::vector<std::complex<double>>& singular_at,
                              const Params& p, const QuadratureSpec& spec) {
    return integrate_disc_t<double>([&](std::complex<double> w) { return g(w); }, singular_at,
                                    p, spec);
}

}  // namespace bergman
