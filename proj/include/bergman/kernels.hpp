#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bergman/params.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/spectra.hpp"
#include "bergman/special_functions.hpp"

namespace bergman {

using Complex = std::complex<double>;

// A point of the open unit disc.
struct DiscPoint {
    Complex value;
    explicit DiscPoint(Complex v) : value(v) {
        if (!(std::abs(v) < 1.0))
            throw std::domain_error("DiscPoint: |z| < 1 required");
    }
    DiscPoint(double re, double im) : DiscPoint(Complex(re, im)) {}
};

struct KernelCheckReport {
    Complex z;
    Complex xi;
    Complex closed_form;
    Complex numeric;
    double abs_gap;
    double error_est;
};

// Reproducing kernel K(xi) = 2F1(1, alpha+beta+2; beta+1; xi), |xi| <= 0.95.
inline Complex reproducing_kernel(Complex xi, const Params& p, double tol = 1e-13) {
    if (std::abs(xi) > 0.95)
        throw std::domain_error("reproducing_kernel: |xi| <= 0.95 series radius contract");
    return gauss_2f1<Complex>(1.0, p.alpha + p.beta + 2.0, p.beta + 1.0, xi, tol).value;
}

// Hilbert-basis element e_n(z) = sqrt((alpha+beta+2)_n / (beta+1)_n) z^n.
inline Complex basis_e_n(int n, const DiscPoint& z, const Params& p) {
    if (n < 0) throw std::domain_error("basis_e_n: n >= 0 required");
    const double log_norm = 0.5 * (log_pochhammer(p.alpha + p.beta + 2.0, n) -
                                   log_pochhammer(p.beta + 1.0, n));
    return std::exp(log_norm) * std::pow(z.value, n);
}

// psi_0(z) = h(|z|^2)/(d_0 z h(1)),  psi_n(z) = (h(|z|^2)/h(1) - 1) z^{n-1}/d_n.
inline Complex psi_n(int n, const DiscPoint& z, const Params& p,
                     const QuadratureSpec& spec = {}) {
    if (n < 0) throw std::domain_error("psi_n: n >= 0 required");
    if (n == 0 && z.value == Complex(0.0, 0.0))
        throw std::domain_error("psi_n: psi_0 has a pole at z = 0");
    const double h1 = h_total(p);
    const double t = std::norm(z.value);
    const double dn = d_n_coefficient(n, p, spec);
    if (n == 0) return incomplete_beta_h(t, p) / (dn * z.value * h1);
    const double deficit = detail::h_deficit_ratio(1.0 - t, p, h1);  // 1 - h/h1
    return -deficit * std::pow(z.value, n - 1) / dn;
}

// Closed form of the kernel of T:
//   tau(z, xi) = 1/z + (h(|z|^2)/h(1) - 1) K(z conj(xi)) / z,   z != 0.
inline Complex tau_closed(const DiscPoint& z, const DiscPoint& xi, const Params& p) {
    if (z.value == Complex(0.0, 0.0))
        throw std::domain_error("tau_closed: z = 0 is the kernel's pole");
    const Complex zx = z.value * std::conj(xi.value);
    if (std::abs(zx) > 0.95)
        throw std::domain_error("tau_closed: |z conj(xi)| <= 0.95 series radius contract");
    const double h1 = h_total(p);
    const double deficit = detail::h_deficit_ratio(1.0 - std::norm(z.value), p, h1);
    return 1.0 / z.value - deficit * reproducing_kernel(zx, p) / z.value;
}

// Defining integral of the same kernel,
//   tau(z, xi) = -int_D K(w conj(xi)) / (w - z) d mu(w),
// through the 2-D quadrature oracle; reports the gap against the closed form.
inline KernelCheckReport tau_numeric(const DiscPoint& z, const DiscPoint& xi,
                                     const Params& p, const QuadratureSpec& spec) {
    if (std::abs(z.value) > 0.8 || std::abs(xi.value) > 0.8)
        throw std::domain_error(
            "tau_numeric: |z|, |xi| <= 0.8 keeps the 2-D integrand well-resolved");
    if (z.value == Complex(0.0, 0.0))
        throw std::domain_error("tau_numeric: z = 0 is the kernel's pole");
    const Complex xibar = std::conj(xi.value);
    auto g = [&](Complex w) { return -reproducing_kernel(w * xibar, p) / (w - z.value); };
    const auto num =
        integrate_disc_t<Complex>(g, {Complex(0.0, 0.0), z.value}, p, spec);
    KernelCheckReport rep;
    rep.z = z.value;
    rep.xi = xi.value;
    rep.closed_form = tau_closed(z, xi, p);
    rep.numeric = num.value;
    rep.abs_gap = std::abs(rep.closed_form - rep.numeric);
    rep.error_est = num.error_est;
    return rep;
}

// Five fixed sample pairs for the kernel verification; a hand-rolled xorshift
// keeps them identical across runs and platforms.
inline std::vector<std::pair<Complex, Complex>> kernel_check_sample_pairs() {
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    auto next01 = [&state]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return static_cast<double>(state >> 11) / 9007199254740992.0;
    };
    std::vector<std::pair<Complex, Complex>> pairs;
    while (pairs.size() < 5) {
        const double rz = 0.15 + 0.60 * next01();
        const double az = 6.283185307179586 * next01();
        const double rx = 0.75 * next01();
        const double ax = 6.283185307179586 * next01();
        pairs.emplace_back(std::polar(rz, az), std::polar(rx, ax));
    }
    return pairs;
}

// Gram matrix of {psi_0..psi_N}. Angular integrals vanish for m != k (distinct
// powers of e^{i theta}), so off-diagonals are exact zeros and the diagonal
// reduces to radial quadrature.
inline std::vector<std::vector<double>> gram_psi(int N, const Params& p,
                                                 const QuadratureSpec& spec = {}) {
    if (N < 1) throw std::domain_error("gram_psi: N >= 1 required");
    if (N > 32) throw std::domain_error("gram_psi: N <= 32 cost guard");
    const double h1 = h_total(p);
    std::vector<std::vector<double>> gram(N + 1, std::vector<double>(N + 1, 0.0));
    for (int n = 0; n <= N; ++n) {
        const double dn = d_n_coefficient(n, p, spec);
        double diag;
        if (n == 0) {
            const auto J0 = compute_J_n(0, p, Method::quadrature, spec);
            diag = J0.value / (h1 * dn * dn);
        } else {
            const auto D = detail::difference_integral_T(n, p, spec);
            diag = D.value / (h1 * dn * dn);
        }
        gram[n][n] = diag;
    }
    return gram;
}

}  // namespace bergman
