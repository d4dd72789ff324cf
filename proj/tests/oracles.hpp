#pragma once
// Reference implementations used only by the tests.  Each one takes a
// different route from the library code it checks.

#include "mbsed/config.hpp"
#include "mbsed/couplings.hpp"

#include <Eigen/Dense>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

/// Gauss-Hermite rule for the weight exp(-2 x^2) in long double.  GSL
/// supplies starting nodes; each is polished by Newton steps on the
/// orthonormal Hermite polynomial and the weights come from the Christoffel
/// sum.  Nodes are mirror-symmetric, so odd integrands cancel exactly.
struct HermiteRule {
    using Real = long double;
    std::vector<Real> x, w;

    explicit HermiteRule(int n) {
        gsl_integration_fixed_workspace* ws = gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, n, 0.0, 1.0, 0.0, 0.0);
        if (!ws) throw std::runtime_error("gsl hermite rule");
        std::vector<double> start(gsl_integration_fixed_nodes(ws), gsl_integration_fixed_nodes(ws) + n);
        gsl_integration_fixed_free(ws);
        std::sort(start.begin(), start.end());

        // p_k orthonormal for exp(-y^2); x = y / sqrt(2)
        const Real pi = std::numbers::pi_v<Real>;
        auto orthonormal = [&](Real y, std::vector<Real>& p) {
            p.assign(n + 1, 0.0L);
            p[0] = std::pow(pi, -0.25L);
            if (n > 0) p[1] = std::sqrt(2.0L) * y * p[0];
            for (int k = 1; k < n; ++k)
                p[k + 1] = std::sqrt(2.0L / (k + 1)) * y * p[k] - std::sqrt(Real(k) / (k + 1)) * p[k - 1];
        };
        x.resize(n);
        w.resize(n);
        std::vector<Real> p;
        for (int k = 0; k < (n + 1) / 2; ++k) {
            Real y = k == n - 1 - k ? 0.0L : 0.5L * (Real(start[n - 1 - k]) - Real(start[k]));
            for (int it = 0; it < 6 && y != 0.0L; ++it) {
                orthonormal(y, p);
                y -= p[n] / (std::sqrt(2.0L * n) * p[n - 1]);
            }
            orthonormal(y, p);
            Real christoffel = 0.0L;
            for (int j = 0; j < n; ++j) christoffel += p[j] * p[j];
            x[n - 1 - k] = y / std::sqrt(2.0L);
            x[k] = -x[n - 1 - k];
            w[k] = w[n - 1 - k] = 1.0L / (christoffel * std::sqrt(2.0L));
        }
    }
};

/// Normalised Hermite polynomials h_n(x) = H_n(x) / sqrt(2^n n! sqrt(pi)) and
/// their derivatives at every node, for n = 0..nmax.
struct HermiteTable {
    using Real = long double;
    std::vector<std::vector<Real>> h, dh; // [n][node]

    HermiteTable(const HermiteRule& rule, int nmax) {
        const std::size_t m = rule.x.size();
        h.assign(nmax + 2, std::vector<Real>(m));
        dh.assign(nmax + 1, std::vector<Real>(m));
        for (std::size_t k = 0; k < m; ++k) {
            const Real x = rule.x[k];
            h[0][k] = std::pow(std::numbers::pi_v<Real>, -0.25L);
            h[1][k] = std::sqrt(2.0L) * x * h[0][k];
            for (int n = 1; n <= nmax; ++n)
                h[n + 1][k] = std::sqrt(2.0L / (n + 1)) * x * h[n][k] - std::sqrt(Real(n) / (n + 1)) * h[n - 1][k];
            for (int n = 0; n <= nmax; ++n) dh[n][k] = n == 0 ? 0.0L : std::sqrt(2.0L * n) * h[n - 1][k];
        }
    }
};

template <class F>
double mirrored_sum(const HermiteRule& r, F&& f) {
    const std::size_t n = r.x.size();
    long double sum = 0.0L;
    for (std::size_t k = 0; k < n / 2; ++k) sum += r.w[k] * (f(k) + f(n - 1 - k));
    if (n % 2) sum += r.w[n / 2] * f(n / 2);
    return static_cast<double>(sum);
}

/// int phi_a phi_b phi_c phi_d dx by quadrature of the polynomial part.
inline double s_quad(const HermiteRule& r, const HermiteTable& t, int a, int b, int c, int d) {
    return mirrored_sum(r, [&](std::size_t k) { return t.h[a][k] * t.h[b][k] * t.h[c][k] * t.h[d][k]; });
}

/// int (phi_a' phi_b - phi_a phi_b')(phi_c' phi_d - phi_c phi_d') dx.  The
/// Gaussian factors cancel in the Wronskian, leaving (h_a' h_b - h_a h_b').
inline double p_quad(const HermiteRule& r, const HermiteTable& t, int a, int b, int c, int d) {
    return mirrored_sum(r, [&](std::size_t k) {
        const long double w1 = t.dh[a][k] * t.h[b][k] - t.h[a][k] * t.dh[b][k];
        const long double w2 = t.dh[c][k] * t.h[d][k] - t.h[c][k] * t.dh[d][k];
        return w1 * w2;
    });
}

/// phi_{n-1}, phi_n, phi_{n+1} at x with a log-scaled recurrence, usable
/// for n in the thousands.
struct HermiteTriplet {
    double below = 0.0, at = 0.0, above = 0.0;
    double value() const { return at; }
    /// phi_n' = sqrt(n/2) phi_{n-1} - sqrt((n+1)/2) phi_{n+1}
    double derivative(int n) const { return std::sqrt(n / 2.0) * below - std::sqrt((n + 1) / 2.0) * above; }
};

inline HermiteTriplet hermite_triplet(int n, double x) {
    double prev = 0.0, cur = std::pow(std::numbers::pi, -0.25);
    double log_scale = -0.5 * x * x;
    HermiteTriplet t;
    for (int k = 0; k <= n; ++k) {
        const double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(double(k) / (k + 1)) * prev;
        if (k == n) {
            const double f = std::exp(log_scale);
            t = {prev * f, cur * f, next * f};
            break;
        }
        prev = cur;
        cur = next;
        const double a = std::abs(cur);
        if (a > 1e100 || (a < 1e-100 && a > 0.0)) {
            cur /= a;
            prev /= a;
            log_scale += std::log(a);
        }
    }
    return t;
}

inline double hermite_function(int n, double x) { return hermite_triplet(n, x).at; }

/// Boltzmann weights of (n_z, n_r) with the n_r + 1 degeneracy, below the trap depth.
inline std::map<std::pair<int, int>, double> boltzmann(const mbsed::Config& cfg, double t_z_uk, double t_r_uk) {
    const auto& c = cfg.constants;
    const double ez = c.hbar * 2.0 * std::numbers::pi * cfg.trap.nu_z;
    const double er = c.hbar * 2.0 * std::numbers::pi * cfg.trap.nu_r;
    // bound-state test in frequency units; levels at the depth are unbound
    const double nz_hz = cfg.trap.nu_z, nr_hz = cfg.trap.nu_r;
    const double top = cfg.trap.depth_hbar_omega_z * nz_hz * (1.0 - 1e-12);
    std::map<std::pair<int, int>, double> w;
    double total = 0.0;
    for (int nz = 0; nz < 1000; ++nz) {
        for (int nr = 0; nr < 100000; ++nr) {
            if (nz_hz * (nz + 0.5) + nr_hz * (nr + 1) >= top) break;
            const double v = (nr + 1) * std::exp(-ez * (nz + 0.5) / (c.k_B * t_z_uk * 1e-6) -
                                                 er * (nr + 1) / (c.k_B * t_r_uk * 1e-6));
            w[{nz, nr}] = v;
            total += v;
        }
        if (nz_hz * (nz + 1.5) + nr_hz >= top) break;
    }
    for (auto& [k, v] : w) v /= total;
    return w;
}

using CMatrix = Eigen::MatrixXcd;

/// Single-site operator embedded with Kronecker products; bit i of the
/// product-basis index is atom i (1 = up).
inline CMatrix site_op(int n, int i, const Eigen::Matrix2cd& op) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (int k = n - 1; k >= 0; --k) {
        const Eigen::Matrix2cd f = k == i ? op : Eigen::Matrix2cd::Identity();
        CMatrix next(out.rows() * 2, out.cols() * 2);
        for (int r = 0; r < out.rows(); ++r)
            for (int col = 0; col < out.cols(); ++col) next.block(2 * r, 2 * col, 2, 2) = out(r, col) * f;
        out = next;
    }
    return out;
}

/// Spin-1/2 matrices in the (down, up) ordering.
inline Eigen::Matrix2cd sx() { Eigen::Matrix2cd m; m << 0, 0.5, 0.5, 0; return m; }
inline Eigen::Matrix2cd sy() {
    Eigen::Matrix2cd m;
    m << 0, std::complex<double>(0, 0.5), std::complex<double>(0, -0.5), 0;
    return m;
}
inline Eigen::Matrix2cd sz() { Eigen::Matrix2cd m; m << -0.5, 0, 0, 0.5; return m; }

/// The spin Hamiltonian assembled literally from Kronecker products.
inline CMatrix kron_hamiltonian(const mbsed::CouplingTables& t, double delta_hz, bool drive) {
    const int n = t.size();
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<CMatrix> x(n), y(n), z(n);
    for (int i = 0; i < n; ++i) {
        x[i] = site_op(n, i, sx());
        y[i] = site_op(n, i, sy());
        z[i] = site_op(n, i, sz());
    }
    const int dim = 1 << n;
    CMatrix h = CMatrix::Zero(dim, dim);
    for (int i = 0; i < n; ++i) {
        h -= two_pi * delta_hz * z[i];
        if (drive) h -= two_pi * t.rabi_hz[i] * x[i];
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            h -= t.c(i, j) * 0.5 * (z[i] + z[j]);
            h -= t.x(i, j) * z[i] * z[j];
            h -= t.j(i, j) * (x[i] * x[j] + y[i] * y[j] + z[i] * z[j]);
        }
    }
    return h;
}

/// Random symmetric coupling tables with zero diagonals.
template <class Rng>
mbsed::CouplingTables random_tables(int n, Rng& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    mbsed::CouplingTables t;
    t.j = t.c = t.x = t.g_s = t.g_p = Eigen::MatrixXd::Zero(n, n);
    t.rabi_hz.resize(n);
    for (int i = 0; i < n; ++i) {
        t.rabi_hz[i] = 5.0 + u(rng);
        for (int j = i + 1; j < n; ++j) {
            t.j(i, j) = t.j(j, i) = scale * u(rng);
            t.c(i, j) = t.c(j, i) = scale * u(rng);
            t.x(i, j) = t.x(j, i) = scale * u(rng);
        }
    }
    return t;
}

} // namespace oracle
