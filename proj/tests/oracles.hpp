#ifndef PERIODLAB_TEST_ORACLES_HPP
#define PERIODLAB_TEST_ORACLES_HPP

// Independent reference computations shared by the unit tests and the
// acceptance binary. Nothing here calls into the period code it checks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>

#include <Eigen/Dense>

#include <periodlab/core_numerics.hpp>

namespace oracle
{

using periodlab::Complex;

/// Periods of y^2 = 4 t0 (x - t1)^3 - t2 (x - t1) - t3 over the cycles around
/// the segments [e0, e1] and [e1, e2] of its (sorted) roots. Rows are cycles,
/// columns are (dx/y, x dx/y); row 0 is flipped so that Im(Q00 / Q10) > 0.
inline Eigen::Matrix2cd segment_periods(Complex t0, Complex t1, Complex t2, Complex t3, double tol = 1e-12)
{
    // roots of 4 t0 u^3 - t2 u - t3 in u = x - t1
    auto us = periodlab::polynomial_roots({-t3, -t2, 0.0, 4.0 * t0});
    std::sort(us.begin(), us.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    Eigen::Matrix2cd q;
    const int pairs[2][3] = {{0, 1, 2}, {1, 2, 0}};
    for (int r = 0; r < 2; ++r) {
        const Complex ea = us[pairs[r][0]], eb = us[pairs[r][1]], ec = us[pairs[r][2]];
        const Complex d = eb - ea;
        const Complex c = (ea - ec) / d;
        // on x = ea + w d, w in (0, 1):
        // y = 2 sqrt(t0) * sqrt(d) sqrt(w) * i sqrt(d) sqrt(1 - w) * sqrt(d) sqrt(c + w)
        // and c + w never meets the negative real axis since c is not real
        const Complex pref = 2.0 * std::sqrt(t0) * Complex(0.0, 1.0) * d * std::sqrt(d);
        for (int col = 0; col < 2; ++col) {
            auto f = [&](Complex u) {
                const Complex w = (u - ea) / d, wbar = (eb - u) / d;
                const Complex y = pref * std::sqrt(w) * std::sqrt(wbar) * std::sqrt(c + w);
                return (col == 0 ? Complex(1.0) : u + t1) / y;
            };
            q(r, col) = 2.0 * periodlab::quad_sqrt_singular(f, ea, eb, tol);
        }
    }
    if ((q(0, 0) / q(1, 0)).imag() < 0.0) {
        q.row(0) *= -1.0;
    }
    return q;
}

/// M = P Q^-1 rounded, when it is integral to within `dev` and has det 1.
inline std::optional<Eigen::Matrix2i> unimodular_relation(const Eigen::Matrix2cd &p, const Eigen::Matrix2cd &q,
                                                          double dev = 1e-6)
{
    const Eigen::Matrix2cd m = p * q.inverse();
    Eigen::Matrix2i r;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double x = std::round(m(i, j).real());
            if (std::abs(m(i, j) - x) > dev) {
                return std::nullopt;
            }
            r(i, j) = static_cast<int>(x);
        }
    }
    if (r.determinant() != 1) {
        return std::nullopt;
    }
    return r;
}

/// E_k(Z omega1 + Z omega2) by brute force over |m|, |n| <= n_max, with the
/// truncation tail estimated by Richardson extrapolation in n_max^(2-k).
inline Complex eisenstein_brute(int k, Complex omega1, Complex omega2, int n_max)
{
    auto partial = [&](int n) {
        Complex s = 0.0;
        for (int a = -n; a <= n; ++a) {
            for (int b = -n; b <= n; ++b) {
                if (a != 0 || b != 0) {
                    s += std::pow(double(a) * omega1 + double(b) * omega2, -k);
                }
            }
        }
        return s;
    };
    const Complex s1 = partial(n_max / 2), s2 = partial(n_max);
    const double r = std::pow(2.0, k - 2);
    return (r * s2 - s1) / (r - 1.0);
}

/// Divisor sum sigma_r(n).
inline long long sigma(int r, int n)
{
    long long s = 0;
    for (int d = 1; d <= n; ++d) {
        if (n % d == 0) {
            long long p = 1;
            for (int i = 0; i < r; ++i) {
                p *= d;
            }
            s += p;
        }
    }
    return s;
}

} // namespace oracle

#endif
