#ifndef PERIODLAB_MODULAR_FORMS_HPP
#define PERIODLAB_MODULAR_FORMS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include <periodlab/core_numerics.hpp>

namespace periodlab
{

/// Lattice Z omega1 + Z omega2 with Im(omega1 / omega2) > 0.
struct Lattice {
    Complex omega1;
    Complex omega2;

    /// Throws RealTau when omega1/omega2 is real (or not finite) and
    /// InvalidArgument when the basis is negatively oriented.
    static Lattice checked(Complex omega1, Complex omega2);
    /// The lattice Z tau + Z.
    static Lattice from_tau(Complex tau);

    Complex tau() const
    {
        return omega1 / omega2;
    }
    Lattice scaled(Complex mu) const
    {
        return {mu * omega1, mu * omega2};
    }
};

struct ReducedTau {
    Complex tau;
    /// gamma in SL(2, Z) with tau = (a tau_in + b) / (c tau_in + d)
    Eigen::Matrix2i gamma;
};

/// Moves tau into the standard fundamental domain |Re tau| <= 1/2, |tau| >= 1.
ReducedTau reduce_tau(Complex tau);

/// Same lattice with a reduced, positively oriented basis (omega2 shortest).
Lattice reduce_lattice(const Lattice &lattice);

/// Sum over 0 != a in the lattice of a^(-k), k even >= 4, to absolute error tol.
///
/// The lattice points with max(|m|, |n|) <= N (in a reduced basis) are summed
/// directly; the rest is replaced by the area integral of z^(-k) outside the
/// parallelogram covered by their unit cells, evaluated in closed form along
/// its boundary. N is the smallest radius whose bound on the cell-averaging
/// error is below tol.
Complex eisenstein_lattice(int k, const Lattice &lattice, double tol = default_tol);

/// Radius N used by eisenstein_lattice for the given inputs.
int eisenstein_lattice_radius(int k, const Lattice &lattice, double tol);

/// Normalized q-series 1 + 240 sum sigma_3(n) q^n (k = 4) or
/// 1 - 504 sum sigma_5(n) q^n (k = 6). n_terms <= 0 picks the length from |q|.
Complex eisenstein_normalized_q(int k, Complex tau, int n_terms = 0);

/// E_k(Z tau + Z) = 2 zeta(k) * eisenstein_normalized_q(k, tau), k in {4, 6}.
Complex eisenstein_q(int k, Complex tau, int n_terms = 0);

/// Sign in g6 = g6_sign * 140 E6. Fixed by the uniformization round trip
/// (the lattice of the curve y^2 = 4x^3 - t2 x - t3 must give back (t2, t3)).
inline constexpr int g6_sign = 1;

struct WeierstrassInvariants {
    Complex g4;
    Complex g6;
};

/// (60 E4, g6_sign * 140 E6) computed by lattice sums.
WeierstrassInvariants weierstrass_g(const Lattice &lattice, double tol = default_tol);

/// g4^3 / (g4^3 - 27 g6^2) on Z tau + Z, i.e. Ehat4^3 / (Ehat4^3 - Ehat6^2).
/// Without the usual factor 1728. NearCusp when the denominator is tiny.
Complex j_unscaled(Complex tau, double tol = default_tol);

/// Truncated Laurent series sum_{n >= valuation} c_n q^n + O(q^order).
class QSeries
{
public:
    QSeries(int valuation, std::vector<Complex> coeffs, int order);

    static QSeries constant(Complex c, int order);

    int valuation() const noexcept
    {
        return m_valuation;
    }
    /// Exponent of the first unknown term.
    int order() const noexcept
    {
        return m_order;
    }
    /// Coefficient of q^n; throws InvalidArgument when n >= order.
    Complex coefficient(int n) const;
    Complex evaluate(Complex q) const;

    QSeries operator+(const QSeries &o) const;
    QSeries operator-(const QSeries &o) const;
    QSeries operator*(const QSeries &o) const;
    QSeries operator*(Complex c) const;
    QSeries operator/(Complex c) const;
    /// 1 / this. The lowest stored coefficient must be nonzero.
    QSeries inverse() const;
    QSeries operator/(const QSeries &o) const
    {
        return *this * o.inverse();
    }

private:
    int m_valuation;
    std::vector<Complex> m_coeffs; // m_coeffs[i] is the coefficient of q^(valuation + i)
    int m_order;
};

/// q-series of Ehat_k, k in {4, 6}, known through q^(order - 1).
QSeries eisenstein_series(int k, int order);

/// 1728 g4^3 / (g4^3 - 27 g6^2) as q^-1 + 744 + 196884 q + ...; n_terms
/// coefficients starting at q^-1.
QSeries j_q_expansion(int n_terms);

struct WeightCheckReport {
    std::size_t samples = 0;
    double max_relative_error = 0.0;
    bool passed = false;
};

using LatticeFunction = std::function<Complex(const Lattice &)>;

/// Checks f(mu L) = mu^(-k) f(L) on random mu (0.5 <= |mu| <= 2) and random
/// lattices with reduced tau.
WeightCheckReport full_modular_weight_check(const LatticeFunction &f, int k, std::size_t samples,
                                            std::uint64_t seed = 1, double rel_tol = 1e-8);

} // namespace periodlab

#endif
