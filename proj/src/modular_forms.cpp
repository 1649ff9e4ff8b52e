#include <periodlab/modular_forms.hpp>

#include <algorithm>
#include <cmath>
#include <array>
#include <limits>
#include <random>

namespace periodlab
{

Lattice Lattice::checked(Complex omega1, Complex omega2)
{
    if (!is_finite(omega1) || !is_finite(omega2) || omega2 == Complex(0.0)) {
        throw Error(ErrorCode::RealTau, "degenerate lattice basis");
    }
    const Complex tau = omega1 / omega2;
    if (!is_finite(tau) || tau.imag() == 0.0) {
        throw Error(ErrorCode::RealTau, "omega1 / omega2 is real");
    }
    if (tau.imag() < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "lattice basis must satisfy Im(omega1 / omega2) > 0");
    }
    return {omega1, omega2};
}

Lattice Lattice::from_tau(Complex tau)
{
    return checked(tau, Complex(1.0));
}

namespace
{

void require_upper(Complex tau)
{
    if (!is_finite(tau) || tau.imag() == 0.0) {
        throw Error(ErrorCode::RealTau, "tau must have positive imaginary part");
    }
    if (tau.imag() < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "tau must lie in the upper half plane");
    }
}

double zeta_even(int k)
{
    switch (k) {
        case 4: return std::pow(pi, 4) / 90.0;
        case 6: return std::pow(pi, 6) / 945.0;
        default: throw Error(ErrorCode::UnsupportedType, "q-expansions are available for k = 4 and k = 6");
    }
}

double eisenstein_constant(int k)
{
    switch (k) {
        case 4: return 240.0;
        case 6: return -504.0;
        default: throw Error(ErrorCode::UnsupportedType, "q-expansions are available for k = 4 and k = 6");
    }
}

double divisor_power_sum(int n, int p)
{
    double s = 0.0;
    for (int d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            s += std::pow(double(d), p);
            const int e = n / d;
            if (e != d) {
                s += std::pow(double(e), p);
            }
        }
    }
    return s;
}

Complex int_power(Complex z, int k)
{
    Complex r = 1.0;
    for (int i = 0; i < k; ++i) {
        r *= z;
    }
    return r;
}

struct CellGeometry {
    double area;
    double h; // distance from 0 to the boundary of the unit parallelogram
    double radius;
};

CellGeometry cell_geometry(Complex u, Complex v)
{
    const double area = std::abs((std::conj(u) * v).imag());
    return {area, area / std::max(std::abs(u), std::abs(v)), 0.5 * std::max(std::abs(u + v), std::abs(u - v))};
}

// Bound on the difference between the lattice tail beyond radius N and its
// area-integral replacement.
double tail_bound(int k, const CellGeometry &g, int n)
{
    const double w0 = n * g.h - g.radius;
    if (w0 <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double p = k + 2.0;
    const double integral = std::pow(w0, 2.0 - p) / (p - 2.0) + g.radius * std::pow(w0, 1.0 - p) / (p - 1.0);
    return 4.0 * k * (k + 1.0) * g.radius * g.radius * integral / (g.h * g.h);
}

// (1/area) * integral of z^-k over the complement of the parallelogram with
// vertices c(+-u +- v).
Complex tail_integral(int k, Complex u, Complex v, double c, double area)
{
    const std::array<Complex, 4> vert{c * (-u - v), c * (u - v), c * (u + v), c * (-u + v)};
    Complex acc = 0.0;
    for (int e = 0; e < 4; ++e) {
        const Complex z0 = vert[e], z1 = vert[(e + 1) % 4];
        const Complex d = z1 - z0;
        const Complex r = std::conj(d) / d;
        const Complex c0 = std::conj(z0) - z0 * r;
        acc += c0 * (int_power(1.0 / z1, k - 1) - int_power(1.0 / z0, k - 1)) / double(1 - k) +
               r * (int_power(1.0 / z1, k - 2) - int_power(1.0 / z0, k - 2)) / double(2 - k);
    }
    return -acc / (2.0 * imag_unit) / area;
}

constexpr int max_lattice_radius = 4000;

} // namespace

ReducedTau reduce_tau(Complex tau)
{
    require_upper(tau);
    Eigen::Matrix2i g = Eigen::Matrix2i::Identity();
    for (int it = 0; it < 10000; ++it) {
        const double n = std::round(tau.real());
        if (n != 0.0) {
            tau -= n;
            Eigen::Matrix2i t;
            t << 1, -static_cast<int>(n), 0, 1;
            g = t * g;
        }
        if (std::norm(tau) < 1.0 - 1e-15) {
            tau = -1.0 / tau;
            Eigen::Matrix2i s;
            s << 0, -1, 1, 0;
            g = s * g;
        } else {
            return {tau, g};
        }
    }
    throw Error(ErrorCode::NonConvergent, "tau reduction did not terminate");
}

Lattice reduce_lattice(const Lattice &lattice)
{
    const Lattice l = Lattice::checked(lattice.omega1, lattice.omega2);
    const ReducedTau r = reduce_tau(l.tau());
    const Eigen::Matrix2i &g = r.gamma;
    return {double(g(0, 0)) * l.omega1 + double(g(0, 1)) * l.omega2,
            double(g(1, 0)) * l.omega1 + double(g(1, 1)) * l.omega2};
}

int eisenstein_lattice_radius(int k, const Lattice &lattice, double tol)
{
    if (k < 4 || k % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "k must be even and at least 4");
    }
    if (!(tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    }
    const Lattice l = reduce_lattice(lattice);
    const CellGeometry g = cell_geometry(l.omega2, l.omega1);
    int hi = 1;
    while (tail_bound(k, g, hi) > tol) {
        if (hi >= max_lattice_radius) {
            throw Error(ErrorCode::NonConvergent, "lattice sum would need a radius beyond " +
                                                      std::to_string(max_lattice_radius) + " for this tolerance");
        }
        hi = std::min(2 * hi, max_lattice_radius);
    }
    int lo = hi / 2;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (tail_bound(k, g, mid) > tol ? lo : hi) = mid;
    }
    return hi;
}

Complex eisenstein_lattice(int k, const Lattice &lattice, double tol)
{
    const int n = eisenstein_lattice_radius(k, lattice, tol);
    const Lattice l = reduce_lattice(lattice);
    const Complex u = l.omega2, v = l.omega1;
    const CellGeometry g = cell_geometry(u, v);

    auto term = [&](int m, int j) { return int_power(1.0 / (double(m) * u + double(j) * v), k); };
    // Shells from the outside in; half of each shell, the other half is its negative.
    Complex total = tail_integral(k, u, v, n + 0.5, g.area);
    for (int s = n; s >= 1; --s) {
        Complex shell = term(0, s);
        for (int j = -s; j <= s; ++j) {
            shell += term(s, j);
        }
        for (int m = 1; m < s; ++m) {
            shell += term(m, s) + term(m, -s);
        }
        total += 2.0 * shell;
    }
    return total;
}

Complex eisenstein_normalized_q(int k, Complex tau, int n_terms)
{
    require_upper(tau);
    const double c = eisenstein_constant(k);
    const Complex q = std::exp(2.0 * pi * imag_unit * tau);
    const double aq = std::abs(q);
    const int cap = n_terms > 0 ? n_terms : 200000;
    Complex acc = 0.0, qn = 1.0;
    for (int n = 1; n <= cap; ++n) {
        qn *= q;
        acc += divisor_power_sum(n, k - 1) * qn;
        if (n_terms <= 0 && std::pow(double(n), k) * std::pow(aq, n) < 1e-18) {
            break;
        }
    }
    return 1.0 + c * acc;
}

Complex eisenstein_q(int k, Complex tau, int n_terms)
{
    return 2.0 * zeta_even(k) * eisenstein_normalized_q(k, tau, n_terms);
}

WeierstrassInvariants weierstrass_g(const Lattice &lattice, double tol)
{
    return {60.0 * eisenstein_lattice(4, lattice, tol), double(g6_sign) * 140.0 * eisenstein_lattice(6, lattice, tol)};
}

Complex j_unscaled(Complex tau, double tol)
{
    const ReducedTau r = reduce_tau(tau);
    const Complex e4 = eisenstein_normalized_q(4, r.tau);
    const Complex e6 = eisenstein_normalized_q(6, r.tau);
    const Complex num = e4 * e4 * e4;
    const Complex den = num - e6 * e6;
    if (std::abs(den) < tol * std::max(1.0, std::abs(num))) {
        throw Error(ErrorCode::NearCusp, "tau is too close to the cusp for the requested tolerance");
    }
    return num / den;
}

QSeries::QSeries(int valuation, std::vector<Complex> coeffs, int order)
    : m_valuation(valuation), m_coeffs(std::move(coeffs)), m_order(order)
{
    if (order < valuation) {
        throw Error(ErrorCode::InvalidArgument, "q-series order below its valuation");
    }
    m_coeffs.resize(static_cast<std::size_t>(order - valuation), Complex(0.0));
    for (const auto &c : m_coeffs) {
        if (!is_finite(c)) {
            throw Error(ErrorCode::InvalidArgument, "non-finite q-series coefficient");
        }
    }
}

QSeries QSeries::constant(Complex c, int order)
{
    return QSeries(0, {c}, std::max(order, 0));
}

Complex QSeries::coefficient(int n) const
{
    if (n >= m_order) {
        throw Error(ErrorCode::InvalidArgument, "coefficient beyond the truncation order");
    }
    if (n < m_valuation) {
        return 0.0;
    }
    return m_coeffs[static_cast<std::size_t>(n - m_valuation)];
}

Complex QSeries::evaluate(Complex q) const
{
    Complex acc = 0.0;
    for (std::size_t i = m_coeffs.size(); i-- > 0;) {
        acc = acc * q + m_coeffs[i];
    }
    return acc * std::pow(q, m_valuation);
}

QSeries QSeries::operator+(const QSeries &o) const
{
    const int v = std::min(m_valuation, o.m_valuation);
    const int ord = std::min(m_order, o.m_order);
    std::vector<Complex> c(static_cast<std::size_t>(std::max(ord - v, 0)));
    for (int n = v; n < ord; ++n) {
        c[static_cast<std::size_t>(n - v)] = coefficient(n) + o.coefficient(n);
    }
    return QSeries(v, std::move(c), std::max(ord, v));
}

QSeries QSeries::operator-(const QSeries &o) const
{
    return *this + o * Complex(-1.0);
}

QSeries QSeries::operator*(const QSeries &o) const
{
    const int v = m_valuation + o.m_valuation;
    const int ord = std::min(m_valuation + o.m_order, o.m_valuation + m_order);
    std::vector<Complex> c(static_cast<std::size_t>(ord - v), Complex(0.0));
    for (std::size_t i = 0; i < m_coeffs.size(); ++i) {
        for (std::size_t j = 0; j < o.m_coeffs.size() && i + j < c.size(); ++j) {
            c[i + j] += m_coeffs[i] * o.m_coeffs[j];
        }
    }
    return QSeries(v, std::move(c), ord);
}

QSeries QSeries::operator*(Complex s) const
{
    std::vector<Complex> c = m_coeffs;
    for (auto &x : c) {
        x *= s;
    }
    return QSeries(m_valuation, std::move(c), m_order);
}

QSeries QSeries::operator/(Complex s) const
{
    if (s == Complex(0.0)) {
        throw Error(ErrorCode::InvalidArgument, "division of a q-series by zero");
    }
    std::vector<Complex> c = m_coeffs;
    for (auto &x : c) {
        x /= s;
    }
    return QSeries(m_valuation, std::move(c), m_order);
}

QSeries QSeries::inverse() const
{
    std::size_t lead = 0;
    while (lead < m_coeffs.size() && m_coeffs[lead] == Complex(0.0)) {
        ++lead;
    }
    if (lead == m_coeffs.size()) {
        throw Error(ErrorCode::InvalidArgument, "q-series is zero to its known order");
    }
    const int v = m_valuation + static_cast<int>(lead);
    const std::size_t len = m_coeffs.size() - lead;
    const Complex c0 = m_coeffs[lead];
    std::vector<Complex> b(len);
    b[0] = 1.0 / c0;
    for (std::size_t n = 1; n < len; ++n) {
        Complex s = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            s += m_coeffs[lead + i] * b[n - i];
        }
        b[n] = -s / c0;
    }
    return QSeries(-v, std::move(b), -v + static_cast<int>(len));
}

QSeries eisenstein_series(int k, int order)
{
    const double c = eisenstein_constant(k);
    if (order < 1) {
        throw Error(ErrorCode::InvalidArgument, "q-series order must be positive");
    }
    std::vector<Complex> coeffs(static_cast<std::size_t>(order));
    coeffs[0] = 1.0;
    for (int n = 1; n < order; ++n) {
        coeffs[static_cast<std::size_t>(n)] = c * divisor_power_sum(n, k - 1);
    }
    return QSeries(0, std::move(coeffs), order);
}

QSeries j_q_expansion(int n_terms)
{
    if (n_terms < 1) {
        throw Error(ErrorCode::InvalidArgument, "n_terms must be at least 1");
    }
    const QSeries e4 = eisenstein_series(4, n_terms + 1);
    const QSeries e6 = eisenstein_series(6, n_terms + 1);
    const QSeries e4_cubed = e4 * e4 * e4;
    // (e4^3 - e6^2) / 1728 = q - 24 q^2 + ... has integer coefficients, so the
    // whole computation stays in exactly representable integers.
    const QSeries delta = (e4_cubed - e6 * e6) / Complex(1728.0);
    return e4_cubed * delta.inverse();
}

WeightCheckReport full_modular_weight_check(const LatticeFunction &f, int k, std::size_t samples,
                                            std::uint64_t seed, double rel_tol)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.9, 2.0), mag(0.5, 2.0), ang(0.0, 2.0 * pi);
    WeightCheckReport report;
    for (std::size_t s = 0; s < samples; ++s) {
        const Complex tau(re(rng), im(rng));
        const Complex omega2 = std::polar(mag(rng), ang(rng));
        const Lattice l = Lattice::checked(tau * omega2, omega2);
        const Complex mu = std::polar(mag(rng), ang(rng));
        const Complex expected = std::pow(mu, -k) * f(l);
        const Complex got = f(l.scaled(mu));
        const double err = std::abs(got - expected) / std::max(1.0, std::abs(expected));
        report.max_relative_error = std::max(report.max_relative_error, err);
        ++report.samples;
    }
    report.passed = report.max_relative_error <= rel_tol;
    return report;
}

} // namespace periodlab
