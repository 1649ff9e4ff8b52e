#ifndef PERIODLAB_CORE_NUMERICS_HPP
#define PERIODLAB_CORE_NUMERICS_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include <periodlab/errors.hpp>

namespace periodlab
{

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
/// A point of the parameter space C^s.
using ParamPoint = Eigen::VectorXcd;

inline constexpr double pi = 3.14159265358979323846;
inline const Complex imag_unit{0.0, 1.0};

/// Default absolute tolerance for every numerical routine.
inline constexpr double default_tol = 1e-10;

inline bool is_finite(const Complex &z) noexcept
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived> &m) noexcept
{
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (!is_finite(Complex(m(i, j)))) {
                return false;
            }
        }
    }
    return true;
}

inline double max_abs(const Complex &z) noexcept
{
    return std::abs(z);
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived> &m) noexcept
{
    double r = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            r = std::max(r, std::abs(Complex(m(i, j))));
        }
    }
    return r;
}

/// Roots of c[0] + c[1] x + ... + c[n] x^n from the eigenvalues of the
/// companion matrix. Leading zero coefficients are dropped.
std::vector<Complex> polynomial_roots(std::vector<Complex> coeffs);

/// Scalar field on parameter space whose zero set the paths must avoid.
using DiscriminantFn = std::function<Complex(const ParamPoint &)>;

/// Piecewise-linear path in C^s staying at least `clearance` away from
/// the zero set of a discriminant (|disc| >= clearance at every point).
class ParamPath
{
public:
    ParamPath(std::vector<ParamPoint> waypoints, double clearance, const DiscriminantFn &disc);

    const std::vector<ParamPoint> &waypoints() const noexcept
    {
        return m_waypoints;
    }
    double clearance() const noexcept
    {
        return m_clearance;
    }
    std::size_t segment_count() const noexcept
    {
        return m_waypoints.size() - 1;
    }
    Eigen::Index dimension() const noexcept
    {
        return m_waypoints.front().size();
    }
    const ParamPoint &start() const noexcept
    {
        return m_waypoints.front();
    }
    const ParamPoint &end() const noexcept
    {
        return m_waypoints.back();
    }
    /// Point at local parameter u in [0, 1] of the given segment.
    ParamPoint point(std::size_t segment, double u) const;
    ParamPoint tangent(std::size_t segment) const;
    /// Sum of Euclidean segment lengths in C^s.
    double length() const;
    bool is_closed(double eps = 1e-14) const;

    ParamPath reversed(const DiscriminantFn &disc) const;
    /// Path p followed by q; q must start where p ends.
    static ParamPath concatenate(const ParamPath &p, const ParamPath &q, const DiscriminantFn &disc);

    /// Smallest |disc| found on the path (dense sampling plus local refinement).
    static double min_abs_along(const std::vector<ParamPoint> &waypoints, const DiscriminantFn &disc);
    /// 1e-3 times the largest |disc| seen on the path.
    static double default_clearance(const std::vector<ParamPoint> &waypoints, const DiscriminantFn &disc);

private:
    std::vector<ParamPoint> m_waypoints;
    double m_clearance;
};

/// dY = Y * A(t; dt)^T along a path. The right-hand side is a matrix-valued
/// 1-form: rhs(t, v) is its contraction with the tangent vector v.
struct LinearODESystem {
    Eigen::Index dimension = 0;
    std::function<CMatrix(const ParamPoint &t, const ParamPoint &v)> rhs;
};

struct OdeStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

/// Adaptive Dormand-Prince 4(5) integration of dY = Y A^T along the path,
/// with absolute local error per step <= tol. Returns Y at the path end.
CMatrix integrate_linear_ode(const LinearODESystem &system, const ParamPath &path, const CMatrix &Y0,
                             double tol = default_tol, OdeStats *stats = nullptr);

/// The same Dormand-Prince formula (fifth-order solution) with a fixed number
/// of equal steps per segment; for order studies.
CMatrix integrate_linear_ode_fixed(const LinearODESystem &system, const ParamPath &path, const CMatrix &Y0,
                                   std::size_t steps_per_segment);

/// Nodes and weights of the n-point Gauss-Legendre rule on [0, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre_unit(std::size_t n);

/// Point on a segment [a, b] with offsets to both endpoints computed without
/// cancellation, so integrands can resolve the endpoint singularities.
struct SegmentPoint {
    Complex x;
    Complex from_a; // x - a
    Complex from_b; // x - b
};

namespace detail
{

const GaussRule &gauss_rule_coarse(); // 20 points
const GaussRule &gauss_rule_fine();   // 40 points

inline bool all_finite_value(const Complex &z)
{
    return is_finite(z);
}
template <typename Derived>
bool all_finite_value(const Eigen::MatrixBase<Derived> &m)
{
    return all_finite(m);
}

template <typename V>
V gauss_on(const GaussRule &rule, double s0, double s1, const std::function<V(double)> &g)
{
    const double h = s1 - s0;
    V acc = g(s0 + h * rule.nodes[0]) * rule.weights[0];
    for (std::size_t i = 1; i < rule.nodes.size(); ++i) {
        acc += g(s0 + h * rule.nodes[i]) * rule.weights[i];
    }
    return acc * h;
}

template <typename V>
V adaptive_unit(const std::function<V(double)> &g, double s0, double s1, double tol, int depth)
{
    const GaussRule &coarse = gauss_rule_coarse();
    const GaussRule &fine = gauss_rule_fine();
    V lo = gauss_on<V>(coarse, s0, s1, g);
    V hi = gauss_on<V>(fine, s0, s1, g);
    if (!all_finite_value(hi)) {
        throw Error(ErrorCode::NonConvergent, "non-finite integrand value in quadrature");
    }
    if (max_abs(hi - lo) <= tol) {
        return hi;
    }
    if (depth >= 48) {
        throw Error(ErrorCode::NonConvergent, "quadrature refinement did not stabilize");
    }
    const double mid = 0.5 * (s0 + s1);
    return adaptive_unit<V>(g, s0, mid, 0.5 * tol, depth + 1) + adaptive_unit<V>(g, mid, s1, 0.5 * tol, depth + 1);
}

} // namespace detail

/// Contour integral of f along the straight segment [a, b], where f may
/// behave like (x - a)^(-1/2) and (x - b)^(-1/2) at the endpoints.
///
/// Each half of the segment is mapped by x = endpoint + (b - a) s^2 / 2, which
/// turns the half-power singularity into a smooth integrand in s; the halves
/// are then integrated by adaptively bisected Gauss-Legendre pairs.
/// V is Complex or a fixed-size complex Eigen vector.
template <typename V, typename F>
V quad_sqrt_singular_segment(F &&f, Complex a, Complex b, double tol = default_tol)
{
    if (!(tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    }
    const Complex d = b - a;
    const std::function<V(double)> left = [&](double s) -> V {
        const Complex off = 0.5 * d * (s * s);
        return f(SegmentPoint{a + off, off, off - d}) * (d * s);
    };
    const std::function<V(double)> right = [&](double s) -> V {
        const Complex off = 0.5 * d * (s * s);
        return f(SegmentPoint{b - off, d - off, -off}) * (d * s);
    };
    return detail::adaptive_unit<V>(left, 0.0, 1.0, 0.5 * tol, 0) + detail::adaptive_unit<V>(right, 0.0, 1.0, 0.5 * tol, 0);
}

/// Scalar convenience form taking f(x) directly.
Complex quad_sqrt_singular(const std::function<Complex(Complex)> &f, Complex a, Complex b, double tol = default_tol);

} // namespace periodlab

#endif
