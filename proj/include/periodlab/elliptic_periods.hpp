#ifndef PERIODLAB_ELLIPTIC_PERIODS_HPP
#define PERIODLAB_ELLIPTIC_PERIODS_HPP

#include <array>

#include <Eigen/Dense>

#include <periodlab/core_numerics.hpp>

namespace periodlab
{

/// Parameters (t2, t3) of the curve y^2 = 4x^3 - t2 x - t3.
struct WeierstrassPoint {
    Complex t2;
    Complex t3;

    ParamPoint as_param() const;
    static WeierstrassPoint from_param(const ParamPoint &p);
};

/// Matrix of periods: row i is the cycle delta_i, column 0 is the integral of
/// dx/y and column 1 the integral of x dx/y. Raw integrals, no 1/sqrt(2 pi i).
struct PeriodMatrix2 {
    Eigen::Matrix2cd entries;

    /// entries(0,0) / entries(1,0).
    Complex tau() const
    {
        return entries(0, 0) / entries(1, 0);
    }
    Complex det() const
    {
        return entries.determinant();
    }
    /// Entries divided by sqrt(2 pi i) (presentation only).
    PeriodMatrix2 normalized() const;
};

/// Sign sigma with det(period matrix) = sigma * 2 pi i in the basis convention
/// of this library. Fixed by the base point (4, 0).
int legendre_sign();

/// Base point of the cycle-basis convention.
inline const WeierstrassPoint base_point_t{Complex(4.0), Complex(0.0)};

struct PeriodOptions {
    double tol = default_tol;
    /// period operations refuse |Delta| <= disc_floor * max(1, |t2|^3 + 27 |t3|^2)
    double disc_floor = 1e-9;
    /// radius (in the affine parameter of the default path) of the half circles
    /// that detour around the discriminant
    double detour_radius = 0.1;
};

Complex discriminant(const WeierstrassPoint &t);

/// Discriminant as a function on parameter space C^2 = {(t2, t3)}.
DiscriminantFn weierstrass_discriminant();

/// lambda . (t2, t3) = (lambda^4 t2, lambda^6 t3).
WeierstrassPoint scale_action(Complex lambda, const WeierstrassPoint &t);

/// Roots of 4x^3 - t2 x - t3.
std::array<Complex, 3> branch_points(const WeierstrassPoint &t);

/// (integral of dx/y, integral of x dx/y) over the cycle that encircles the
/// straight segment [ea, eb], where ec is the remaining branch point. The
/// square root is continued along the segment; the overall sign is arbitrary
/// but fixed by the formula.
Eigen::Vector2cd segment_cycle_periods(const WeierstrassPoint &t, Complex ea, Complex eb, Complex ec,
                                       double tol = default_tol);

/// Period matrix at the base point (4, 0): delta_1 over [-1, 0], delta_2 over
/// [0, 1], delta_1 oriented so that Im tau > 0.
PeriodMatrix2 base_period_matrix(double tol = default_tol);

/// Straight path from the base point to t in C^2, with half-circle detours
/// (passing below, in the affine parameter) around discriminant crossings.
ParamPath default_path(const WeierstrassPoint &t, const PeriodOptions &opts = {});

/// Continues a period matrix along a path by direct quadrature: at each step
/// the periods of two segment cycles are computed and re-expressed in the
/// continued basis by an integral change of basis.
PeriodMatrix2 continue_periods(const ParamPath &path, const PeriodMatrix2 &start, double tol = default_tol);

PeriodMatrix2 period_matrix(const WeierstrassPoint &t, const PeriodOptions &opts);
PeriodMatrix2 period_matrix(const WeierstrassPoint &t, double tol = default_tol);

/// tau = P[0,0] / P[1,0], in the upper half plane.
Complex period_map_tau(const WeierstrassPoint &t, double tol = default_tol);

/// Parameters of y^2 = 4 t0 (x - t1)^3 - t2 (x - t1) - t3.
struct CubicFamilyPoint {
    Complex t0, t1, t2, t3;
};

struct ReducedCubicFamily {
    WeierstrassPoint point;
    /// s = t0^(-1/3) (principal branch); x = s v + t1 gives the Weierstrass form.
    Complex scale;
};

ReducedCubicFamily reduce_cubic_family(const CubicFamilyPoint &k);

PeriodMatrix2 cubic_family_period_matrix(const CubicFamilyPoint &k, double tol = default_tol);

} // namespace periodlab

#endif
