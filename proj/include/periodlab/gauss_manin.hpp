#ifndef PERIODLAB_GAUSS_MANIN_HPP
#define PERIODLAB_GAUSS_MANIN_HPP

#include <Eigen/Dense>

#include <periodlab/core_numerics.hpp>
#include <periodlab/elliptic_periods.hpp>

namespace periodlab
{

/// A(t; v) for the family y^2 = 4x^3 - t2 x - t3:
///   (1/Delta) [[-dDelta/12, -3 delta/2], [t2 delta/8, dDelta/12]]
/// with dDelta = 3 t2^2 dt2 - 54 t3 dt3 and delta = 3 t3 dt2 - 2 t2 dt3.
/// Each row of a period matrix satisfies d(eta1, eta2)^T = A (eta1, eta2)^T.
Eigen::Matrix2cd connection_matrix(const WeierstrassPoint &t, const Eigen::Vector2cd &v);

LinearODESystem gauss_manin_system();

/// Solves dP = P A^T along the path starting from P0.
PeriodMatrix2 transport(const ParamPath &path, const PeriodMatrix2 &p0, double tol = default_tol,
                        OdeStats *stats = nullptr);

struct MonodromyMatrix {
    Eigen::Matrix2i entries;
};

/// Largest deviation from an integer tolerated before rounding.
inline constexpr double monodromy_rounding_threshold = 1e-4;

/// Rounds a complex matrix to an element of SL(2, Z).
MonodromyMatrix round_monodromy(const Eigen::Matrix2cd &m, double threshold = monodromy_rounding_threshold);

/// M with P_end = M P0 after transporting P0 once around the loop.
MonodromyMatrix monodromy(const ParamPath &loop, const PeriodMatrix2 &p0, double tol = default_tol);

/// Same, with the periods continued by quadrature instead of the ODE.
MonodromyMatrix monodromy_by_quadrature(const ParamPath &loop, const PeriodMatrix2 &p0, double tol = default_tol);

/// Closed 64-gon (per turn) in the t3-plane at fixed t2, starting at center + radius.
ParamPath circle_loop_t3(Complex t2, Complex center, double radius, int turns = 1, int sides = 64);

} // namespace periodlab

#endif
