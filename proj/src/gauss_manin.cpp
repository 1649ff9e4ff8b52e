#include <periodlab/gauss_manin.hpp>

#include <cmath>

namespace periodlab
{

Eigen::Matrix2cd connection_matrix(const WeierstrassPoint &t, const Eigen::Vector2cd &v)
{
    const Complex delta_t = discriminant(t);
    if (std::abs(delta_t) == 0.0 || !is_finite(delta_t)) {
        throw Error(ErrorCode::NearDiscriminant, "connection evaluated on the discriminant");
    }
    const Complex d_disc = 3.0 * t.t2 * t.t2 * v(0) - 54.0 * t.t3 * v(1);
    const Complex delta = 3.0 * t.t3 * v(0) - 2.0 * t.t2 * v(1);
    Eigen::Matrix2cd a;
    a << -d_disc / 12.0, -1.5 * delta, t.t2 * delta / 8.0, d_disc / 12.0;
    return a / delta_t;
}

LinearODESystem gauss_manin_system()
{
    LinearODESystem sys;
    sys.dimension = 2;
    sys.rhs = [](const ParamPoint &t, const ParamPoint &v) -> CMatrix {
        return connection_matrix(WeierstrassPoint::from_param(t), Eigen::Vector2cd(v(0), v(1)));
    };
    return sys;
}

PeriodMatrix2 transport(const ParamPath &path, const PeriodMatrix2 &p0, double tol, OdeStats *stats)
{
    if (path.dimension() != 2) {
        throw Error(ErrorCode::SizeMismatch, "transport needs a path in (t2, t3)");
    }
    const CMatrix y = integrate_linear_ode(gauss_manin_system(), path, p0.entries, tol, stats);
    return {Eigen::Matrix2cd(y)};
}

MonodromyMatrix round_monodromy(const Eigen::Matrix2cd &m, double threshold)
{
    MonodromyMatrix out;
    double dev = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double r = std::round(m(i, j).real());
            dev = std::max(dev, std::abs(m(i, j) - Complex(r, 0.0)));
            out.entries(i, j) = static_cast<int>(r);
        }
    }
    if (!(dev <= threshold)) {
        throw Error(ErrorCode::NonIntegralMonodromy,
                    "monodromy deviates from an integer matrix by " + std::to_string(dev));
    }
    if (out.entries.determinant() != 1) {
        throw Error(ErrorCode::NonIntegralMonodromy, "rounded monodromy does not have determinant 1");
    }
    return out;
}

namespace
{

void require_closed(const ParamPath &loop)
{
    const double scale = 1.0 + max_abs(loop.start());
    if (!loop.is_closed(1e-12 * scale)) {
        throw Error(ErrorCode::InvalidArgument, "monodromy needs a closed loop");
    }
}

} // namespace

MonodromyMatrix monodromy(const ParamPath &loop, const PeriodMatrix2 &p0, double tol)
{
    require_closed(loop);
    const PeriodMatrix2 end = transport(loop, p0, tol);
    return round_monodromy(end.entries * p0.entries.inverse());
}

MonodromyMatrix monodromy_by_quadrature(const ParamPath &loop, const PeriodMatrix2 &p0, double tol)
{
    require_closed(loop);
    const PeriodMatrix2 end = continue_periods(loop, p0, tol);
    return round_monodromy(end.entries * p0.entries.inverse());
}

ParamPath circle_loop_t3(Complex t2, Complex center, double radius, int turns, int sides)
{
    if (!(radius > 0.0) || turns < 1 || sides < 3) {
        throw Error(ErrorCode::InvalidArgument, "loop needs positive radius, turns >= 1 and sides >= 3");
    }
    std::vector<ParamPoint> waypoints;
    for (int k = 0; k <= turns * sides; ++k) {
        // reuse the exact start point so the loop closes exactly
        const Complex z = (k % sides == 0) ? center + radius : center + radius * std::exp(2.0 * pi * imag_unit * (double(k) / sides));
        waypoints.push_back(WeierstrassPoint{t2, z}.as_param());
    }
    const DiscriminantFn disc = weierstrass_discriminant();
    return ParamPath(waypoints, ParamPath::default_clearance(waypoints, disc), disc);
}

} // namespace periodlab
