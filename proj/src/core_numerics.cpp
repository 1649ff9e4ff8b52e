#include <periodlab/core_numerics.hpp>

#include <algorithm>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

namespace periodlab
{

std::vector<Complex> polynomial_roots(std::vector<Complex> coeffs)
{
    while (!coeffs.empty() && coeffs.back() == Complex(0.0)) {
        coeffs.pop_back();
    }
    if (coeffs.size() <= 1) {
        return {};
    }
    const auto n = static_cast<Eigen::Index>(coeffs.size() - 1);
    const Complex lead = coeffs.back();
    CMatrix companion = CMatrix::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) {
        companion(i, i - 1) = 1.0;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        companion(i, n - 1) = -coeffs[static_cast<std::size_t>(i)] / lead;
    }
    Eigen::ComplexEigenSolver<CMatrix> solver(companion, false);
    std::vector<Complex> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + n);

    // Newton polish against the original coefficients.
    for (auto &r : roots) {
        for (int it = 0; it < 3; ++it) {
            Complex p = coeffs.back(), dp = 0.0;
            for (std::size_t k = coeffs.size() - 1; k-- > 0;) {
                dp = dp * r + p;
                p = p * r + coeffs[k];
            }
            if (dp == Complex(0.0)) {
                break;
            }
            const Complex step = p / dp;
            if (!is_finite(step) || std::abs(step) > 1e-3 * (1.0 + std::abs(r))) {
                break;
            }
            r -= step;
        }
    }
    return roots;
}

namespace
{

constexpr int samples_per_segment = 128;

double golden_min(const std::function<double(double)> &g, double lo, double hi)
{
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = g(x2);
        }
    }
    return std::min({f1, f2, g(lo), g(hi)});
}

void check_waypoints(const std::vector<ParamPoint> &waypoints)
{
    if (waypoints.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "a path needs at least two waypoints");
    }
    for (const auto &w : waypoints) {
        if (w.size() != waypoints.front().size() || w.size() == 0) {
            throw Error(ErrorCode::SizeMismatch, "waypoints must share a positive dimension");
        }
        if (!all_finite(w)) {
            throw Error(ErrorCode::InvalidArgument, "non-finite waypoint");
        }
    }
}

} // namespace

double ParamPath::min_abs_along(const std::vector<ParamPoint> &waypoints, const DiscriminantFn &disc)
{
    check_waypoints(waypoints);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s + 1 < waypoints.size(); ++s) {
        const ParamPoint a = waypoints[s];
        const ParamPoint d = waypoints[s + 1] - waypoints[s];
        auto g = [&](double u) { return std::abs(disc(a + u * d)); };
        int arg = 0;
        double seg_best = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= samples_per_segment; ++k) {
            const double v = g(static_cast<double>(k) / samples_per_segment);
            if (v < seg_best) {
                seg_best = v;
                arg = k;
            }
        }
        const double lo = static_cast<double>(std::max(arg - 1, 0)) / samples_per_segment;
        const double hi = static_cast<double>(std::min(arg + 1, samples_per_segment)) / samples_per_segment;
        best = std::min({best, seg_best, golden_min(g, lo, hi)});
    }
    return best;
}

double ParamPath::default_clearance(const std::vector<ParamPoint> &waypoints, const DiscriminantFn &disc)
{
    check_waypoints(waypoints);
    double scale = 0.0;
    for (std::size_t s = 0; s + 1 < waypoints.size(); ++s) {
        for (int k = 0; k <= samples_per_segment; ++k) {
            const double u = static_cast<double>(k) / samples_per_segment;
            scale = std::max(scale, std::abs(disc(waypoints[s] + u * (waypoints[s + 1] - waypoints[s]))));
        }
    }
    return 1e-3 * scale;
}

ParamPath::ParamPath(std::vector<ParamPoint> waypoints, double clearance, const DiscriminantFn &disc)
    : m_waypoints(std::move(waypoints)), m_clearance(clearance)
{
    check_waypoints(m_waypoints);
    if (!(clearance > 0.0) || !std::isfinite(clearance)) {
        throw Error(ErrorCode::InvalidArgument, "path clearance must be positive");
    }
    const double m = min_abs_along(m_waypoints, disc);
    if (!(m >= clearance)) {
        throw Error(ErrorCode::NearDiscriminant,
                    "path comes within |disc| = " + std::to_string(m) + " < clearance " + std::to_string(clearance));
    }
}

ParamPoint ParamPath::point(std::size_t segment, double u) const
{
    return m_waypoints[segment] + u * (m_waypoints[segment + 1] - m_waypoints[segment]);
}

ParamPoint ParamPath::tangent(std::size_t segment) const
{
    return m_waypoints[segment + 1] - m_waypoints[segment];
}

double ParamPath::length() const
{
    double len = 0.0;
    for (std::size_t s = 0; s < segment_count(); ++s) {
        len += tangent(s).norm();
    }
    return len;
}

bool ParamPath::is_closed(double eps) const
{
    return (start() - end()).norm() <= eps * (1.0 + start().norm());
}

ParamPath ParamPath::reversed(const DiscriminantFn &disc) const
{
    std::vector<ParamPoint> w(m_waypoints.rbegin(), m_waypoints.rend());
    return ParamPath(std::move(w), m_clearance, disc);
}

ParamPath ParamPath::concatenate(const ParamPath &p, const ParamPath &q, const DiscriminantFn &disc)
{
    if ((p.end() - q.start()).norm() > 1e-12 * (1.0 + p.end().norm())) {
        throw Error(ErrorCode::InvalidArgument, "concatenated paths must meet");
    }
    std::vector<ParamPoint> w = p.waypoints();
    w.insert(w.end(), q.waypoints().begin() + 1, q.waypoints().end());
    return ParamPath(std::move(w), std::min(p.clearance(), q.clearance()), disc);
}

namespace
{

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 - (-92097.0 / 339200), e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

} // namespace

namespace
{

using Rhs = std::function<CMatrix(double, const CMatrix &)>;

struct DormandPrinceStep {
    CMatrix y_new;
    CMatrix k7; // f at the new point (first stage of the next step)
    double err;
};

DormandPrinceStep dormand_prince_step(const Rhs &f, double u, double h, const CMatrix &y, const CMatrix &k1)
{
    const CMatrix k2 = f(u + c2 * h, y + h * (a21 * k1));
    const CMatrix k3 = f(u + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const CMatrix k4 = f(u + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const CMatrix k5 = f(u + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const CMatrix k6 = f(u + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    DormandPrinceStep s;
    s.y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    s.k7 = f(u + h, s.y_new);
    s.err = max_abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * s.k7));
    return s;
}

Rhs segment_rhs(const LinearODESystem &system, const ParamPath &path, std::size_t seg)
{
    const ParamPoint v = path.tangent(seg);
    return [&system, &path, seg, v](double u, const CMatrix &y) -> CMatrix {
        const CMatrix a = system.rhs(path.point(seg, u), v);
        if (a.rows() != system.dimension || a.cols() != system.dimension) {
            throw Error(ErrorCode::SizeMismatch, "rhs returned a matrix of the wrong size");
        }
        if (!all_finite(a)) {
            throw Error(ErrorCode::NonFiniteRHS, "connection matrix is not finite");
        }
        return y * a.transpose();
    };
}

void check_ode_input(const LinearODESystem &system, const CMatrix &y0)
{
    if (!system.rhs) {
        throw Error(ErrorCode::InvalidArgument, "ODE system has no right-hand side");
    }
    if (y0.cols() != system.dimension) {
        throw Error(ErrorCode::SizeMismatch, "initial value has wrong column count");
    }
}

} // namespace

CMatrix integrate_linear_ode(const LinearODESystem &system, const ParamPath &path, const CMatrix &Y0, double tol,
                             OdeStats *stats)
{
    if (!(tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    }
    check_ode_input(system, Y0);
    const double h_min = 64.0 * std::numeric_limits<double>::epsilon();
    constexpr std::size_t max_steps = 2'000'000;

    CMatrix Y = Y0;
    OdeStats local;
    for (std::size_t seg = 0; seg < path.segment_count(); ++seg) {
        if (path.tangent(seg).norm() == 0.0) {
            continue;
        }
        const Rhs f = segment_rhs(system, path, seg);
        double u = 0.0, h = 0.05;
        CMatrix k1 = f(u, Y);
        while (u < 1.0) {
            if (local.accepted + local.rejected > max_steps) {
                throw Error(ErrorCode::StepUnderflow, "step budget exhausted");
            }
            h = std::min(h, 1.0 - u);
            DormandPrinceStep step = dormand_prince_step(f, u, h, Y, k1);
            if (!std::isfinite(step.err)) {
                throw Error(ErrorCode::NonFiniteRHS, "non-finite state during integration");
            }
            const double factor =
                step.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(tol / step.err, 0.2), 0.2, 5.0);
            if (step.err <= tol) {
                u = (h >= 1.0 - u) ? 1.0 : u + h;
                Y = std::move(step.y_new);
                k1 = std::move(step.k7);
                ++local.accepted;
            } else {
                ++local.rejected;
            }
            h *= factor;
            if (u < 1.0 && h < h_min) {
                throw Error(ErrorCode::StepUnderflow, "adaptive step fell below " + std::to_string(h_min));
            }
        }
    }
    if (stats != nullptr) {
        *stats = local;
    }
    return Y;
}

CMatrix integrate_linear_ode_fixed(const LinearODESystem &system, const ParamPath &path, const CMatrix &Y0,
                                   std::size_t steps_per_segment)
{
    if (steps_per_segment == 0) {
        throw Error(ErrorCode::InvalidArgument, "need at least one step per segment");
    }
    check_ode_input(system, Y0);
    CMatrix Y = Y0;
    const double h = 1.0 / static_cast<double>(steps_per_segment);
    for (std::size_t seg = 0; seg < path.segment_count(); ++seg) {
        const Rhs f = segment_rhs(system, path, seg);
        CMatrix k1 = f(0.0, Y);
        for (std::size_t k = 0; k < steps_per_segment; ++k) {
            DormandPrinceStep step = dormand_prince_step(f, static_cast<double>(k) * h, h, Y, k1);
            if (!std::isfinite(step.err)) {
                throw Error(ErrorCode::NonFiniteRHS, "non-finite state during integration");
            }
            Y = std::move(step.y_new);
            k1 = std::move(step.k7);
        }
    }
    return Y;
}

GaussRule gauss_legendre_unit(std::size_t n)
{
    if (n == 0) {
        throw Error(ErrorCode::InvalidArgument, "Gauss rule needs at least one node");
    }
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const auto nd = static_cast<double>(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const auto kd = static_cast<double>(k);
                const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p0 = 1.0;
                p1 = x;
            }
            dp = nd * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

namespace detail
{

const GaussRule &gauss_rule_coarse()
{
    static const GaussRule rule = gauss_legendre_unit(20);
    return rule;
}

const GaussRule &gauss_rule_fine()
{
    static const GaussRule rule = gauss_legendre_unit(40);
    return rule;
}

} // namespace detail

Complex quad_sqrt_singular(const std::function<Complex(Complex)> &f, Complex a, Complex b, double tol)
{
    return quad_sqrt_singular_segment<Complex>([&](const SegmentPoint &p) { return f(p.x); }, a, b, tol);
}

} // namespace periodlab
