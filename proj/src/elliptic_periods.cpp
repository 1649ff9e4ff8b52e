#include <periodlab/elliptic_periods.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace periodlab
{

ParamPoint WeierstrassPoint::as_param() const
{
    ParamPoint p(2);
    p << t2, t3;
    return p;
}

WeierstrassPoint WeierstrassPoint::from_param(const ParamPoint &p)
{
    if (p.size() != 2) {
        throw Error(ErrorCode::SizeMismatch, "a Weierstrass parameter point has two coordinates");
    }
    return {p(0), p(1)};
}

PeriodMatrix2 PeriodMatrix2::normalized() const
{
    return {entries / std::sqrt(2.0 * pi * imag_unit)};
}

Complex discriminant(const WeierstrassPoint &t)
{
    return t.t2 * t.t2 * t.t2 - 27.0 * t.t3 * t.t3;
}

DiscriminantFn weierstrass_discriminant()
{
    return [](const ParamPoint &p) { return discriminant(WeierstrassPoint::from_param(p)); };
}

WeierstrassPoint scale_action(Complex lambda, const WeierstrassPoint &t)
{
    if (lambda == Complex(0.0)) {
        throw Error(ErrorCode::ZeroLambda, "lambda must be nonzero");
    }
    const Complex l2 = lambda * lambda;
    const Complex l4 = l2 * l2;
    return {l4 * t.t2, l4 * l2 * t.t3};
}

std::array<Complex, 3> branch_points(const WeierstrassPoint &t)
{
    const auto r = polynomial_roots({-t.t3, -t.t2, Complex(0.0), Complex(4.0)});
    return {r[0], r[1], r[2]};
}

Eigen::Vector2cd segment_cycle_periods(const WeierstrassPoint &t, Complex ea, Complex eb, Complex ec, double tol)
{
    (void)t;
    const Complex d = eb - ea;
    const Complex mid = 0.5 * (ea + eb);
    const Complex root_mid = std::sqrt(mid - ec);
    auto f = [&](const SegmentPoint &p) -> Eigen::Vector2cd {
        // y = i d sqrt(w) sqrt(1 - w) * 2 sqrt(x - ec), w = (x - ea) / d in [0, 1]
        const double w = std::max(0.0, (p.from_a / d).real());
        const double w1 = std::max(0.0, (-p.from_b / d).real());
        const Complex y = imag_unit * d * std::sqrt(w) * std::sqrt(w1) * 2.0 * root_mid *
                          std::sqrt((p.x - ec) / (mid - ec));
        const Complex inv = 1.0 / y;
        return Eigen::Vector2cd(inv, p.x * inv);
    };
    return 2.0 * quad_sqrt_singular_segment<Eigen::Vector2cd>(f, ea, eb, 0.25 * tol);
}

namespace
{

using Roots = std::array<Complex, 3>;

double discriminant_floor(const WeierstrassPoint &t, double rel)
{
    const double scale = std::pow(std::abs(t.t2), 3) + 27.0 * std::norm(t.t3);
    return rel * std::max(1.0, scale);
}

double distance_to_segment(Complex p, Complex a, Complex b)
{
    const Complex d = b - a;
    const double n = std::norm(d);
    if (n == 0.0) {
        return std::abs(p - a);
    }
    const double u = std::clamp(((p - a) * std::conj(d)).real() / n, 0.0, 1.0);
    return std::abs(p - (a + u * d));
}

// Periods of two segment cycles chosen for their clearance from the third root.
Eigen::Matrix2cd candidate_periods(const WeierstrassPoint &t, const Roots &r, double tol)
{
    std::array<std::pair<double, int>, 3> quality;
    for (int k = 0; k < 3; ++k) {
        const Complex a = r[(k + 1) % 3], b = r[(k + 2) % 3];
        quality[k] = {distance_to_segment(r[k], a, b) / std::abs(b - a), k};
    }
    std::sort(quality.begin(), quality.end(), [](const auto &x, const auto &y) { return x.first > y.first; });
    Eigen::Matrix2cd c;
    for (int row = 0; row < 2; ++row) {
        const int k = quality[row].second;
        c.row(row) = segment_cycle_periods(t, r[(k + 1) % 3], r[(k + 2) % 3], r[k], tol).transpose();
    }
    return c;
}

// Reorders `fresh` to follow `old` with the smallest total displacement.
Roots match_roots(const Roots &old, Roots fresh)
{
    std::array<int, 3> perm{0, 1, 2}, best{0, 1, 2};
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (int i = 0; i < 3; ++i) {
            cost += std::abs(fresh[perm[i]] - old[i]);
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {fresh[best[0]], fresh[best[1]], fresh[best[2]]};
}

double min_separation(const Roots &r)
{
    return std::min({std::abs(r[0] - r[1]), std::abs(r[1] - r[2]), std::abs(r[0] - r[2])});
}

double integrality_defect(const Eigen::Matrix2cd &m, Eigen::Matrix2cd &rounded)
{
    double dev = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const Complex z = m(i, j);
            rounded(i, j) = Complex(std::round(z.real()), 0.0);
            dev = std::max(dev, std::abs(z - rounded(i, j)));
        }
    }
    return dev;
}

} // namespace

PeriodMatrix2 base_period_matrix(double tol)
{
    const WeierstrassPoint b = base_point_t;
    PeriodMatrix2 p;
    p.entries.row(0) = segment_cycle_periods(b, -1.0, 0.0, 1.0, tol).transpose();
    p.entries.row(1) = segment_cycle_periods(b, 0.0, 1.0, -1.0, tol).transpose();
    if (p.tau().imag() < 0.0) {
        p.entries.row(0) *= -1.0;
    }
    return p;
}

int legendre_sign()
{
    static const int sigma = [] {
        const Complex r = base_period_matrix(1e-13).det() / (2.0 * pi * imag_unit);
        return r.real() > 0.0 ? 1 : -1;
    }();
    return sigma;
}

ParamPath default_path(const WeierstrassPoint &t, const PeriodOptions &opts)
{
    const WeierstrassPoint b = base_point_t;
    const Complex d2 = t.t2 - b.t2, d3 = t.t3 - b.t3;
    // Delta(b + s (t - b)) as a cubic in s.
    std::vector<Complex> cubic{b.t2 * b.t2 * b.t2 - 27.0 * b.t3 * b.t3, 3.0 * b.t2 * b.t2 * d2 - 54.0 * b.t3 * d3,
                               3.0 * b.t2 * d2 * d2 - 27.0 * d3 * d3, d2 * d2 * d2};
    // a negligible leading coefficient only moves a root far away, but would
    // ruin the companion matrix for the others
    double cmax = 0.0;
    for (const Complex c : cubic) {
        cmax = std::max(cmax, std::abs(c));
    }
    while (cubic.size() > 1 && std::abs(cubic.back()) <= 1e-12 * cmax) {
        cubic.pop_back();
    }
    const auto sroots = polynomial_roots(cubic);
    std::vector<Complex> near;
    for (const Complex s : sroots) {
        if (s.real() >= 0.0 && s.real() <= 1.0 && std::abs(s.imag()) < opts.detour_radius) {
            near.push_back(s);
        }
    }
    std::sort(near.begin(), near.end(), [](Complex x, Complex y) { return x.real() < y.real(); });

    // Roots closer than the detour radius (a multiple root splits into a tight
    // cluster) are passed around together.
    struct Cluster {
        Complex center;
        double spread;
    };
    std::vector<Cluster> clusters;
    for (std::size_t k = 0; k < near.size();) {
        std::size_t e = k + 1;
        while (e < near.size() && std::abs(near[e] - near[e - 1]) < opts.detour_radius) {
            ++e;
        }
        Complex c = 0.0;
        for (std::size_t j = k; j < e; ++j) {
            c += near[j];
        }
        c /= static_cast<double>(e - k);
        double spread = 0.0;
        for (std::size_t j = k; j < e; ++j) {
            spread = std::max(spread, std::abs(near[j] - c));
        }
        clusters.push_back({c, spread});
        k = e;
    }

    std::vector<Complex> svals{Complex(0.0)};
    auto push = [&](Complex s) {
        if (std::abs(s - svals.back()) > 1e-15) {
            svals.push_back(s);
        }
    };
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        const Complex c = clusters[k].center;
        const double e = clusters[k].spread;
        double cap = std::min(0.45 * std::abs(c), 0.45 * std::abs(1.0 - c));
        for (std::size_t j = 0; j < clusters.size(); ++j) {
            if (j != k) {
                cap = std::min(cap, 0.45 * (std::abs(c - clusters[j].center) - clusters[j].spread));
            }
        }
        const double r = std::min(std::max(opts.detour_radius, 2.0 * e), cap);
        if (!(r >= 1.5 * e) || !(r > 0.0)) {
            throw Error(ErrorCode::NearDiscriminant, "discriminant crossings are too close to the endpoints");
        }
        push(Complex(c.real() - r, 0.0));
        constexpr int pieces = 16;
        for (int j = 0; j <= pieces; ++j) {
            push(c + r * std::exp(imag_unit * (pi + pi * j / pieces)));
        }
        push(Complex(c.real() + r, 0.0));
    }
    push(Complex(1.0));

    std::vector<ParamPoint> waypoints;
    for (const Complex s : svals) {
        waypoints.push_back(WeierstrassPoint{b.t2 + s * d2, b.t3 + s * d3}.as_param());
    }
    if (waypoints.size() < 2) {
        waypoints.push_back(waypoints.front());
    }
    const DiscriminantFn disc = weierstrass_discriminant();
    const double clearance = std::min(ParamPath::default_clearance(waypoints, disc),
                                      0.5 * ParamPath::min_abs_along(waypoints, disc));
    if (!(clearance > 0.0)) {
        throw Error(ErrorCode::NearDiscriminant, "no path avoiding the discriminant was found");
    }
    return ParamPath(std::move(waypoints), clearance, disc);
}

PeriodMatrix2 continue_periods(const ParamPath &path, const PeriodMatrix2 &start, double tol)
{
    if (path.dimension() != 2) {
        throw Error(ErrorCode::SizeMismatch, "period continuation needs a path in (t2, t3)");
    }
    if (!(tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    }
    const double loose = std::max(tol, 1e-8);
    Eigen::Matrix2cd p = start.entries;
    WeierstrassPoint here = WeierstrassPoint::from_param(path.start());
    Roots roots = branch_points(here);
    Eigen::Matrix2cd rounded;

    for (std::size_t seg = 0; seg < path.segment_count(); ++seg) {
        double u = 0.0, h = 0.125;
        while (u < 1.0) {
            if (h < 1e-10) {
                throw Error(ErrorCode::NonIntegralMonodromy, "period continuation could not resolve the cycle basis");
            }
            const double un = std::min(1.0, u + h);
            const WeierstrassPoint next = WeierstrassPoint::from_param(path.point(seg, un));
            const Roots rn = match_roots(roots, branch_points(next));
            double moved = 0.0;
            for (int i = 0; i < 3; ++i) {
                moved = std::max(moved, std::abs(rn[i] - roots[i]));
            }
            if (moved > 0.3 * min_separation(roots)) {
                h *= 0.5;
                continue;
            }
            const Eigen::Matrix2cd c = candidate_periods(next, rn, loose);
            if (integrality_defect(p * c.inverse(), rounded) > 0.05) {
                h *= 0.5;
                continue;
            }
            p = rounded * c;
            roots = rn;
            here = next;
            u = un;
            h = std::min(0.25, 1.5 * h);
        }
    }
    const Eigen::Matrix2cd c = candidate_periods(here, roots, tol);
    integrality_defect(p * c.inverse(), rounded);
    return {rounded * c};
}

PeriodMatrix2 period_matrix(const WeierstrassPoint &t, const PeriodOptions &opts)
{
    if (!is_finite(t.t2) || !is_finite(t.t3)) {
        throw Error(ErrorCode::InvalidArgument, "non-finite parameters");
    }
    if (std::abs(discriminant(t)) <= discriminant_floor(t, opts.disc_floor)) {
        throw Error(ErrorCode::NearDiscriminant, "the curve is (numerically) singular");
    }
    return continue_periods(default_path(t, opts), base_period_matrix(opts.tol), opts.tol);
}

PeriodMatrix2 period_matrix(const WeierstrassPoint &t, double tol)
{
    PeriodOptions opts;
    opts.tol = tol;
    return period_matrix(t, opts);
}

Complex period_map_tau(const WeierstrassPoint &t, double tol)
{
    return period_matrix(t, tol).tau();
}

ReducedCubicFamily reduce_cubic_family(const CubicFamilyPoint &k)
{
    if (k.t0 == Complex(0.0)) {
        throw Error(ErrorCode::ZeroT0, "t0 must be nonzero");
    }
    const Complex s = std::pow(k.t0, -1.0 / 3.0);
    return {{k.t2 * s, k.t3}, s};
}

PeriodMatrix2 cubic_family_period_matrix(const CubicFamilyPoint &k, double tol)
{
    const ReducedCubicFamily red = reduce_cubic_family(k);
    const PeriodMatrix2 pr = period_matrix(red.point, tol);
    const Complex s = red.scale;
    PeriodMatrix2 out;
    out.entries.col(0) = s * pr.entries.col(0);
    out.entries.col(1) = s * (s * pr.entries.col(1) + k.t1 * pr.entries.col(0));
    return out;
}

} // namespace periodlab
