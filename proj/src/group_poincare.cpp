#include <periodlab/group_poincare.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <tuple>

namespace periodlab
{

bool is_in_gamma(const Eigen::MatrixXi &a, const Eigen::MatrixXi &psi)
{
    if (a.rows() != a.cols() || psi.rows() != psi.cols() || a.rows() != psi.rows()) {
        throw Error(ErrorCode::SizeMismatch, "A and Psi must be square of the same size");
    }
    using L = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
    const L al = a.cast<std::int64_t>();
    const L pl = psi.cast<std::int64_t>();
    return L(al * pl * al.transpose()) == pl;
}

std::vector<Eigen::Matrix2i> sl2_elements(int max_entry)
{
    std::vector<Eigen::Matrix2i> out;
    for (int a = -max_entry; a <= max_entry; ++a) {
        for (int b = -max_entry; b <= max_entry; ++b) {
            for (int c = -max_entry; c <= max_entry; ++c) {
                for (int d = -max_entry; d <= max_entry; ++d) {
                    if (a * d - b * c == 1) {
                        Eigen::Matrix2i m;
                        m << a, b, c, d;
                        out.push_back(m);
                    }
                }
            }
        }
    }
    return out;
}

std::string_view coset_model_name(CosetModel m) noexcept
{
    switch (m) {
        case CosetModel::Whole: return "whole";
        case CosetModel::FirstRow: return "first-row";
        case CosetModel::BottomRow: return "bottom-row";
    }
    return "whole";
}

bool in_stabilizer(CosetModel model, const Eigen::Matrix2i &a)
{
    switch (model) {
        case CosetModel::Whole: return a.determinant() == 1;
        case CosetModel::FirstRow: return a(0, 1) == 0 && std::abs(a(0, 0)) == 1 && a.determinant() == 1;
        case CosetModel::BottomRow: return a(1, 0) == 0 && std::abs(a(1, 1)) == 1 && a.determinant() == 1;
    }
    return false;
}

namespace
{

// (g, x, y) with p x + q y = g = gcd(p, q) >= 0.
void extended_gcd(long p, long q, long &g, long &x, long &y)
{
    long old_r = p, r = q, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        const long k = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - k * r);
        std::tie(old_s, s) = std::make_pair(s, old_s - k * s);
        std::tie(old_t, t) = std::make_pair(t, old_t - k * t);
    }
    if (old_r < 0) {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    g = old_r;
    x = old_s;
    y = old_t;
}

} // namespace

CosetFamily enumerate_cosets_sl2(CosetModel model, int height)
{
    if (height < 1) {
        throw Error(ErrorCode::InvalidArgument, "height must be at least 1");
    }
    CosetFamily fam;
    fam.model = model;
    fam.height = height;
    if (model == CosetModel::Whole) {
        fam.representatives.push_back(Eigen::Matrix2i::Identity());
        fam.heights.push_back(1);
        return fam;
    }
    for (int h = 1; h <= height; ++h) {
        // canonical sign: first coordinate positive, or (0, 1)
        for (int x = 0; x <= h; ++x) {
            for (int y = -h; y <= h; ++y) {
                if (std::max(std::abs(x), std::abs(y)) != h || (x == 0 && y != 1)) {
                    continue;
                }
                long g, s, t;
                extended_gcd(x, y, g, s, t);
                if (g != 1) {
                    continue;
                }
                Eigen::Matrix2i m;
                if (model == CosetModel::BottomRow) {
                    // x s + y t = 1: [[t, -s], [x, y]]
                    m << static_cast<int>(t), static_cast<int>(-s), x, y;
                } else {
                    // first row (x, y): [[x, y], [-t, s]]
                    m << x, y, static_cast<int>(-t), static_cast<int>(s);
                }
                fam.representatives.push_back(m);
                fam.heights.push_back(h);
            }
        }
    }
    return fam;
}

Complex mobius(const Eigen::Matrix2i &a, Complex z)
{
    return (double(a(0, 0)) * z + double(a(0, 1))) / (double(a(1, 0)) * z + double(a(1, 1)));
}

Complex factor_cz_plus_d(Complex z, const Eigen::Matrix2i &a)
{
    return double(a(1, 0)) * z + double(a(1, 1));
}

Complex factor_bz_plus_d(Complex z, const Eigen::Matrix2i &a)
{
    return double(a(0, 1)) * z + double(a(1, 1));
}

CocycleReport cocycle_check(const AutomorphyFactor &j, ActionSide side, std::size_t samples, std::uint64_t seed,
                            double tol)
{
    static const std::vector<Eigen::Matrix2i> pool = sl2_elements(3);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(-1.0, 1.0), im(0.5, 2.0);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    CocycleReport r;
    for (std::size_t s = 0; s < samples; ++s) {
        const Complex x(re(rng), im(rng));
        const Eigen::Matrix2i a = pool[pick(rng)];
        const Eigen::Matrix2i b = pool[pick(rng)];
        const Complex lhs = j(x, a * b);
        const Complex rhs = side == ActionSide::Left ? j(mobius(b, x), a) * j(x, b)
                                                     : j(x, a) * j(mobius(a.transpose(), x), b);
        const double err = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
        r.max_relative_error = std::max(r.max_relative_error, err);
        ++r.samples;
    }
    r.holds = r.max_relative_error <= tol;
    return r;
}

HalfPlaneFunction slash(const HalfPlaneFunction &f, int n, const Eigen::Matrix2i &a, const AutomorphyFactor &j)
{
    return [f, n, a, j](Complex x) { return std::pow(j(x, a), -n) * f(mobius(a, x)); };
}

std::vector<int> report_heights(int height)
{
    if (height < 1) {
        throw Error(ErrorCode::InvalidArgument, "height must be at least 1");
    }
    std::vector<int> hs;
    for (int h = 1; h < height; h *= 2) {
        hs.push_back(h);
    }
    hs.push_back(height);
    return hs;
}

namespace
{

PartialSumsReport sum_by_height(const CosetFamily &fam, const std::function<Complex(const Eigen::Matrix2i &)> &term,
                                double tol)
{
    PartialSumsReport r;
    r.tolerance = tol;
    const std::vector<int> hs = fam.model == CosetModel::Whole ? std::vector<int>{1, fam.height}
                                                                : report_heights(fam.height);
    Complex total = 0.0;
    std::size_t k = 0, count = 0;
    for (int h : hs) {
        // one full shell at a time, in the fixed enumeration order
        for (int shell = (r.heights.empty() ? 1 : r.heights.back() + 1); shell <= h; ++shell) {
            Complex shell_sum = 0.0;
            while (k < fam.representatives.size() && fam.heights[k] == shell) {
                shell_sum += term(fam.representatives[k]);
                ++k;
                ++count;
            }
            total += shell_sum;
        }
        if (!is_finite(total)) {
            throw Error(ErrorCode::NonConvergent, "non-finite partial sum");
        }
        if (!r.heights.empty() && h == r.heights.back()) {
            continue;
        }
        r.heights.push_back(h);
        r.partial_sums.push_back(total);
        r.terms.push_back(count);
    }
    if (r.partial_sums.size() >= 2) {
        r.tail_estimate = std::abs(r.partial_sums.back() - r.partial_sums[r.partial_sums.size() - 2]);
    } else {
        r.tail_estimate = 0.0;
    }
    r.converged = r.tail_estimate <= tol;
    return r;
}

} // namespace

PartialSumsReport poincare_series_uhp(const HalfPlaneFunction &f, int n, Complex tau, int height, double tol)
{
    if (!(tau.imag() > 0.0) || !is_finite(tau)) {
        throw Error(tau.imag() == 0.0 ? ErrorCode::RealTau : ErrorCode::InvalidArgument,
                    "tau must lie in the upper half plane");
    }
    const CosetFamily fam = enumerate_cosets_sl2(CosetModel::BottomRow, height);
    return sum_by_height(fam, [&](const Eigen::Matrix2i &a) { return std::pow(factor_cz_plus_d(tau, a), -n) * f(mobius(a, tau)); },
                         tol);
}

void validate_stabilizer(const MatrixFunctional &p, const Eigen::Matrix2cd &x, CosetModel model, double rel_tol)
{
    std::vector<Eigen::Matrix2i> samples;
    for (const auto &b : sl2_elements(3)) {
        if (in_stabilizer(model, b)) {
            samples.push_back(b);
        }
    }
    const Complex base = p(x);
    for (const auto &b : samples) {
        const Complex v = p(b.cast<double>().cast<Complex>() * x);
        if (!(std::abs(v - base) <= rel_tol * std::max(1.0, std::abs(base)))) {
            throw Error(ErrorCode::StabilizerMismatch, "the functional is not invariant under the declared stabilizer");
        }
    }
}

PartialSumsReport period_poincare(const MatrixFunctional &p, const Eigen::Matrix2cd &pm, CosetModel model, int height,
                                  double tol)
{
    validate_stabilizer(p, pm, model);
    const CosetFamily fam = enumerate_cosets_sl2(model, height);
    return sum_by_height(fam, [&](const Eigen::Matrix2i &a) { return p(a.cast<double>().cast<Complex>() * pm); }, tol);
}

MeanValueReport mean_value_diagnostic(const HalfPlaneFunction &f, Complex center, double radius, int grid)
{
    if (!(radius > 0.0) || grid < 1) {
        throw Error(ErrorCode::InvalidArgument, "radius and grid must be positive");
    }
    MeanValueReport r;
    r.lhs = std::norm(f(center));
    const int nr = grid, nt = 4 * grid;
    double acc = 0.0;
    for (int i = 0; i < nr; ++i) {
        const double rho = radius * (i + 0.5) / nr;
        for (int k = 0; k < nt; ++k) {
            const double th = 2.0 * pi * (k + 0.5) / nt;
            acc += std::norm(f(center + std::polar(rho, th))) * rho;
        }
    }
    // sum * (dr * dtheta) / (pi r^2)
    r.rhs = acc * (radius / nr) * (2.0 * pi / nt) / (pi * radius * radius);
    return r;
}

} // namespace periodlab
