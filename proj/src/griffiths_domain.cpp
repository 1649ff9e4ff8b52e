#include <periodlab/griffiths_domain.hpp>

#include <limits>

#include <Eigen/SVD>

namespace periodlab
{

std::string_view hermitian_case_name(HermitianCase c) noexcept
{
    switch (c) {
        case HermitianCase::Case1: return "Case1";
        case HermitianCase::Case2: return "Case2";
        case HermitianCase::No: return "No";
    }
    return "No";
}

HermitianCase classify_hermitian(int m, const std::vector<int> &h)
{
    if (m < 1 || h.size() != static_cast<std::size_t>(m + 1)) {
        throw Error(ErrorCode::SizeMismatch, "need m + 1 Hodge numbers");
    }
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (h[k] != h[h.size() - 1 - k]) {
            throw Error(ErrorCode::InvalidArgument, "Hodge numbers must be palindromic");
        }
    }
    auto hp = [&](int p) { return h[static_cast<std::size_t>(m - p)]; };
    const int a = m / 2;
    auto only = [&](int lo, int hi) {
        for (int p = 0; p <= m; ++p) {
            if ((p < lo || p > hi) && hp(p) != 0) {
                return false;
            }
        }
        return true;
    };
    if (m % 2 == 1) {
        return only(a, a + 1) ? HermitianCase::Case1 : HermitianCase::No;
    }
    return (hp(a + 1) <= 1 && only(a - 1, a + 1)) ? HermitianCase::Case2 : HermitianCase::No;
}

int lie_algebra_dim(const HodgeType &type)
{
    const int mu = type.mu();
    return type.m % 2 ? mu * (mu + 1) / 2 : mu * (mu - 1) / 2;
}

namespace
{

// Rank of the linear conditions cutting F^i g out of gl(mu, C).
int solution_dim(const std::vector<CMatrix> &projectors_out, const std::vector<CMatrix> &bases, const CMatrix &psi)
{
    const Eigen::Index mu = psi.rows();
    Eigen::Index rows = mu * mu;
    for (std::size_t p = 0; p < bases.size(); ++p) {
        rows += mu * bases[p].cols();
    }
    CMatrix system(rows, mu * mu);
    for (Eigen::Index a = 0; a < mu; ++a) {
        for (Eigen::Index b = 0; b < mu; ++b) {
            CMatrix n = CMatrix::Zero(mu, mu);
            n(a, b) = 1.0;
            Eigen::Index r = 0;
            const CMatrix lie = n.transpose() * psi + psi * n;
            system.col(b * mu + a).segment(r, mu * mu) = Eigen::Map<const CVector>(lie.data(), mu * mu);
            r += mu * mu;
            for (std::size_t p = 0; p < bases.size(); ++p) {
                const CMatrix img = projectors_out[p] * n * bases[p];
                system.col(b * mu + a).segment(r, img.size()) = Eigen::Map<const CVector>(img.data(), img.size());
                r += img.size();
            }
        }
    }
    Eigen::JacobiSVD<CMatrix> svd(system);
    const auto &s = svd.singularValues();
    int rank = 0;
    while (rank < s.size() && s(rank) > 1e-8 * s(0)) {
        ++rank;
    }
    return static_cast<int>(mu * mu) - rank;
}

} // namespace

std::vector<int> lie_filtration_dims(const HodgeFiltration &point, const HodgeType &type)
{
    // rejects points that are not Hodge structures of this type
    decomposition_from_filtration(point, type);
    const int mu = type.mu();
    std::vector<CMatrix> q;
    for (const auto &b : point.level) {
        q.push_back(orthonormal_basis(b));
    }
    auto level = [&](int j) -> CMatrix {
        if (j <= 0) {
            return CMatrix::Identity(mu, mu);
        }
        if (j > type.m) {
            return CMatrix(mu, 0);
        }
        return q[static_cast<std::size_t>(j)];
    };
    const CMatrix psi = type.psi_complex();
    std::vector<int> dims;
    for (int i = 0; i >= -type.m; --i) {
        std::vector<CMatrix> out, bases;
        for (int p = 1; p <= type.m; ++p) {
            const CMatrix target = level(p + i);
            out.push_back(CMatrix::Identity(mu, mu) - target * target.adjoint());
            bases.push_back(level(p));
        }
        dims.push_back(solution_dim(out, bases, psi));
    }
    return dims;
}

DomainReport domain_dims(const HodgeType &type, const HodgeFiltration &point)
{
    DomainReport r;
    r.lie_dims = lie_filtration_dims(point, type);
    r.dim_lie = r.lie_dims.back();
    r.dim_F0_lie = r.lie_dims.front();
    r.dim_D = r.dim_lie - r.dim_F0_lie;
    r.dim_compact_dual = r.dim_D;
    r.dim_horizontal = r.lie_dims.size() > 1 ? r.lie_dims[1] - r.lie_dims[0] : 0;
    r.hermitian_case = classify_hermitian(type.m, type.h);
    return r;
}

IMatrix standard_symplectic(int g)
{
    IMatrix j = IMatrix::Zero(2 * g, 2 * g);
    j.topRightCorner(g, g) = IMatrix::Identity(g, g);
    j.bottomLeftCorner(g, g) = -IMatrix::Identity(g, g);
    return j;
}

HodgeFiltration base_point(const HodgeType &type)
{
    const int mu = type.mu();
    HodgeFiltration f;
    if (type.m == 1) {
        const int g = type.h[0];
        if (type.psi != standard_symplectic(g)) {
            throw Error(ErrorCode::UnsupportedType, "weight-1 base point needs the standard symplectic form");
        }
        CMatrix f1(mu, g);
        f1 << imag_unit * CMatrix::Identity(g, g), CMatrix::Identity(g, g);
        f.level = {CMatrix::Identity(mu, mu), f1};
        return f;
    }
    if (type.m == 2) {
        const int a = type.h[0], b = type.h[1];
        std::vector<int> neg, pos;
        if (!type.psi.isDiagonal()) {
            throw Error(ErrorCode::UnsupportedType, "weight-2 base point needs a diagonal form");
        }
        for (int k = 0; k < mu; ++k) {
            const int d = type.psi(k, k);
            if (d == -1) {
                neg.push_back(k);
            } else if (d == 1) {
                pos.push_back(k);
            } else {
                throw Error(ErrorCode::UnsupportedType, "weight-2 base point needs diagonal entries +-1");
            }
        }
        if (static_cast<int>(neg.size()) != 2 * a || static_cast<int>(pos.size()) != b) {
            throw Error(ErrorCode::UnsupportedType,
                        "weight-2 base point needs 2 h^{2,0} entries -1 and h^{1,1} entries +1 on the diagonal");
        }
        CMatrix f2 = CMatrix::Zero(mu, a);
        CMatrix h11 = CMatrix::Zero(mu, b);
        for (int k = 0; k < a; ++k) {
            f2(neg[2 * k], k) = 1.0;
            f2(neg[2 * k + 1], k) = imag_unit;
        }
        for (int k = 0; k < b; ++k) {
            h11(pos[k], k) = 1.0;
        }
        CMatrix f1(mu, a + b);
        f1 << f2, h11;
        f.level = {CMatrix::Identity(mu, mu), f1, f2};
        return f;
    }
    if (type.m == 3 && type.h == std::vector<int>{1, 1, 1, 1} && type.psi == standard_symplectic(2)) {
        CMatrix v30(4, 1), v21(4, 1);
        v30 << -imag_unit, 0.0, 1.0, 0.0;
        v21 << 0.0, imag_unit, 0.0, 1.0;
        CMatrix f2(4, 2), f1(4, 3);
        f2 << v30, v21;
        f1 << v30, v21, v21.conjugate();
        f.level = {CMatrix::Identity(4, 4), f1, f2, v30};
        return f;
    }
    throw Error(ErrorCode::UnsupportedType, "no built-in base point for this type");
}

std::int64_t kodaira_spencer_count(int n, int d)
{
    if (n < 1 || d < 1) {
        throw Error(ErrorCode::InvalidArgument, "n and d must be at least 1");
    }
    // binomial(n + 1 + d, d) with exact intermediate division
    std::int64_t c = 1;
    for (int k = 1; k <= d; ++k) {
        const std::int64_t num = n + 1 + k;
        if (c > std::numeric_limits<std::int64_t>::max() / num) {
            throw Error(ErrorCode::InvalidArgument, "binomial coefficient overflows 64 bits");
        }
        c = c * num / k;
    }
    const std::int64_t s = n + 2;
    return c - s * s;
}

} // namespace periodlab
