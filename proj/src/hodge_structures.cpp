#include <periodlab/hodge_structures.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace periodlab
{

CMatrix orthonormal_basis(const CMatrix &m, double rel_rank_tol)
{
    if (m.cols() == 0) {
        return CMatrix(m.rows(), 0);
    }
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
    const auto &s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > rel_rank_tol * s(0) && s(rank) > 0.0) {
        ++rank;
    }
    return svd.matrixU().leftCols(rank);
}

CMatrix subspace_intersection(const CMatrix &u, const CMatrix &v, double rel_rank_tol)
{
    if (u.cols() == 0 || v.cols() == 0) {
        return CMatrix(u.rows(), 0);
    }
    CMatrix stacked(u.rows(), u.cols() + v.cols());
    stacked << u, -v;
    Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeFullV);
    const auto &s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > rel_rank_tol) {
        ++rank;
    }
    const Eigen::Index null_dim = stacked.cols() - rank;
    if (null_dim == 0) {
        return CMatrix(u.rows(), 0);
    }
    const CMatrix null = svd.matrixV().rightCols(null_dim);
    return orthonormal_basis(u * null.topRows(u.cols()), rel_rank_tol);
}

double subspace_distance(const CMatrix &u, const CMatrix &v)
{
    if (u.cols() != v.cols() || u.rows() != v.rows()) {
        return 1.0;
    }
    const CMatrix diff = u * u.adjoint() - v * v.adjoint();
    if (diff.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<CMatrix> svd(diff);
    return svd.singularValues()(0);
}

namespace
{

using LMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

Complex i_power(int n)
{
    switch (((n % 4) + 4) % 4) {
        case 0: return 1.0;
        case 1: return imag_unit;
        case 2: return -1.0;
        default: return -imag_unit;
    }
}

int minus_one_power(int n)
{
    return (n % 2 == 0) ? 1 : -1;
}

CMatrix hstack(const std::vector<CMatrix> &blocks, Eigen::Index rows)
{
    Eigen::Index cols = 0;
    for (const auto &b : blocks) {
        cols += b.cols();
    }
    CMatrix out(rows, cols);
    Eigen::Index c = 0;
    for (const auto &b : blocks) {
        out.middleCols(c, b.cols()) = b;
        c += b.cols();
    }
    return out;
}

Eigen::Index numeric_rank(const CMatrix &m, double rel)
{
    if (m.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto &s = svd.singularValues();
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > rel * s(0) && s(r) > 0.0) {
        ++r;
    }
    return r;
}

double min_eigenvalue(const RMatrix &sym)
{
    if (sym.size() == 0) {
        return std::numeric_limits<double>::infinity();
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(sym);
    return es.eigenvalues()(0);
}

double min_eigenvalue(const CMatrix &herm)
{
    if (herm.size() == 0) {
        return std::numeric_limits<double>::infinity();
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
    return es.eigenvalues()(0);
}

RMatrix symmetric_part(const RMatrix &m)
{
    return 0.5 * (m + m.transpose());
}

void check_pieces(const HodgeDecomposition &d, const HodgeType &type)
{
    if (d.piece.size() != static_cast<std::size_t>(type.m + 1)) {
        throw Error(ErrorCode::SizeMismatch, "decomposition needs one piece per p = 0..m");
    }
    for (int p = 0; p <= type.m; ++p) {
        const CMatrix &b = d.piece[static_cast<std::size_t>(p)];
        if (b.rows() != type.mu() || b.cols() != type.hodge_number(p)) {
            throw Error(ErrorCode::SizeMismatch, "piece H^{p,q} has the wrong shape");
        }
    }
}

// Real bases of H^i and J_i, i = 0..m/2.
void real_pieces(const HodgeDecomposition &d, const HodgeType &type, std::vector<RMatrix> &basis,
                 std::vector<RMatrix> &jmat)
{
    check_pieces(d, type);
    const int mu = type.mu();
    basis.clear();
    jmat.clear();
    for (int i = 0; 2 * i <= type.m; ++i) {
        const CMatrix b = orthonormal_basis(d.piece[static_cast<std::size_t>(type.m - i)]);
        const Eigen::Index r = b.cols();
        if (2 * i < type.m) {
            RMatrix x(mu, 2 * r);
            x << 2.0 * b.real(), -2.0 * b.imag();
            RMatrix j = RMatrix::Zero(2 * r, 2 * r);
            j.topRightCorner(r, r) = -RMatrix::Identity(r, r);
            j.bottomLeftCorner(r, r) = RMatrix::Identity(r, r);
            basis.push_back(x);
            jmat.push_back(j);
        } else {
            RMatrix both(mu, 2 * r);
            both << b.real(), b.imag();
            RMatrix x(mu, 0);
            if (r > 0) {
                Eigen::JacobiSVD<RMatrix> svd(both, Eigen::ComputeThinU);
                const auto &s = svd.singularValues();
                Eigen::Index rank = 0;
                while (rank < s.size() && s(rank) > 1e-8 * s(0)) {
                    ++rank;
                }
                if (rank != r) {
                    throw Error(ErrorCode::DegenerateFiltration, "middle Hodge piece is not defined over R");
                }
                x = svd.matrixU().leftCols(r);
            }
            basis.push_back(x);
            jmat.push_back(RMatrix::Identity(r, r));
        }
    }
}

double weil_coefficient(int m, int i)
{
    return (m % 2 == 1) ? minus_one_power((m - 1) / 2 + i) : minus_one_power(m / 2 + i);
}

} // namespace

HodgeType HodgeType::checked(int m, std::vector<int> h, IMatrix psi)
{
    if (m < 1) {
        throw Error(ErrorCode::InvalidArgument, "weight must be positive");
    }
    if (h.size() != static_cast<std::size_t>(m + 1)) {
        throw Error(ErrorCode::SizeMismatch, "need m + 1 Hodge numbers");
    }
    int mu = 0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (h[k] < 0) {
            throw Error(ErrorCode::InvalidArgument, "Hodge numbers must be nonnegative");
        }
        if (h[k] != h[h.size() - 1 - k]) {
            throw Error(ErrorCode::InvalidArgument, "Hodge numbers must be palindromic");
        }
        mu += h[k];
    }
    if (mu == 0) {
        throw Error(ErrorCode::InvalidArgument, "total dimension must be positive");
    }
    if (psi.rows() != mu || psi.cols() != mu) {
        throw Error(ErrorCode::SizeMismatch, "Psi must be mu x mu");
    }
    const int sign = minus_one_power(m);
    if (psi.transpose() != sign * psi) {
        throw Error(ErrorCode::InvalidArgument, m % 2 ? "Psi must be skew-symmetric" : "Psi must be symmetric");
    }
    if (std::abs(psi.cast<double>().fullPivLu().determinant()) < 0.5) {
        throw Error(ErrorCode::InvalidArgument, "Psi must be non-degenerate");
    }
    return HodgeType{m, std::move(h), std::move(psi)};
}

int HodgeType::mu() const
{
    int s = 0;
    for (int x : h) {
        s += x;
    }
    return s;
}

int HodgeType::filtration_dim(int i) const
{
    int s = 0;
    for (int p = std::max(i, 0); p <= m; ++p) {
        s += hodge_number(p);
    }
    return s;
}

void validate_filtration(const HodgeFiltration &f, const HodgeType &type)
{
    if (f.level.size() != static_cast<std::size_t>(type.m + 1)) {
        throw Error(ErrorCode::SizeMismatch, "filtration needs levels F^0..F^m");
    }
    CMatrix previous;
    for (int i = type.m; i >= 0; --i) {
        const CMatrix &b = f.level[static_cast<std::size_t>(i)];
        if (b.rows() != type.mu()) {
            throw Error(ErrorCode::SizeMismatch, "filtration vectors must have mu entries");
        }
        const CMatrix q = orthonormal_basis(b);
        if (q.cols() != type.filtration_dim(i)) {
            throw Error(ErrorCode::DegenerateFiltration,
                        "dim F^" + std::to_string(i) + " is " + std::to_string(q.cols()) + ", expected " +
                            std::to_string(type.filtration_dim(i)));
        }
        if (previous.cols() > 0) {
            const CMatrix outside = previous - q * (q.adjoint() * previous);
            if (max_abs(outside) > 1e-8) {
                throw Error(ErrorCode::DegenerateFiltration, "filtration is not decreasing");
            }
        }
        previous = q;
    }
}

HodgeDecomposition decomposition_from_filtration(const HodgeFiltration &f, const HodgeType &type)
{
    validate_filtration(f, type);
    const int mu = type.mu();
    std::vector<CMatrix> q;
    for (const auto &b : f.level) {
        q.push_back(orthonormal_basis(b));
    }
    HodgeDecomposition d;
    for (int p = 0; p <= type.m; ++p) {
        const CMatrix &fp = q[static_cast<std::size_t>(p)];
        const CMatrix fq = q[static_cast<std::size_t>(type.m - p)].conjugate();
        CMatrix piece = subspace_intersection(fp, fq);
        if (piece.cols() != type.hodge_number(p)) {
            throw Error(ErrorCode::DegenerateFiltration,
                        "F^p and conj(F^q) meet in dimension " + std::to_string(piece.cols()) + " for p = " +
                            std::to_string(p) + ", expected " + std::to_string(type.hodge_number(p)));
        }
        d.piece.push_back(piece.cols() ? piece : CMatrix(mu, 0));
    }
    if (numeric_rank(hstack(d.piece, mu), 1e-8) != mu) {
        throw Error(ErrorCode::DegenerateFiltration, "the pieces H^{p,q} do not span the whole space");
    }
    return d;
}

HodgeFiltration filtration_from_decomposition(const HodgeDecomposition &d, const HodgeType &type)
{
    check_pieces(d, type);
    HodgeFiltration f;
    f.level.resize(static_cast<std::size_t>(type.m + 1));
    for (int i = 0; i <= type.m; ++i) {
        std::vector<CMatrix> blocks(d.piece.begin() + i, d.piece.end());
        f.level[static_cast<std::size_t>(i)] = orthonormal_basis(hstack(blocks, type.mu()));
    }
    return f;
}

PolarizationReport verify_polarization(const HodgeDecomposition &d, const HodgeType &type, double tol)
{
    check_pieces(d, type);
    const CMatrix psi = type.psi_complex();
    std::vector<CMatrix> b;
    for (const auto &p : d.piece) {
        b.push_back(orthonormal_basis(p));
    }
    PolarizationReport r;
    std::ostringstream out;
    for (int p = 0; p <= type.m; ++p) {
        for (int p2 = 0; p2 <= type.m; ++p2) {
            if (p2 == type.m - p || b[p].cols() == 0 || b[p2].cols() == 0) {
                continue;
            }
            r.first_defect = std::max(r.first_defect, max_abs(CMatrix(b[p].transpose() * psi * b[p2])));
        }
    }
    r.first = r.first_defect <= tol;
    r.second_min_eigenvalue = std::numeric_limits<double>::infinity();
    for (int p = 0; p <= type.m; ++p) {
        if (b[p].cols() == 0) {
            continue;
        }
        const CMatrix form = i_power(2 * p + type.m) * (b[p].transpose() * psi * b[p].conjugate());
        const CMatrix herm = 0.5 * (form + form.adjoint());
        const double ev = min_eigenvalue(herm);
        if (ev <= tol) {
            out << "second relation fails on H^{" << p << "," << type.m - p << "} (min eigenvalue " << ev << "); ";
        }
        r.second_min_eigenvalue = std::min(r.second_min_eigenvalue, ev);
    }
    r.second = r.second_min_eigenvalue > tol;
    if (!r.first) {
        out << "first relation defect " << r.first_defect << "; ";
    }
    r.details = out.str();
    return r;
}

EllipticHodge elliptic_hs(Complex tau)
{
    if (!is_finite(tau) || tau.imag() == 0.0) {
        throw Error(ErrorCode::RealTau, "tau must not be real");
    }
    IMatrix psi(2, 2);
    psi << 0, 1, -1, 0;
    EllipticHodge e{HodgeType::checked(1, {1, 1}, psi), {}};
    CMatrix f1(2, 1);
    f1 << tau, 1.0;
    e.filtration.level = {CMatrix::Identity(2, 2), f1};
    return e;
}

RealHodgeData real_structure(const HodgeDecomposition &d, const HodgeType &type, double tol)
{
    RealHodgeData data;
    real_pieces(d, type, data.basis, data.j);
    const RMatrix psi = type.psi_real();
    const int m = type.m;
    RiemannReport &r = data.riemann;
    std::ostringstream out;

    auto scale = [](const RMatrix &x) {
        double s = 0.0;
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            s = std::max(s, x.col(c).squaredNorm());
        }
        return std::max(s, 1e-300);
    };

    for (std::size_t i = 0; i < data.basis.size(); ++i) {
        for (std::size_t k = 0; k < data.basis.size(); ++k) {
            if (i == k || data.basis[i].cols() == 0 || data.basis[k].cols() == 0) {
                continue;
            }
            const RMatrix g = data.basis[i].transpose() * psi * data.basis[k];
            r.defect[0] = std::max(r.defect[0], g.cwiseAbs().maxCoeff() / std::sqrt(scale(data.basis[i]) * scale(data.basis[k])));
        }
    }
    double third_min = std::numeric_limits<double>::infinity();
    double fourth_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < data.basis.size(); ++i) {
        const RMatrix &x = data.basis[i];
        if (x.cols() == 0) {
            continue;
        }
        const RMatrix &j = data.j[i];
        const double sc = scale(x);
        const RMatrix g = x.transpose() * psi * x;
        r.defect[1] = std::max(r.defect[1], (j.transpose() * g * j - g).cwiseAbs().maxCoeff() / sc);
        const RMatrix gj = symmetric_part(g * j) / sc;
        const int ii = static_cast<int>(i);
        if (m % 2 == 1) {
            third_min = std::min(third_min, min_eigenvalue(RMatrix(minus_one_power((m - 1) / 2 + ii) * gj)));
        } else {
            if (2 * ii < m) {
                r.defect[3] = std::max(r.defect[3], gj.cwiseAbs().maxCoeff());
            }
            fourth_min = std::min(fourth_min, min_eigenvalue(RMatrix(minus_one_power(m / 2 + ii) * symmetric_part(g) / sc)));
        }
    }
    r.clause[0] = r.defect[0] <= tol;
    r.clause[1] = r.defect[1] <= tol;
    if (m % 2 == 1) {
        r.defect[2] = third_min;
        r.clause[2] = third_min > tol;
        r.clause[3] = true;
    } else {
        r.clause[2] = true;
        r.clause[3] = r.defect[3] <= tol && fourth_min > tol;
        r.defect[3] = std::max(r.defect[3], fourth_min > tol ? 0.0 : -fourth_min);
    }
    for (int c = 0; c < 4; ++c) {
        if (!r.clause[c]) {
            out << "clause " << c + 1 << " fails; ";
        }
    }
    r.details = out.str();
    return data;
}

RMatrix weil_operator(const HodgeDecomposition &d, const HodgeType &type)
{
    std::vector<RMatrix> basis, jmat;
    real_pieces(d, type, basis, jmat);
    const int mu = type.mu();
    RMatrix x(mu, mu);
    RMatrix blocks = RMatrix::Zero(mu, mu);
    Eigen::Index c = 0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const Eigen::Index r = basis[i].cols();
        if (c + r > mu) {
            throw Error(ErrorCode::DegenerateFiltration, "real pieces exceed the dimension");
        }
        x.middleCols(c, r) = basis[i];
        blocks.block(c, c, r, r) = weil_coefficient(type.m, static_cast<int>(i)) * jmat[i];
        c += r;
    }
    if (c != mu) {
        throw Error(ErrorCode::DegenerateFiltration, "real pieces do not fill the space");
    }
    Eigen::FullPivLU<RMatrix> lu(x);
    if (!lu.isInvertible()) {
        throw Error(ErrorCode::DegenerateFiltration, "real pieces are not independent");
    }
    return x * blocks * lu.inverse();
}

double weil_form_min_eigenvalue(const HodgeDecomposition &d, const HodgeType &type)
{
    const RMatrix c = weil_operator(d, type);
    return min_eigenvalue(RMatrix(symmetric_part(type.psi_real() * c)));
}

double stabilizer_norm_bound(const HodgeDecomposition &d, const HodgeType &type)
{
    const RMatrix c = weil_operator(d, type);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(symmetric_part(type.psi_real() * c));
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(es.eigenvalues().size() - 1);
    if (!(lo > 0.0)) {
        throw Error(ErrorCode::DegenerateFiltration, "psi(x, Cx) is not positive definite");
    }
    return std::sqrt(hi / lo);
}

void check_stabilizer(const RMatrix &a, const HodgeDecomposition &d, const HodgeType &type, double tol)
{
    check_pieces(d, type);
    const RMatrix psi = type.psi_real();
    if (a.rows() != psi.rows() || a.cols() != psi.cols()) {
        throw Error(ErrorCode::SizeMismatch, "A must be mu x mu");
    }
    if ((a.transpose() * psi * a - psi).cwiseAbs().maxCoeff() > tol * std::max(1.0, psi.cwiseAbs().maxCoeff())) {
        throw Error(ErrorCode::StabilizerMismatch, "A does not preserve psi");
    }
    const CMatrix ac = a.cast<Complex>();
    for (const auto &piece : d.piece) {
        if (piece.cols() == 0) {
            continue;
        }
        const CMatrix q = orthonormal_basis(piece);
        const CMatrix img = ac * q;
        if (max_abs(CMatrix(img - q * (q.adjoint() * img))) > tol * std::max(1.0, max_abs(ac))) {
            throw Error(ErrorCode::StabilizerMismatch, "A does not preserve the Hodge decomposition");
        }
    }
}

bool in_integral_group(const IMatrix &a, const HodgeType &type)
{
    if (a.rows() != type.psi.rows() || a.cols() != type.psi.cols()) {
        return false;
    }
    const LMatrix al = a.cast<std::int64_t>();
    const LMatrix pl = type.psi.cast<std::int64_t>();
    return LMatrix(al * pl * al.transpose()) == pl && LMatrix(al.transpose() * pl * al) == pl;
}

HodgeFiltration group_element_action(const IMatrix &a, const HodgeFiltration &f, const HodgeType &type)
{
    if (a.rows() != type.mu() || a.cols() != type.mu()) {
        throw Error(ErrorCode::SizeMismatch, "A must be mu x mu");
    }
    if (!in_integral_group(a, type)) {
        throw Error(ErrorCode::NotInGroup, "A does not preserve Psi");
    }
    validate_filtration(f, type);
    const CMatrix ac = a.cast<double>().cast<Complex>();
    HodgeFiltration out;
    for (const auto &b : f.level) {
        out.level.push_back(ac * b);
    }
    return out;
}

JacobianLattice jacobian_lattice(const HodgeType &type, const HodgeFiltration &f, double rel_rank_tol)
{
    if (type.m % 2 == 0) {
        throw Error(ErrorCode::InvalidArgument, "Jacobian lattices need odd weight");
    }
    if (f.level.size() != static_cast<std::size_t>(type.m + 1)) {
        throw Error(ErrorCode::SizeMismatch, "filtration needs levels F^0..F^m");
    }
    const int k = (type.m + 1) / 2;
    const int mu = type.mu();
    const CMatrix u = orthonormal_basis(f.level[static_cast<std::size_t>(k)]);
    const Eigen::Index dim = u.cols();
    if (2 * dim != mu) {
        throw Error(ErrorCode::RankDeficient, "dim F^k must be half the total dimension");
    }
    CMatrix w(mu, mu);
    w << u, u.conjugate();
    Eigen::JacobiSVD<CMatrix> svd(w);
    const auto &s = svd.singularValues();
    if (!(s(s.size() - 1) > rel_rank_tol * s(0))) {
        throw Error(ErrorCode::RankDeficient, "F^k meets its conjugate");
    }
    const CMatrix coords = w.fullPivLu().inverse();
    JacobianLattice lat{u, coords.topRows(dim)};
    RMatrix real(2 * dim, mu);
    real << lat.generators.real(), lat.generators.imag();
    Eigen::JacobiSVD<RMatrix> rsvd(real);
    const auto &rs = rsvd.singularValues();
    if (!(rs(rs.size() - 1) > rel_rank_tol * rs(0))) {
        throw Error(ErrorCode::RankDeficient, "projected lattice has real rank below 2 dim F^k");
    }
    return lat;
}

} // namespace periodlab
