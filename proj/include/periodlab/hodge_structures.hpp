#ifndef PERIODLAB_HODGE_STRUCTURES_HPP
#define PERIODLAB_HODGE_STRUCTURES_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include <periodlab/core_numerics.hpp>

namespace periodlab
{

using RMatrix = Eigen::MatrixXd;
using IMatrix = Eigen::MatrixXi;

/// Orthonormal basis (columns) of the column space of m; singular values
/// below rel_rank_tol * largest are dropped.
CMatrix orthonormal_basis(const CMatrix &m, double rel_rank_tol = 1e-8);

/// Orthonormal basis of the intersection of the column spans of u and v
/// (both assumed orthonormal).
CMatrix subspace_intersection(const CMatrix &u, const CMatrix &v, double rel_rank_tol = 1e-8);

/// Spectral-norm distance between the orthogonal projectors onto span(u)
/// and span(v) (both orthonormal). Different dimensions give 1.
double subspace_distance(const CMatrix &u, const CMatrix &v);

/// Type (m, h, Psi) of a polarized Hodge structure on Z^mu.
struct HodgeType {
    int m = 0;
    /// (h^{m,0}, h^{m-1,1}, ..., h^{0,m})
    std::vector<int> h;
    /// psi(x, y) = x^T Psi y
    IMatrix psi;

    /// Validates Psi^T = (-1)^m Psi, det Psi != 0, palindromic h, sizes.
    static HodgeType checked(int m, std::vector<int> h, IMatrix psi);

    int mu() const;
    /// h^{p, m-p}
    int hodge_number(int p) const
    {
        return h[static_cast<std::size_t>(m - p)];
    }
    /// dim F^i = h^{m,0} + ... + h^{i,m-i}
    int filtration_dim(int i) const;
    RMatrix psi_real() const
    {
        return psi.cast<double>();
    }
    CMatrix psi_complex() const
    {
        return psi.cast<double>().cast<Complex>();
    }
};

/// level[i] is a basis (columns) of F^i, i = 0..m.
struct HodgeFiltration {
    std::vector<CMatrix> level;
};

/// piece[p] is a basis of H^{p, m-p}, p = 0..m.
struct HodgeDecomposition {
    std::vector<CMatrix> piece;
};

/// Throws SizeMismatch or DegenerateFiltration unless the filtration is
/// decreasing, F^0 is everything and the dimensions match the type.
void validate_filtration(const HodgeFiltration &f, const HodgeType &type);

/// H^{p,q} = F^p intersected with conj(F^q).
HodgeDecomposition decomposition_from_filtration(const HodgeFiltration &f, const HodgeType &type);

/// F^i = H^{m,0} + ... + H^{i,m-i}.
HodgeFiltration filtration_from_decomposition(const HodgeDecomposition &d, const HodgeType &type);

struct PolarizationReport {
    bool first = false;
    bool second = false;
    /// largest |psi(H^{p,q}, H^{p',q'})| over pairs that must vanish
    double first_defect = 0.0;
    /// smallest eigenvalue over the Hermitian forms of the second relation
    double second_min_eigenvalue = 0.0;
    std::string details;

    bool passed() const
    {
        return first && second;
    }
};

/// First relation: psi(H^{p,q}, H^{p',q'}) = 0 unless p' = q.
/// Second relation: sqrt(-1)^{2p+m} psi(a, conj a) > 0 for 0 != a in H^{p,q}
/// (for even m this is (-1)^{p+m/2}; for m = 1, p = 1 it is -sqrt(-1)).
PolarizationReport verify_polarization(const HodgeDecomposition &d, const HodgeType &type, double tol = default_tol);

/// Type (1, (1,1), [[0,1],[-1,0]]) and F^1 = span(tau e1 + e2). RealTau if
/// Im tau = 0; tau in the lower half plane is allowed (it fails the second
/// relation).
struct EllipticHodge {
    HodgeType type;
    HodgeFiltration filtration;
};
EllipticHodge elliptic_hs(Complex tau);

struct RiemannReport {
    /// clause[0..3] correspond to the four Riemann relations on real pieces;
    /// clauses that do not apply to the weight are reported as true.
    bool clause[4] = {false, false, false, false};
    double defect[4] = {0.0, 0.0, 0.0, 0.0};
    std::string details;

    bool passed() const
    {
        return clause[0] && clause[1] && clause[2] && clause[3];
    }
};

/// basis[i] spans the real space H^i (from H^{m-i,i} + H^{i,m-i}, i <= m/2)
/// and j[i] is J_i in that basis.
struct RealHodgeData {
    std::vector<RMatrix> basis;
    std::vector<RMatrix> j;
    RiemannReport riemann;
};

RealHodgeData real_structure(const HodgeDecomposition &d, const HodgeType &type, double tol = default_tol);

/// C acting by (-1)^{(m-1)/2+i} J_i (m odd) or (-1)^{m/2+i} (m even) on H^i.
RMatrix weil_operator(const HodgeDecomposition &d, const HodgeType &type);

/// Smallest eigenvalue of the symmetric form psi(x, C y).
double weil_form_min_eigenvalue(const HodgeDecomposition &d, const HodgeType &type);

/// Bound sqrt(lambda_max / lambda_min) of psi(x, Cx) on the operator norm of
/// any real A preserving psi and the decomposition.
double stabilizer_norm_bound(const HodgeDecomposition &d, const HodgeType &type);

/// Throws StabilizerMismatch when a does not preserve psi and every H^{p,q}.
void check_stabilizer(const RMatrix &a, const HodgeDecomposition &d, const HodgeType &type, double tol = 1e-9);

/// True when A Psi A^T = Psi and A^T Psi A = Psi (exact integer arithmetic).
bool in_integral_group(const IMatrix &a, const HodgeType &type);

/// x -> A x on every F^i. NotInGroup unless in_integral_group(A).
HodgeFiltration group_element_action(const IMatrix &a, const HodgeFiltration &f, const HodgeType &type);

/// m odd, k = (m+1)/2: images of the standard basis of Z^mu under the
/// projection onto F^k along conj(F^k), as coordinates in an orthonormal
/// basis of F^k (columns). RankDeficient when they do not span a lattice of
/// real rank 2 dim F^k.
struct JacobianLattice {
    CMatrix frame;      // orthonormal basis of F^k
    CMatrix generators; // dim F^k x mu
};
JacobianLattice jacobian_lattice(const HodgeType &type, const HodgeFiltration &f, double rel_rank_tol = 1e-8);

} // namespace periodlab

#endif
