#ifndef PERIODLAB_GROUP_POINCARE_HPP
#define PERIODLAB_GROUP_POINCARE_HPP

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include <periodlab/core_numerics.hpp>

namespace periodlab
{

/// A Psi A^T = Psi, exact. SizeMismatch for non-square or mismatched input.
bool is_in_gamma(const Eigen::MatrixXi &a, const Eigen::MatrixXi &psi);

/// All integer 2x2 matrices of determinant 1 with entries bounded by max_entry,
/// in lexicographic order.
std::vector<Eigen::Matrix2i> sl2_elements(int max_entry);

/// Which subgroup of SL(2, Z) the cosets are taken modulo.
enum class CosetModel {
    /// the whole group: one coset
    Whole,
    /// matrices with first row +-(1, 0); cosets <-> first rows up to sign
    FirstRow,
    /// matrices with bottom row +-(0, 1) (upper triangular up to sign);
    /// cosets <-> bottom rows up to sign
    BottomRow,
};

std::string_view coset_model_name(CosetModel m) noexcept;

bool in_stabilizer(CosetModel model, const Eigen::Matrix2i &a);

struct CosetFamily {
    CosetModel model = CosetModel::Whole;
    int height = 0;
    /// sorted by height, then lexicographically in the varying row
    std::vector<Eigen::Matrix2i> representatives;
    std::vector<int> heights;
};

/// Coprime pairs (x, y) with max(|x|, |y|) <= H modulo sign, each completed to
/// an SL(2, Z) matrix by the extended Euclidean algorithm.
CosetFamily enumerate_cosets_sl2(CosetModel model, int height);

/// (a z + b) / (c z + d)
Complex mobius(const Eigen::Matrix2i &a, Complex z);

using AutomorphyFactor = std::function<Complex(Complex x, const Eigen::Matrix2i &a)>;

enum class ActionSide {
    /// x -> A.x Mobius (left action): j(x, AB) = j(B.x, A) j(x, B)
    Left,
    /// x.A = A^T.x (right action): j(x, AB) = j(x, A) j(x.A, B)
    Right,
};

struct CocycleReport {
    std::size_t samples = 0;
    double max_relative_error = 0.0;
    bool holds = false;
};

/// Checks the cocycle law of the given side on random x in the upper half plane
/// and random A, B in SL(2, Z) with entries bounded by 3.
CocycleReport cocycle_check(const AutomorphyFactor &j, ActionSide side, std::size_t samples, std::uint64_t seed = 1,
                            double tol = 1e-12);

/// c z + d: a cocycle for the left Mobius action.
Complex factor_cz_plus_d(Complex z, const Eigen::Matrix2i &a);
/// b z + d: a cocycle for the right action x.A = A^T.x.
Complex factor_bz_plus_d(Complex z, const Eigen::Matrix2i &a);

using HalfPlaneFunction = std::function<Complex(Complex)>;

/// (f|_n A)(x) = j(x, A)^(-n) f(A.x), so that f|_n(AB) = (f|_n A)|_n B for a
/// left-side cocycle j.
HalfPlaneFunction slash(const HalfPlaneFunction &f, int n, const Eigen::Matrix2i &a,
                        const AutomorphyFactor &j = factor_cz_plus_d);

struct PartialSumsReport {
    std::vector<int> heights;
    std::vector<Complex> partial_sums;
    std::vector<std::size_t> terms;
    double tail_estimate = 0.0;
    double tolerance = 0.0;
    bool converged = false;
};

/// Heights 1, 2, 4, ... below H, then H.
std::vector<int> report_heights(int height);

/// sum over Gamma_infinity \ SL(2, Z) of (f|_n A)(tau) with j = cz + d,
/// truncated at height H and reported at report_heights(H). The tail estimate
/// is |S(H) - S(H')| for the last two reported heights.
PartialSumsReport poincare_series_uhp(const HalfPlaneFunction &f, int n, Complex tau, int height,
                                      double tol = 1e-4);

using MatrixFunctional = std::function<Complex(const Eigen::Matrix2cd &)>;

/// Throws StabilizerMismatch unless P(B X) = P(X) for sampled B in the
/// stabilizer of the model.
void validate_stabilizer(const MatrixFunctional &p, const Eigen::Matrix2cd &x, CosetModel model,
                         double rel_tol = 1e-9);

/// sum over Gamma_P \ Gamma_Z of P(A pm), truncated at height H.
PartialSumsReport period_poincare(const MatrixFunctional &p, const Eigen::Matrix2cd &pm, CosetModel model,
                                  int height, double tol = 1e-4);

struct MeanValueReport {
    double lhs = 0.0; // |f(a)|^2
    double rhs = 0.0; // area average of |f|^2 on the disk
};

/// Midpoint rule on a polar grid with `grid` radial and 4 grid angular cells.
MeanValueReport mean_value_diagnostic(const HalfPlaneFunction &f, Complex center, double radius, int grid = 64);

} // namespace periodlab

#endif
