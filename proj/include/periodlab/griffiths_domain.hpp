#ifndef PERIODLAB_GRIFFITHS_DOMAIN_HPP
#define PERIODLAB_GRIFFITHS_DOMAIN_HPP

#include <cstdint>
#include <string_view>
#include <vector>

#include <periodlab/hodge_structures.hpp>

namespace periodlab
{

enum class HermitianCase { Case1, Case2, No };

std::string_view hermitian_case_name(HermitianCase c) noexcept;

/// h = (h^{m,0}, ..., h^{0,m}). Case1: m = 2a+1 and only h^{a+1,a}, h^{a,a+1}
/// are nonzero. Case2: m = 2a, h^{a+1,a-1} <= 1 and only p in {a-1, a, a+1}
/// occur. No otherwise.
HermitianCase classify_hermitian(int m, const std::vector<int> &h);

/// dim F^i g_C for i = 0, -1, ..., -m at the given point, where
/// g = {N : <Nx, y> + <x, Ny> = 0} and F^i g = {N : N F^p in F^{p+i}}.
std::vector<int> lie_filtration_dims(const HodgeFiltration &point, const HodgeType &type);

/// mu (mu + 1) / 2 for skew Psi, mu (mu - 1) / 2 for symmetric Psi.
int lie_algebra_dim(const HodgeType &type);

struct DomainReport {
    int dim_compact_dual = 0;
    int dim_D = 0;
    int dim_lie = 0;
    int dim_F0_lie = 0;
    int dim_horizontal = 0;
    HermitianCase hermitian_case = HermitianCase::No;
    std::vector<int> lie_dims;
};

DomainReport domain_dims(const HodgeType &type, const HodgeFiltration &point);

/// A polarized point of the given type:
///  weight 1 with standard symplectic Psi: F^1 spanned by the columns of [i Id; Id];
///  weight 2 with diagonal Psi = +-1 having 2 h^{2,0} entries -1 and h^{1,1}
///  entries +1: H^{2,0} spanned by e_a + i e_b over pairs (a, b) of -1 entries;
///  weight 3, h = (1,1,1,1), Psi = [[0, Id], [-Id, 0]]: H^{3,0} = span(-i e1 + e3),
///  H^{2,1} = span(i e2 + e4).
/// UnsupportedType otherwise.
HodgeFiltration base_point(const HodgeType &type);

/// Standard symplectic [[0, Id_g], [-Id_g, 0]].
IMatrix standard_symplectic(int g);

/// binomial(n + 1 + d, d) - (n + 2)^2.
std::int64_t kodaira_spencer_count(int n, int d);

} // namespace periodlab

#endif
