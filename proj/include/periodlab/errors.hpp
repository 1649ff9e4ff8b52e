#ifndef PERIODLAB_ERRORS_HPP
#define PERIODLAB_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace periodlab
{

enum class ErrorCode {
    // validation
    InvalidArgument,
    SizeMismatch,
    ZeroLambda,
    ZeroT0,
    RealTau,
    NotInGroup,
    UnsupportedType,
    StabilizerMismatch,
    // numerical
    StepUnderflow,
    NonFiniteRHS,
    NonConvergent,
    NearDiscriminant,
    QuadratureFailure,
    NonIntegralMonodromy,
    NearCusp,
    DegenerateFiltration,
    RankDeficient,
};

std::string_view error_name(ErrorCode code) noexcept;

/// True for failures of a numerical procedure on otherwise valid input.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string &what);

    ErrorCode code() const noexcept
    {
        return m_code;
    }

private:
    ErrorCode m_code;
};

} // namespace periodlab

#endif
