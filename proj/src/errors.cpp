#include <periodlab/errors.hpp>

namespace periodlab
{

std::string_view error_name(ErrorCode code) noexcept
{
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::SizeMismatch: return "SizeMismatch";
        case ErrorCode::ZeroLambda: return "ZeroLambda";
        case ErrorCode::ZeroT0: return "ZeroT0";
        case ErrorCode::RealTau: return "RealTau";
        case ErrorCode::NotInGroup: return "NotInGroup";
        case ErrorCode::UnsupportedType: return "UnsupportedType";
        case ErrorCode::StabilizerMismatch: return "StabilizerMismatch";
        case ErrorCode::StepUnderflow: return "StepUnderflow";
        case ErrorCode::NonFiniteRHS: return "NonFiniteRHS";
        case ErrorCode::NonConvergent: return "NonConvergent";
        case ErrorCode::NearDiscriminant: return "NearDiscriminant";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::NonIntegralMonodromy: return "NonIntegralMonodromy";
        case ErrorCode::NearCusp: return "NearCusp";
        case ErrorCode::DegenerateFiltration: return "DegenerateFiltration";
        case ErrorCode::RankDeficient: return "RankDeficient";
    }
    return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept
{
    switch (code) {
        case ErrorCode::StepUnderflow:
        case ErrorCode::NonFiniteRHS:
        case ErrorCode::NonConvergent:
        case ErrorCode::NearDiscriminant:
        case ErrorCode::QuadratureFailure:
        case ErrorCode::NonIntegralMonodromy:
        case ErrorCode::NearCusp:
        case ErrorCode::DegenerateFiltration:
        case ErrorCode::RankDeficient:
            return true;
        default:
            return false;
    }
}

Error::Error(ErrorCode code, const std::string &what)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), m_code(code)
{
}

} // namespace periodlab
