#ifndef HPZ_ERROR_HPP_
#define HPZ_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace hpz
{

/// Failure categories. Each one maps to a distinct CLI exit code.
enum class ErrorCode
{
    DimensionMismatch = 10,
    NonIntegerExponent = 11,
    NegativeExponent = 12,
    LengthMismatch = 13,
    BudgetExceeded = 20,
    AllModesEmpty = 21,
    NoModeContains = 22,
    GeneratorCapExceeded = 23,
    EmptyCloud = 24,
    ParseError = 30,
    SchemaError = 31,
    IoError = 32,
    ContainmentFailed = 40,
};

inline const char* to_string(ErrorCode code)
{
    switch (code)
    {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonIntegerExponent: return "NonIntegerExponent";
        case ErrorCode::NegativeExponent: return "NegativeExponent";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::AllModesEmpty: return "AllModesEmpty";
        case ErrorCode::NoModeContains: return "NoModeContains";
        case ErrorCode::GeneratorCapExceeded: return "GeneratorCapExceeded";
        case ErrorCode::EmptyCloud: return "EmptyCloud";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ContainmentFailed: return "ContainmentFailed";
    }
    return "Unknown";
}

class Error : public std::runtime_error
{
    public:
        Error(ErrorCode code, const std::string& what)
            : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
        {
        }

        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
};

} // namespace hpz

#endif
