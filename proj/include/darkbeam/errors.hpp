#pragma once

#include <stdexcept>
#include <string>

namespace darkbeam {

enum class ErrorKind {
    NonPositiveVelocity,
    NonTransportingChannel,
    DegenerateProfile,
    OutOfRecord,
    WindowTooShort,
    CFLViolation,
    NumericalBlowup,
    NonConvergent,
    UnphysicalCovariance,
    SchemaError,
    InvariantError,
};

const char* to_string(ErrorKind kind);

/**
 * Base error for all physics and configuration failures. The kind lets
 * callers (mainly the scenario runner) map failures onto exit codes
 * without string matching.
 */
class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        m_kind(kind)
    {}

    ErrorKind kind() const { return m_kind; }

    bool is_config_error() const
    {
        return m_kind == ErrorKind::SchemaError ||
               m_kind == ErrorKind::InvariantError;
    }

private:
    ErrorKind m_kind;
};

/// Schema violation located by a JSON pointer into the config document.
class SchemaError : public Error
{
public:
    SchemaError(std::string pointer, const std::string& what)
      : Error(ErrorKind::SchemaError, pointer + ": " + what),
        m_pointer(std::move(pointer))
    {}

    const std::string& pointer() const { return m_pointer; }

private:
    std::string m_pointer;
};

inline const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::NonPositiveVelocity: return "NonPositiveVelocity";
    case ErrorKind::NonTransportingChannel: return "NonTransportingChannel";
    case ErrorKind::DegenerateProfile: return "DegenerateProfile";
    case ErrorKind::OutOfRecord: return "OutOfRecord";
    case ErrorKind::WindowTooShort: return "WindowTooShort";
    case ErrorKind::CFLViolation: return "CFLViolation";
    case ErrorKind::NumericalBlowup: return "NumericalBlowup";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::UnphysicalCovariance: return "UnphysicalCovariance";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::InvariantError: return "InvariantError";
    }
    return "Unknown";
}

} // namespace darkbeam
