#pragma once

#include <stdexcept>
#include <string>

namespace hbs
{

enum class Errc
{
    NotSorted,
    BadRange,
    NotOpen,
    ExcessMultiplicity,
    IndexOutOfRange,
    OutOfDomain,
    DegreeMismatch,
    NotNested,
    BadDegree,
    NotContained,
    NotRefined,
    ClosureViolated,
    BackendCapExceeded,
    DimensionMismatch,
    ShapeMismatch,
    UnsupportedDimension,
    IoError,
    ParseError,
    ValidationError,
    ConfigError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error
{
    public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code)
    {}

    Errc code() const { return code_; }

    private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace hbs
