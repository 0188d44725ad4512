#include "hbs/rational.hpp"

#include "hbs/error.hpp"

namespace hbs
{

Rational parse_rational(const std::string& text)
{
    if (text.empty())
        fail(Errc::ParseError, "empty rational literal");
    const auto slash = text.find('/');
    if (slash != std::string::npos && text.find('/', slash + 1) != std::string::npos)
        fail(Errc::ParseError, "malformed rational literal '" + text + "'");
    try
    {
        Rational value(text);
        if (denominator(value) == 0)
            fail(Errc::ParseError, "zero denominator in '" + text + "'");
        // The GMP string constructor does not reduce to lowest terms.
        mpq_canonicalize(value.backend().data());
        return value;
    }
    catch (const Error&)
    {
        throw;
    }
    catch (const std::exception&)
    {
        fail(Errc::ParseError, "malformed rational literal '" + text + "'");
    }
}

std::string to_string(const Rational& value)
{
    return value.str();
}

double to_double(const Rational& value)
{
    return value.convert_to<double>();
}

const char* errc_name(Errc code)
{
    switch (code)
    {
        case Errc::NotSorted: return "NotSorted";
        case Errc::BadRange: return "BadRange";
        case Errc::NotOpen: return "NotOpen";
        case Errc::ExcessMultiplicity: return "ExcessMultiplicity";
        case Errc::IndexOutOfRange: return "IndexOutOfRange";
        case Errc::OutOfDomain: return "OutOfDomain";
        case Errc::DegreeMismatch: return "DegreeMismatch";
        case Errc::NotNested: return "NotNested";
        case Errc::BadDegree: return "BadDegree";
        case Errc::NotContained: return "NotContained";
        case Errc::NotRefined: return "NotRefined";
        case Errc::ClosureViolated: return "ClosureViolated";
        case Errc::BackendCapExceeded: return "BackendCapExceeded";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::UnsupportedDimension: return "UnsupportedDimension";
        case Errc::IoError: return "IoError";
        case Errc::ParseError: return "ParseError";
        case Errc::ValidationError: return "ValidationError";
        case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

} // namespace hbs
