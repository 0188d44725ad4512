#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>

namespace hbs
{

/// Exact rational scalar. Stored canonically (lowest terms, positive
/// denominator); all knot values and structural matrices use this type.
/// Expression templates are disabled so the type behaves like a plain value.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

/// Parses "a/b" or "a". Throws Error{ParseError} on malformed input or b = 0.
Rational parse_rational(const std::string& text);

/// Formats as "a/b", or "a" when the denominator is 1.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

} // namespace hbs
