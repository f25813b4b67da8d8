#ifndef NARROWGAP_EXPRESSION_HPP
#define NARROWGAP_EXPRESSION_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "narrowgap/polynomial.hpp"

namespace narrowgap {

/// Syntax or semantic error in a polynomial expression, with the 0-based
/// character offset where parsing stopped.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t position, const std::string& what);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Parse a polynomial over x1..x{n_vars}.
///
///   expr   := ['+'|'-'] term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := atom ('^' int)*
///   atom   := number | var | '(' expr ')' | ('+'|'-') atom
///
/// Whitespace is ignored. Numbers are decimal literals (optional fraction
/// and exponent part). Exponents must be non-negative integers.
Polynomial parse_expression(std::string_view text, int n_vars);

} // namespace narrowgap

#endif
