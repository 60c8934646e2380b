#pragma once

#include "cautious/logic.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace cautious
{

struct ParseDiagnostic
{
    std::size_t line = 1;   // 1-based
    std::size_t column = 1; // 1-based
    std::string message;

    [[nodiscard]] std::string to_string() const;
};

class ParseError : public std::runtime_error
{
    ParseDiagnostic _diagnostic;

public:
    explicit ParseError( ParseDiagnostic d );
    [[nodiscard]] const ParseDiagnostic& diagnostic() const { return _diagnostic; }
};

/// DIMACS CNF. Variable k is interned as "vk"; every declared variable enters
/// the vocabulary, used or not.
[[nodiscard]] CnfFormula parse_dimacs( std::string_view text );

/// Ground normal programs written as
///
///     rule := [atom] [":-" lit ("," lit)*] "."
///     lit  := atom | "not" atom
///     atom := [a-z][A-Za-z0-9_]*
///
/// `%` starts a comment running to the end of the line. Atoms are interned
/// in order of first occurrence.
[[nodiscard]] Program parse_program( std::string_view text );

/// Canonical text: one rule per line, positive body atoms before negated
/// ones, each group by atom id.
[[nodiscard]] std::string render( const Program& program );
[[nodiscard]] std::string render( const CnfFormula& formula );

} // namespace cautious
