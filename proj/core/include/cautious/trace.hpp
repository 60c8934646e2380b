#pragma once

// Traces of executed solver-graph paths: recording, JSON-lines
// serialization, and structural/semantic validation.

#include "cautious/logic.hpp"
#include "cautious/transitions.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cautious
{

/// Solver work spent inside one oracle call.
struct OracleStats
{
    std::uint64_t conflicts = 0;
    std::uint64_t decisions = 0;

    bool operator==( const OracleStats& ) const = default;
};

struct TraceEvent
{
    std::size_t step = 0;
    RuleId rule = RuleId::Oracle;
    State before;
    State after;
    /// Present on Oracle/CoreOracle edges.
    std::optional< OracleStats > stats;

    bool operator==( const TraceEvent& ) const = default;
};

using Trace = std::vector< TraceEvent >;

struct Violation
{
    std::size_t step = 0;
    std::string check;
    std::string detail;
};

struct ValidationReport
{
    bool ok = true;
    std::vector< Violation > violations;

    void add( std::size_t step, std::string check, std::string detail );
    [[nodiscard]] std::string to_string() const;
};

/// Each edge is a legal application of a rule of the graph (and of
/// `family`'s rule set when given), the path starts at an initial state,
/// ends at a terminal one, never repeats a state, keeps U within O, and
/// every return edge makes progress: the gap O \ U shrinks, except after
/// the unconstrained initial calls (under_empty, bare chunk); Fail2Pre
/// shrinks N instead. An empty trace is valid only for an empty
/// vocabulary.
[[nodiscard]] ValidationReport validate_structure( const Trace& trace, const Theory& base,
                                                   std::optional< GraphFamily > family = std::nullopt );

/// Checks the trace against brute force: with T the consequences of
/// `base`, U within T within O at every state; Ok(W) has W = T; FailOver
/// fires only when T = O; every oracle record is a model of the
/// constrained theory when consistent, and the constrained theory has no
/// model when it is not (for core actions: restricted to the hat of the
/// record). Throws BoundExceeded above `bound` atoms.
[[nodiscard]] ValidationReport validate_semantics( const Trace& trace, const Theory& base, Semantics semantics,
                                                   std::size_t bound = default_brute_force_bound );

/// Same, with the models of `base` (as from enumerate_models) supplied by
/// the caller, for checking many traces of one instance.
[[nodiscard]] ValidationReport validate_semantics( const Trace& trace, const Theory& base, Semantics semantics,
                                                   std::span< const Assignment > models );

struct TraceFormatError : std::runtime_error
{
    std::size_t line;
    TraceFormatError( std::size_t line, const std::string& message );
};

/// One JSON object per line with fields step, rule, before, after and, on
/// oracle edges, stats. Atom sets are name-sorted lists of names; records
/// keep their order; a negative literal is written "-name".
[[nodiscard]] std::string serialize( const Trace& trace, const SymbolTable& vocabulary );
[[nodiscard]] std::string serialize_state( const State& state, const SymbolTable& vocabulary );

/// Inverse of serialize. Throws TraceFormatError with a 1-based line.
[[nodiscard]] Trace deserialize( std::string_view text, const SymbolTable& vocabulary );

} // namespace cautious
