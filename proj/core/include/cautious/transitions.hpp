#pragma once

// States, actions and transition rules of the abstract solver graphs for
// cautious reasoning and backbone computation.

#include "cautious/logic.hpp"
#include "cautious/oracle.hpp"

#include <optional>
#include <set>
#include <string_view>
#include <variant>
#include <vector>

namespace cautious
{

// Actions. ChunkStart is the bare `chunk` of the chunking graph's initial
// state: no constraint is added.
struct OverAction
{
    bool operator==( const OverAction& ) const = default;
};
struct UnderEmptyAction
{
    bool operator==( const UnderEmptyAction& ) const = default;
};
struct UnderAction
{
    Atom atom;
    bool operator==( const UnderAction& ) const = default;
};
struct ChunkStartAction
{
    bool operator==( const ChunkStartAction& ) const = default;
};
struct ChunkAction
{
    AtomSet n;
    bool operator==( const ChunkAction& ) const = default;
};
struct CoreAction
{
    LiteralSet n;
    bool operator==( const CoreAction& ) const = default;
};

using Action = std::variant< OverAction, UnderEmptyAction, UnderAction, ChunkStartAction, ChunkAction, CoreAction >;

/// Result of an oracle call as stored in a core state: a model in atom order,
/// or an inconsistent literal sequence.
using Record = std::vector< Literal >;

struct CoreState
{
    Record record;
    AtomSet over;
    AtomSet under;
    Action action;
    bool operator==( const CoreState& ) const = default;
};

struct ControlState
{
    AtomSet over;
    AtomSet under;
    Action action;
    bool operator==( const ControlState& ) const = default;
};

struct PreState
{
    LiteralSet n;
    AtomSet over;
    AtomSet under;
    bool operator==( const PreState& ) const = default;
};

struct EvalState
{
    AtomSet over;
    AtomSet under;
    bool operator==( const EvalState& ) const = default;
};

struct TerminalOk
{
    AtomSet witness;
    bool operator==( const TerminalOk& ) const = default;
};

struct TerminalCont
{
    AtomSet over;
    AtomSet under;
    bool operator==( const TerminalCont& ) const = default;
};

using State = std::variant< CoreState, ControlState, PreState, EvalState, TerminalOk, TerminalCont >;

enum class RuleId
{
    Oracle,
    CoreOracle,
    FailOver,
    FailUnder,
    FailChunk,
    Find,
    Terminal,
    OverApprox,
    UnderApprox,
    Chunk,
    Fail1Pre,
    Fail2Pre,
    FindPre,
    Main,
    Continue,
    NewSet,
    Final,
};

inline constexpr std::size_t rule_count = 17;

[[nodiscard]] std::string_view rule_name( RuleId rule );
[[nodiscard]] std::optional< RuleId > rule_from_name( std::string_view name );

enum class Technique
{
    ov,
    un,
    ch,
};

struct GraphFamily
{
    enum class Kind
    {
        ov,
        un,
        ch,
        mixed,
        fs,
        fs_then_ch,
    };

    Kind kind = Kind::ov;
    /// Only read for mixed; must be nonempty there.
    std::set< Technique > techniques;

    static GraphFamily ov() { return { Kind::ov, {} }; }
    static GraphFamily un() { return { Kind::un, {} }; }
    static GraphFamily ch() { return { Kind::ch, {} }; }
    static GraphFamily mixed( std::set< Technique > s ) { return { Kind::mixed, std::move( s ) }; }
    static GraphFamily fs() { return { Kind::fs, {} }; }
    static GraphFamily fs_then_ch() { return { Kind::fs_then_ch, {} }; }

    bool operator==( const GraphFamily& ) const = default;
};

/// The rule set of the graph (always including Oracle or CoreOracle).
[[nodiscard]] std::set< RuleId > rules_of( const GraphFamily& family );

/// Initial action of a technique's graph: over, under_empty or bare chunk.
[[nodiscard]] Action initial_action( Technique technique );

/// Starting state of the family over the given atoms. For mixed graphs the
/// technique selects which of the possible initial states is used.
[[nodiscard]] State initial_state( const GraphFamily& family, const AtomSet& atoms,
                                   std::optional< Technique > mixed_start = std::nullopt );

/// Input consumed by a rule beyond the state itself: the oracle's record
/// for Oracle/CoreOracle, the tested atom for UnderApprox, the chunk for
/// Chunk; nothing for every other rule.
using RuleInput = std::variant< std::monostate, Record, Atom, AtomSet >;

/// Side condition of the rule.
[[nodiscard]] bool applicable( RuleId rule, const State& state, const RuleInput& input = {} );

/// Target state of the rule. Throws LogicError if the rule is not applicable.
[[nodiscard]] State apply( RuleId rule, const State& state, const RuleInput& input = {} );

/// The input that turns `before` into `after` under `rule`, if any.
[[nodiscard]] RuleInput input_for( RuleId rule, const State& after );

/// The base theory with the action's constraint added, plus the literals
/// that are passed to the oracle as assumptions (core actions only).
struct ConstrainedTheory
{
    Theory theory;
    std::vector< Literal > assumptions;
};

[[nodiscard]] ConstrainedTheory constrained_theory( const Theory& base, const AtomSet& over,
                                                    const AtomSet& under, const Action& action );

/// `theory` with every assumption l turned into the constraint that
/// forbids its complement. Models of the result are exactly the models of
/// `theory` that satisfy all assumptions.
[[nodiscard]] Theory with_assumptions( const Theory& theory, std::span< const Literal > assumptions );

/// The oracle query that realizes constrained_theory for the action.
[[nodiscard]] OracleQuery oracle_query( const AtomSet& over, const AtomSet& under, const Action& action );

// Record helpers.
[[nodiscard]] bool is_consistent_record( const Record& record );
/// L+ : atoms occurring positively.
[[nodiscard]] AtomSet positive_part( const Record& record );
/// L-hat = { not a | a and not a both in L }.
[[nodiscard]] LiteralSet record_hat( const Record& record );
/// Inconsistent record whose hat is exactly `core`: for each l, l-bar then l.
[[nodiscard]] Record record_of_core( std::span< const Literal > core );

// Accessors shared by several state kinds.
[[nodiscard]] const AtomSet* over_of( const State& state );
[[nodiscard]] const AtomSet* under_of( const State& state );
[[nodiscard]] bool is_terminal( const State& state );

} // namespace cautious
