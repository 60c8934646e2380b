#pragma once

// Ground propositional vocabulary, normal logic programs, CNF formulas and
// the reference (brute-force) semantics used as ground truth.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace cautious
{

/// Dense atom index within one vocabulary.
struct Atom
{
    std::uint32_t id = 0;

    constexpr auto operator<=>( const Atom& ) const = default;
};

class Literal
{
    // Encoded as 2 * atom + sign, sign = 1 for negative literals.
    std::uint32_t _code = 0;

    constexpr explicit Literal( std::uint32_t code ) : _code{ code } {}

public:
    constexpr Literal() = default;

    static constexpr Literal positive( Atom a ) { return Literal{ a.id * 2 }; }
    static constexpr Literal negative( Atom a ) { return Literal{ a.id * 2 + 1 }; }
    static constexpr Literal make( Atom a, bool is_positive )
    {
        return is_positive ? positive( a ) : negative( a );
    }
    static constexpr Literal from_code( std::uint32_t code ) { return Literal{ code }; }

    [[nodiscard]] constexpr Atom atom() const { return Atom{ _code >> 1 }; }
    [[nodiscard]] constexpr bool is_positive() const { return ( _code & 1 ) == 0; }
    [[nodiscard]] constexpr bool is_negative() const { return ( _code & 1 ) != 0; }
    [[nodiscard]] constexpr std::uint32_t code() const { return _code; }

    constexpr Literal operator~() const { return Literal{ _code ^ 1 }; }

    constexpr auto operator<=>( const Literal& ) const = default;
};

using AtomSet = std::set< Atom >;
using LiteralSet = std::set< Literal >;

/// Name <-> id bijection. Ids are handed out densely in interning order.
class SymbolTable
{
    std::vector< std::string > _names;
    std::unordered_map< std::string, Atom > _ids;

public:
    Atom intern( std::string_view name );
    [[nodiscard]] std::optional< Atom > find( std::string_view name ) const;
    [[nodiscard]] const std::string& name( Atom a ) const { return _names.at( a.id ); }
    [[nodiscard]] std::size_t size() const { return _names.size(); }
    [[nodiscard]] bool empty() const { return _names.empty(); }

    [[nodiscard]] AtomSet all() const;

    bool operator==( const SymbolTable& other ) const { return _names == other._names; }
};

/// Disjunction of literals, kept sorted and duplicate-free.
class Clause
{
    std::vector< Literal > _literals;

public:
    Clause() = default;
    explicit Clause( std::vector< Literal > literals );

    [[nodiscard]] std::span< const Literal > literals() const { return _literals; }
    [[nodiscard]] std::size_t size() const { return _literals.size(); }
    [[nodiscard]] bool empty() const { return _literals.empty(); }

    bool operator==( const Clause& ) const = default;
};

struct CnfFormula
{
    SymbolTable vocabulary;
    std::vector< Clause > clauses;
};

/// `head :- body_pos, not body_neg.`; no head means a constraint.
/// Bodies are sorted and duplicate-free.
struct Rule
{
    std::optional< Atom > head;
    std::vector< Atom > body_pos;
    std::vector< Atom > body_neg;

    Rule() = default;
    Rule( std::optional< Atom > head, std::vector< Atom > pos, std::vector< Atom > neg );

    [[nodiscard]] bool is_constraint() const { return !head.has_value(); }
    [[nodiscard]] bool is_positive() const { return body_neg.empty(); }

    bool operator==( const Rule& ) const = default;
};

struct Program
{
    SymbolTable vocabulary;
    std::vector< Rule > rules;
};

/// Either input theory; the cautious/backbone machinery is shared.
using Theory = std::variant< Program, CnfFormula >;

[[nodiscard]] const SymbolTable& vocabulary_of( const Theory& theory );

enum class Semantics
{
    classical,
    stable,
};

/// Total truth assignment over atoms 0..n-1 of a vocabulary.
class Assignment
{
    std::vector< bool > _values;

public:
    Assignment() = default;
    explicit Assignment( std::size_t size, bool value = false ) : _values( size, value ) {}

    /// Builds the assignment whose true atoms are exactly `positive`.
    static Assignment from_positive( std::size_t size, const AtomSet& positive );

    [[nodiscard]] std::size_t size() const { return _values.size(); }
    [[nodiscard]] bool value( Atom a ) const { return _values.at( a.id ); }
    [[nodiscard]] bool satisfies( Literal l ) const { return value( l.atom() ) == l.is_positive(); }
    void set( Atom a, bool v ) { _values.at( a.id ) = v; }

    [[nodiscard]] AtomSet positive_atoms() const;
    /// The assignment as a literal sequence in atom-id order.
    [[nodiscard]] std::vector< Literal > literals() const;

    bool operator==( const Assignment& ) const = default;
};

struct LogicError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

/// Raised when a brute-force routine is asked to exceed its atom bound.
struct BoundExceeded : LogicError
{
    using LogicError::LogicError;
};

inline constexpr std::size_t default_brute_force_bound = 20;
// Masks are 64-bit words.
inline constexpr std::size_t max_brute_force_bound = 40;

[[nodiscard]] AtomSet atoms_of( const Program& program );
[[nodiscard]] AtomSet atoms_of( const CnfFormula& formula );
[[nodiscard]] AtomSet atoms_of( std::span< const Literal > literals );

[[nodiscard]] Program reduct( const Program& program, const AtomSet& x );

/// Least model of the headed rules of a positive program (constraints are
/// ignored). Throws LogicError if some rule has a negative body.
[[nodiscard]] AtomSet least_model( const Program& positive_program );

[[nodiscard]] bool is_classical_model( const Program& program, const Assignment& m );
[[nodiscard]] bool is_classical_model( const CnfFormula& formula, const Assignment& m );
[[nodiscard]] bool is_classical_model( const Theory& theory, const Assignment& m );

/// M is stable iff M+ is the least model of the reduct w.r.t. M+ and M
/// satisfies every constraint.
[[nodiscard]] bool is_answer_set( const Program& program, const Assignment& m );

[[nodiscard]] bool is_model( const Theory& theory, const Assignment& m, Semantics semantics );

/// All models in lexicographic order (atom 0 most significant, false < true).
[[nodiscard]] std::vector< Assignment > enumerate_models( const Theory& theory, Semantics semantics,
                                                          std::size_t bound = default_brute_force_bound );

/// Intersection of the positive parts of all models; the whole vocabulary
/// when there is no model.
[[nodiscard]] AtomSet brute_consequences( const Theory& theory, Semantics semantics,
                                          std::size_t bound = default_brute_force_bound );

// Set helpers shared by the transition layer.
[[nodiscard]] AtomSet set_union( const AtomSet& a, const AtomSet& b );
[[nodiscard]] AtomSet set_intersection( const AtomSet& a, const AtomSet& b );
[[nodiscard]] AtomSet set_difference( const AtomSet& a, const AtomSet& b );
[[nodiscard]] bool is_subset( const AtomSet& a, const AtomSet& b );

/// False iff the collection contains some literal together with its complement.
[[nodiscard]] bool is_consistent( std::span< const Literal > literals );

} // namespace cautious
