#pragma once

#include "cautious/logic.hpp"

#include <chrono>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace cautious
{

struct ModelFound
{
    Assignment model;

    bool operator==( const ModelFound& ) const = default;
};

/// `core` is drawn from the assumptions of the call; the clause database
/// together with the core is unsatisfiable.
struct Incoherent
{
    std::vector< Literal > core;

    bool operator==( const Incoherent& ) const = default;
};

using SolveOutcome = std::variant< ModelFound, Incoherent >;

struct ResourceLimitExceeded : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct SolverLimits
{
    std::optional< std::uint64_t > conflicts_per_solve;
    std::optional< std::chrono::steady_clock::time_point > deadline;
};

struct SolverStats
{
    std::uint64_t solves = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t decisions = 0;
    std::uint64_t propagations = 0;
    std::uint64_t restarts = 0;
    std::uint64_t learned = 0;
};

/// Incremental CDCL solver: two watched literals, first-UIP learning,
/// activity-based branching (ties go to the lowest atom id), geometric
/// restarts, phase saving. Learned clauses survive across solve() calls.
///
/// Variables are atom ids; the vocabulary grows on demand.
class SatSolver
{
public:
    SatSolver() = default;
    explicit SatSolver( std::size_t num_vars ) { ensure_vars( num_vars ); }

    void ensure_vars( std::size_t n );
    Atom new_var();
    [[nodiscard]] std::size_t num_vars() const { return _assigns.size(); }

    /// Adds a clause between solves. Literals may mention unseen variables.
    void add_clause( std::span< const Literal > literals );
    void add_clause( const Clause& clause ) { add_clause( clause.literals() ); }
    void add_clause( std::initializer_list< Literal > literals )
    {
        add_clause( std::span< const Literal >( literals.begin(), literals.size() ) );
    }

    /// Preferred value when the variable is first decided.
    void set_default_phase( Atom var, bool value );

    /// ModelFound assigns every variable; Incoherent carries a core over the
    /// given assumptions (inconsistent pairs included). Throws
    /// ResourceLimitExceeded when the configured limits are hit; the session
    /// stays usable afterwards.
    [[nodiscard]] SolveOutcome solve( std::span< const Literal > assumptions = {} );
    [[nodiscard]] SolveOutcome solve( std::initializer_list< Literal > assumptions )
    {
        return solve( std::span< const Literal >( assumptions.begin(), assumptions.size() ) );
    }

    /// False once the clause database alone is unsatisfiable.
    [[nodiscard]] bool okay() const { return _ok; }

    void set_limits( SolverLimits limits ) { _limits = limits; }
    [[nodiscard]] const SolverLimits& limits() const { return _limits; }
    [[nodiscard]] const SolverStats& stats() const { return _stats; }

private:
    enum class Value : std::int8_t
    {
        False = 0,
        True = 1,
        Undef = 2,
    };

    using ClauseRef = std::uint32_t;
    static constexpr ClauseRef no_reason = ~ClauseRef{ 0 };

    struct StoredClause
    {
        std::vector< Literal > lits;
        bool learnt = false;
    };

    struct Watcher
    {
        ClauseRef clause;
        Literal blocker;
    };

    // Binary max-heap over variables keyed by activity, lower id on ties.
    class VarOrder
    {
        std::vector< std::uint32_t > _heap;
        std::vector< std::int32_t > _index;

        using Activity = std::vector< double >;
        static bool before( const Activity& act, std::uint32_t a, std::uint32_t b );
        void up( const Activity& act, std::size_t i );
        void down( const Activity& act, std::size_t i );

    public:
        void grow( std::size_t n ) { _index.resize( n, -1 ); }
        [[nodiscard]] bool empty() const { return _heap.empty(); }
        [[nodiscard]] bool contains( std::uint32_t v ) const { return _index[ v ] >= 0; }
        void insert( const Activity& act, std::uint32_t v );
        void increased( const Activity& act, std::uint32_t v );
        std::uint32_t pop( const Activity& act );
    };

    [[nodiscard]] Value value( Literal l ) const
    {
        Value v = _assigns[ l.atom().id ];
        if ( v == Value::Undef )
            return v;
        return ( v == Value::True ) == l.is_positive() ? Value::True : Value::False;
    }
    [[nodiscard]] std::size_t decision_level() const { return _trail_lim.size(); }

    void enqueue( Literal l, ClauseRef reason );
    ClauseRef propagate();
    void analyze( ClauseRef conflict, std::vector< Literal >& learnt, std::size_t& backtrack_level );
    std::vector< Literal > analyze_final( Literal failed );
    void cancel_until( std::size_t level );
    ClauseRef attach( std::vector< Literal > lits, bool learnt );
    void bump( Atom var );
    void decay() { _var_inc /= _var_decay; }
    void check_limits( std::uint64_t conflicts_this_solve );

    bool _ok = true;
    std::vector< StoredClause > _clauses;
    std::vector< std::vector< Watcher > > _watches; // by literal code
    std::vector< Value > _assigns;
    std::vector< bool > _phase;
    std::vector< std::size_t > _level;
    std::vector< ClauseRef > _reason;
    std::vector< double > _activity;
    std::vector< bool > _seen;
    std::vector< Literal > _trail;
    std::vector< std::size_t > _trail_lim;
    std::size_t _qhead = 0;
    VarOrder _order;
    double _var_inc = 1.0;
    double _var_decay = 0.95;

    SolverLimits _limits;
    SolverStats _stats;
};

/// Deletion-based minimisation: drops literals one at a time while the
/// remainder stays unsatisfiable. The result is minimal with respect to
/// single-literal removal.
[[nodiscard]] std::vector< Literal > minimize_core( SatSolver& solver, std::span< const Literal > core );

} // namespace cautious
