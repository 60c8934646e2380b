#pragma once

// Fixtures shared by the test binaries: the running examples, name-based
// builders, a scripted oracle and random instance corpora.

#include <cautious/logic.hpp>
#include <cautious/oracle.hpp>
#include <cautious/parsers.hpp>
#include <cautious/trace.hpp>
#include <cautious/transitions.hpp>

#include <generator.hpp>

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cautious::testing
{

inline constexpr std::string_view p1_text = "a :- not b. b :- not a. c :- a. c :- b.";
inline constexpr std::string_view p2_text = "a :- not b. b :- not a. c :- a. c :- b. d :- c.";
inline constexpr std::string_view f1_text = "p cnf 3 3\n1 2 0\n-1 3 0\n-2 3 0\n";

inline Program p1() { return parse_program( p1_text ); }
inline Program p2() { return parse_program( p2_text ); }
inline CnfFormula f1() { return parse_dimacs( f1_text ); }

inline Atom atom( const SymbolTable& v, std::string_view name )
{
    auto a = v.find( name );
    if ( !a )
        throw std::invalid_argument( "no atom " + std::string( name ) );
    return *a;
}

inline AtomSet atoms( const SymbolTable& v, std::initializer_list< std::string_view > names )
{
    AtomSet out;
    for ( auto n : names )
        out.insert( atom( v, n ) );
    return out;
}

/// "a" or "-a".
inline Literal lit( const SymbolTable& v, std::string_view name )
{
    if ( !name.empty() && name.front() == '-' )
        return Literal::negative( atom( v, name.substr( 1 ) ) );
    return Literal::positive( atom( v, name ) );
}

inline Record record( const SymbolTable& v, std::initializer_list< std::string_view > names )
{
    Record out;
    for ( auto n : names )
        out.push_back( lit( v, n ) );
    return out;
}

inline LiteralSet literals( const SymbolTable& v, std::initializer_list< std::string_view > names )
{
    LiteralSet out;
    for ( auto n : names )
        out.insert( lit( v, n ) );
    return out;
}

inline Assignment assignment( const SymbolTable& v, std::initializer_list< std::string_view > positive )
{
    return Assignment::from_positive( v.size(), atoms( v, positive ) );
}

/// Replays a fixed list of outcomes and records the queries it saw.
class ScriptedOracle final : public Oracle
{
public:
    ScriptedOracle( SymbolTable vocabulary, std::deque< SolveOutcome > script, Semantics semantics = Semantics::stable )
            : _vocabulary{ std::move( vocabulary ) }, _script{ std::move( script ) }, _semantics{ semantics }
    {
    }

    SolveOutcome solve( const OracleQuery& query ) override
    {
        queries.push_back( query );
        if ( _script.empty() )
            throw std::logic_error( "scripted oracle ran out of answers" );
        SolveOutcome next = _script.front();
        _script.pop_front();
        return next;
    }

    [[nodiscard]] Semantics semantics() const override { return _semantics; }
    [[nodiscard]] const SymbolTable& vocabulary() const override { return _vocabulary; }
    [[nodiscard]] SolverStats stats() const override { return {}; }
    void set_limits( SolverLimits ) override {}

    [[nodiscard]] bool exhausted() const { return _script.empty(); }

    std::vector< OracleQuery > queries;

private:
    SymbolTable _vocabulary;
    std::deque< SolveOutcome > _script;
    Semantics _semantics;
};

inline std::filesystem::path data_dir() { return std::filesystem::path( CAUTIOUS_TEST_DATA_DIR ); }

inline std::string read_data( const std::string& name )
{
    std::ifstream in( data_dir() / name, std::ios::binary );
    if ( !in )
        throw std::runtime_error( "missing test data " + name );
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Random program over at most max_atoms atoms with at most max_rules
/// rules, a planted positive cycle included.
inline Program random_small_program( std::mt19937_64& rng, std::size_t max_atoms = 8, std::size_t max_rules = 12 )
{
    frontend::ProgramShape shape;
    shape.atoms = 1 + rng() % max_atoms;
    // A planted cycle adds up to three rules.
    shape.rules = rng() % ( max_rules - 2 );
    return frontend::random_program( rng, shape );
}

/// Random 3-CNF with 3..max_vars variables and a clause/variable ratio in
/// [1, 6], so both satisfiable and unsatisfiable formulas show up.
inline CnfFormula random_small_cnf( std::mt19937_64& rng, std::size_t max_vars = 15 )
{
    std::size_t vars = 3 + rng() % ( max_vars - 2 );
    std::size_t clauses = vars + rng() % ( 5 * vars + 1 );
    return frontend::random_3cnf( rng, vars, clauses );
}

/// n + 1 pigeons into n holes as a choice program: unsatisfiable, and
/// expensive to refute for CDCL once n reaches 7 or so.
inline std::string pigeonhole_program( int n )
{
    auto x = []( int p, int h ) { return "x" + std::to_string( p ) + "_" + std::to_string( h ); };
    std::string text;
    for ( int p = 0; p <= n; ++p )
        for ( int h = 0; h < n; ++h )
            text += x( p, h ) + " :- not n" + x( p, h ) + ". n" + x( p, h ) + " :- not " + x( p, h ) + ".\n";
    for ( int p = 0; p <= n; ++p )
    {
        text += ":- ";
        for ( int h = 0; h < n; ++h )
            text += std::string( h ? ", " : "" ) + "not " + x( p, h );
        text += ".\n";
    }
    for ( int h = 0; h < n; ++h )
        for ( int p = 0; p <= n; ++p )
            for ( int q = p + 1; q <= n; ++q )
                text += ":- " + x( p, h ) + ", " + x( q, h ) + ".\n";
    return text;
}

/// Compares a path with a reference path rule by rule and state by state.
/// Records only have to agree up to order when they are models, and only
/// in being inconsistent otherwise: different correct oracles justify the
/// same failure with different literals. Returns a description of the
/// first difference, empty when the paths agree.
inline std::string path_difference( const Trace& got, const Trace& expected, const SymbolTable& vocabulary )
{
    auto normalize = []( State s ) {
        if ( auto* c = std::get_if< CoreState >( &s ) )
        {
            if ( is_consistent_record( c->record ) )
                std::sort( c->record.begin(), c->record.end() );
            else
                c->record = { Literal::positive( Atom{ 0 } ), Literal::negative( Atom{ 0 } ) };
        }
        return s;
    };
    if ( got.size() != expected.size() )
        return "length " + std::to_string( got.size() ) + " instead of " + std::to_string( expected.size() );
    for ( std::size_t i = 0; i < got.size(); ++i )
    {
        const TraceEvent& g = got[ i ];
        const TraceEvent& e = expected[ i ];
        if ( g.rule != e.rule )
            return "step " + std::to_string( i ) + ": rule " + std::string( rule_name( g.rule ) ) + " instead of " +
                   std::string( rule_name( e.rule ) );
        if ( normalize( g.before ) != normalize( e.before ) || normalize( g.after ) != normalize( e.after ) )
            return "step " + std::to_string( i ) + ": state " + serialize_state( g.after, vocabulary ) +
                   " instead of " + serialize_state( e.after, vocabulary );
    }
    return {};
}

} // namespace cautious::testing
