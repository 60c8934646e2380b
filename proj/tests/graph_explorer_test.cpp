// Exhaustive exploration of the solver graphs of small instances: every
// oracle answer a correct oracle could give and every candidate or chunk
// choice is followed. The reachable part must be acyclic, free of dead
// ends, and every terminal state must carry the right answer.

#include "test_support.hpp"

#include <cautious/trace.hpp>

#include <gtest/gtest.h>

#include <map>

using namespace cautious;
using namespace cautious::testing;

namespace
{

struct Edge
{
    RuleId rule;
    RuleInput input;
};

class Explorer
{
public:
    Explorer( const Theory& base, Semantics semantics, GraphFamily family )
            : _base{ base }, _semantics{ semantics }, _family{ std::move( family ) }, _rules{ rules_of( _family ) },
              _vocabulary{ vocabulary_of( base ) }, _models{ enumerate_models( base, semantics ) },
              _answer{ brute_consequences( base, semantics ) }
    {
    }

    // Returns a description of the first problem found, empty if none.
    std::string explore()
    {
        AtomSet all = _vocabulary.all();
        std::vector< State > starts;
        if ( _family.kind == GraphFamily::Kind::mixed )
            for ( Technique t : _family.techniques )
                starts.push_back( initial_state( _family, all, t ) );
        else
            starts.push_back( initial_state( _family, all ) );
        for ( const State& s : starts )
            if ( std::string problem = visit( s ); !problem.empty() )
                return problem;
        return {};
    }

    [[nodiscard]] std::size_t states() const { return _colour.size(); }

private:
    enum class Colour
    {
        open,
        done,
    };

    std::string key( const State& s ) const { return serialize_state( s, _vocabulary ); }

    std::string visit( const State& s )
    {
        std::string k = key( s );
        if ( auto it = _colour.find( k ); it != _colour.end() )
            return it->second == Colour::open ? "cycle through " + k : "";
        _colour.emplace( k, Colour::open );

        const AtomSet* over = over_of( s );
        const AtomSet* under = under_of( s );
        if ( over && under && !( is_subset( *under, _answer ) && is_subset( _answer, *over ) ) )
            return "bracket broken at " + k;
        if ( const auto* ok = std::get_if< TerminalOk >( &s ); ok && ok->witness != _answer )
            return "wrong answer at " + k;

        auto edges = successors( s );
        if ( edges.empty() && !is_terminal( s ) )
            return "dead end at " + k;
        for ( const Edge& e : edges )
            if ( std::string problem = visit( cautious::apply( e.rule, s, e.input ) ); !problem.empty() )
                return problem;
        _colour[ k ] = Colour::done;
        return {};
    }

    std::vector< Record > oracle_answers( const CoreState& s ) const
    {
        std::vector< Record > out;
        OracleQuery q = oracle_query( s.over, s.under, s.action );
        auto admits = [ & ]( const Assignment& m, std::span< const Literal > assumed ) {
            for ( Literal l : assumed )
                if ( !m.satisfies( l ) )
                    return false;
            for ( const auto& g : q.forbidden )
                if ( std::all_of( g.begin(), g.end(), [ & ]( Atom a ) { return m.value( a ); } ) )
                    return false;
            return true;
        };
        for ( const Assignment& m : _models )
            if ( admits( m, q.assumptions ) )
                out.push_back( m.literals() );
        if ( !out.empty() )
            return out;

        if ( const auto* core = std::get_if< CoreAction >( &s.action ) )
        {
            // Every nonempty subset of N without a model is a possible core.
            std::vector< Literal > n( core->n.begin(), core->n.end() );
            for ( std::uint64_t mask = 1; mask < ( std::uint64_t{ 1 } << n.size() ); ++mask )
            {
                std::vector< Literal > c;
                for ( std::size_t i = 0; i < n.size(); ++i )
                    if ( ( mask >> i ) & 1 )
                        c.push_back( n[ i ] );
                bool any = std::any_of( _models.begin(), _models.end(), [ & ]( const Assignment& m ) {
                    return std::all_of( c.begin(), c.end(), [ & ]( Literal l ) { return m.satisfies( l ); } );
                } );
                if ( !any )
                    out.push_back( record_of_core( c ) );
            }
            return out;
        }
        Atom a{ 0 };
        out.push_back( { Literal::positive( a ), Literal::negative( a ) } );
        return out;
    }

    std::vector< Edge > successors( const State& s ) const
    {
        std::vector< Edge > out;
        auto offer = [ & ]( RuleId r, RuleInput in ) {
            if ( _rules.contains( r ) && applicable( r, s, in ) )
                out.push_back( { r, std::move( in ) } );
        };
        if ( const auto* core = std::get_if< CoreState >( &s ); core && core->record.empty() )
        {
            for ( Record& r : oracle_answers( *core ) )
            {
                offer( RuleId::Oracle, r );
                offer( RuleId::CoreOracle, std::move( r ) );
            }
            return out;
        }
        for ( std::size_t i = 0; i < rule_count; ++i )
            offer( static_cast< RuleId >( i ), std::monostate{} );

        const AtomSet* over = over_of( s );
        const AtomSet* under = under_of( s );
        if ( over && under )
        {
            std::vector< Atom > gap;
            for ( Atom a : set_difference( *over, *under ) )
                gap.push_back( a );
            for ( Atom a : gap )
                offer( RuleId::UnderApprox, a );
            for ( std::uint64_t mask = 1; mask < ( std::uint64_t{ 1 } << gap.size() ); ++mask )
            {
                AtomSet chunk;
                for ( std::size_t i = 0; i < gap.size(); ++i )
                    if ( ( mask >> i ) & 1 )
                        chunk.insert( gap[ i ] );
                offer( RuleId::Chunk, chunk );
            }
        }
        return out;
    }

    const Theory& _base;
    Semantics _semantics;
    GraphFamily _family;
    std::set< RuleId > _rules;
    const SymbolTable& _vocabulary;
    std::vector< Assignment > _models;
    AtomSet _answer;
    std::map< std::string, Colour > _colour;
};

std::vector< GraphFamily > families()
{
    return { GraphFamily::ov(),
             GraphFamily::un(),
             GraphFamily::ch(),
             GraphFamily::mixed( { Technique::ov, Technique::un } ),
             GraphFamily::mixed( { Technique::ov, Technique::un, Technique::ch } ),
             GraphFamily::fs(),
             GraphFamily::fs_then_ch() };
}

void explore_all( const Theory& t, Semantics sem )
{
    if ( vocabulary_of( t ).empty() )
        return;
    for ( const GraphFamily& f : families() )
    {
        Explorer e( t, sem, f );
        std::string problem = e.explore();
        ASSERT_TRUE( problem.empty() ) << problem << "\n"
                                       << ( std::holds_alternative< Program >( t ) ? render( std::get< Program >( t ) )
                                                                                    : render( std::get< CnfFormula >( t ) ) );
    }
}

} // namespace

TEST( GraphExplorer, RunningExamples )
{
    explore_all( p1(), Semantics::stable );
    explore_all( p2(), Semantics::stable );
    explore_all( f1(), Semantics::classical );
    explore_all( parse_program( "a :- not a." ), Semantics::stable );
}

TEST( GraphExplorer, RandomPrograms )
{
    std::mt19937_64 rng( 61 );
    for ( int i = 0; i < 120; ++i )
        explore_all( random_small_program( rng, 4, 7 ), Semantics::stable );
}

TEST( GraphExplorer, RandomFormulas )
{
    std::mt19937_64 rng( 62 );
    for ( int i = 0; i < 60; ++i )
        explore_all( random_small_cnf( rng, 4 ), Semantics::classical );
}
