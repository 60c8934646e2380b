#include "cautious/oracle.hpp"

#include "cautious/asp_oracle.hpp"

#include <algorithm>

namespace cautious
{

std::vector< Literal > Oracle::minimize_core( std::span< const Literal > core )
{
    std::vector< Literal > current( core.begin(), core.end() );
    std::size_t i = 0;
    while ( i < current.size() )
    {
        OracleQuery query;
        for ( std::size_t k = 0; k < current.size(); ++k )
            if ( k != i )
                query.assumptions.push_back( current[ k ] );
        SolveOutcome outcome = solve( query );
        if ( const auto* inc = std::get_if< Incoherent >( &outcome ) )
        {
            LiteralSet keep( inc->core.begin(), inc->core.end() );
            std::erase_if( query.assumptions, [ & ]( Literal l ) { return !keep.contains( l ); } );
            current = std::move( query.assumptions );
        }
        else
            ++i;
    }
    return current;
}

SolveOutcome SatBackedOracle::solve( const OracleQuery& query )
{
    std::vector< Literal > assumptions = query.assumptions;
    std::vector< Atom > selectors;
    for ( const std::vector< Atom >& group : query.forbidden )
    {
        Atom s = _solver.new_var();
        _solver.set_default_phase( s, false );
        std::vector< Literal > clause{ Literal::negative( s ) };
        for ( Atom a : group )
            clause.push_back( Literal::negative( a ) );
        _solver.add_clause( clause );
        assumptions.push_back( Literal::positive( s ) );
        selectors.push_back( s );
    }

    auto retire = [ & ] {
        for ( Atom s : selectors )
            _solver.add_clause( { Literal::negative( s ) } );
    };

    SolveOutcome outcome;
    try
    {
        outcome = search( assumptions );
    }
    catch ( ... )
    {
        retire();
        throw;
    }
    retire();

    if ( auto* inc = std::get_if< Incoherent >( &outcome ) )
    {
        std::erase_if( inc->core, [ & ]( Literal l ) { return l.atom().id >= _vocabulary.size(); } );
        return outcome;
    }
    const Assignment& full = std::get< ModelFound >( outcome ).model;
    Assignment model( _vocabulary.size() );
    for ( std::uint32_t i = 0; i < _vocabulary.size(); ++i )
        model.set( Atom{ i }, full.value( Atom{ i } ) );
    return ModelFound{ std::move( model ) };
}

ClassicalOracle::ClassicalOracle( const Theory& theory ) : SatBackedOracle{ vocabulary_of( theory ) }
{
    _solver.ensure_vars( _vocabulary.size() );
    if ( const auto* formula = std::get_if< CnfFormula >( &theory ) )
    {
        for ( const Clause& c : formula->clauses )
            _solver.add_clause( c );
        return;
    }
    for ( const Rule& r : std::get< Program >( theory ).rules )
    {
        std::vector< Literal > clause;
        if ( r.head )
            clause.push_back( Literal::positive( *r.head ) );
        for ( Atom a : r.body_pos )
            clause.push_back( Literal::negative( a ) );
        for ( Atom a : r.body_neg )
            clause.push_back( Literal::positive( a ) );
        _solver.add_clause( clause );
    }
}

SolveOutcome ClassicalOracle::search( std::span< const Literal > assumptions )
{
    return _solver.solve( assumptions );
}

std::unique_ptr< Oracle > make_oracle( const Theory& theory, Semantics semantics )
{
    if ( semantics == Semantics::stable )
        if ( const auto* program = std::get_if< Program >( &theory ) )
            return std::make_unique< StableOracle >( *program );
    return std::make_unique< ClassicalOracle >( theory );
}

} // namespace cautious
