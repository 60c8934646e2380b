#include "cautious/asp_oracle.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <string>

namespace cautious
{

namespace
{

using Graph = std::vector< std::vector< std::uint32_t > >;

// Iterative Tarjan restricted to nodes with active[v]; components come out
// sinks first.
std::vector< std::vector< std::uint32_t > > tarjan( const Graph& graph, const std::vector< bool >& active )
{
    const std::size_t n = graph.size();
    constexpr std::uint32_t unvisited = ~std::uint32_t{ 0 };
    std::vector< std::uint32_t > index( n, unvisited ), low( n, 0 );
    std::vector< bool > on_stack( n, false );
    std::vector< std::uint32_t > stack;
    std::vector< std::vector< std::uint32_t > > components;
    std::uint32_t counter = 0;

    struct Frame
    {
        std::uint32_t node;
        std::size_t edge;
    };
    std::vector< Frame > call;

    for ( std::uint32_t root = 0; root < n; ++root )
    {
        if ( !active[ root ] || index[ root ] != unvisited )
            continue;
        call.push_back( { root, 0 } );
        index[ root ] = low[ root ] = counter++;
        stack.push_back( root );
        on_stack[ root ] = true;

        while ( !call.empty() )
        {
            Frame& f = call.back();
            const auto& edges = graph[ f.node ];
            if ( f.edge < edges.size() )
            {
                std::uint32_t w = edges[ f.edge++ ];
                if ( !active[ w ] )
                    continue;
                if ( index[ w ] == unvisited )
                {
                    index[ w ] = low[ w ] = counter++;
                    stack.push_back( w );
                    on_stack[ w ] = true;
                    call.push_back( { w, 0 } );
                }
                else if ( on_stack[ w ] )
                    low[ f.node ] = std::min( low[ f.node ], index[ w ] );
                continue;
            }
            std::uint32_t v = f.node;
            call.pop_back();
            if ( !call.empty() )
                low[ call.back().node ] = std::min( low[ call.back().node ], low[ v ] );
            if ( low[ v ] == index[ v ] )
            {
                std::vector< std::uint32_t > component;
                std::uint32_t w = 0;
                do
                {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[ w ] = false;
                    component.push_back( w );
                } while ( w != v );
                std::sort( component.begin(), component.end() );
                components.push_back( std::move( component ) );
            }
        }
    }
    return components;
}

Graph dependency_graph( const Program& program )
{
    Graph graph( program.vocabulary.size() );
    for ( const Rule& r : program.rules )
        if ( r.head )
            for ( Atom a : r.body_pos )
                graph[ r.head->id ].push_back( a.id );
    for ( auto& edges : graph )
    {
        std::sort( edges.begin(), edges.end() );
        edges.erase( std::unique( edges.begin(), edges.end() ), edges.end() );
    }
    return graph;
}

std::vector< std::size_t > scc_membership( const Program& program )
{
    Graph graph = dependency_graph( program );
    std::vector< std::size_t > out( graph.size(), 0 );
    auto components = tarjan( graph, std::vector< bool >( graph.size(), true ) );
    for ( std::size_t c = 0; c < components.size(); ++c )
        for ( std::uint32_t v : components[ c ] )
            out[ v ] = c;
    return out;
}

} // namespace

std::pair< CnfFormula, CompletionMap > clark_completion( const Program& program )
{
    CnfFormula formula;
    formula.vocabulary = program.vocabulary;
    CompletionMap map;
    map.program_atoms = program.vocabulary.size();
    map.body_literal.resize( program.rules.size() );

    std::vector< std::vector< Literal > > support( program.vocabulary.size() );
    std::vector< bool > unconditionally_true( program.vocabulary.size(), false );

    for ( std::size_t i = 0; i < program.rules.size(); ++i )
    {
        const Rule& r = program.rules[ i ];
        std::vector< Literal > body;
        for ( Atom a : r.body_pos )
            body.push_back( Literal::positive( a ) );
        for ( Atom a : r.body_neg )
            body.push_back( Literal::negative( a ) );

        if ( r.is_constraint() )
        {
            std::vector< Literal > clause;
            for ( Literal l : body )
                clause.push_back( ~l );
            formula.clauses.emplace_back( std::move( clause ) );
            continue;
        }

        if ( body.size() == 1 )
            map.body_literal[ i ] = body.front();
        else if ( body.size() > 1 )
        {
            Atom aux = formula.vocabulary.intern( "_body" + std::to_string( i ) );
            map.aux_rule.push_back( i );
            Literal beta = Literal::positive( aux );
            std::vector< Literal > back{ beta };
            for ( Literal l : body )
            {
                formula.clauses.emplace_back( std::vector< Literal >{ ~beta, l } );
                back.push_back( ~l );
            }
            formula.clauses.emplace_back( std::move( back ) );
            map.body_literal[ i ] = beta;
        }

        Literal head = Literal::positive( *r.head );
        if ( const auto& b = map.body_literal[ i ] )
        {
            formula.clauses.emplace_back( std::vector< Literal >{ head, ~*b } );
            support[ r.head->id ].push_back( *b );
        }
        else
        {
            formula.clauses.emplace_back( std::vector< Literal >{ head } );
            unconditionally_true[ r.head->id ] = true;
        }
    }

    for ( std::uint32_t a = 0; a < program.vocabulary.size(); ++a )
    {
        if ( unconditionally_true[ a ] )
            continue;
        std::vector< Literal > clause{ Literal::negative( Atom{ a } ) };
        clause.insert( clause.end(), support[ a ].begin(), support[ a ].end() );
        formula.clauses.emplace_back( std::move( clause ) );
    }
    return { std::move( formula ), std::move( map ) };
}

std::vector< std::vector< Atom > > positive_sccs( const Program& program )
{
    Graph graph = dependency_graph( program );
    std::vector< std::vector< Atom > > out;
    for ( const auto& component : tarjan( graph, std::vector< bool >( graph.size(), true ) ) )
    {
        std::vector< Atom > atoms;
        for ( std::uint32_t v : component )
            atoms.push_back( Atom{ v } );
        out.push_back( std::move( atoms ) );
    }
    return out;
}

bool is_tight( const Program& program )
{
    Graph graph = dependency_graph( program );
    for ( std::uint32_t v = 0; v < graph.size(); ++v )
        if ( std::binary_search( graph[ v ].begin(), graph[ v ].end(), v ) )
            return false;
    auto components = tarjan( graph, std::vector< bool >( graph.size(), true ) );
    return std::all_of( components.begin(), components.end(), []( const auto& c ) { return c.size() == 1; } );
}

std::vector< Clause > loop_nogood( const Program& program, const CompletionMap& map, const AtomSet& loop )
{
    if ( loop.empty() )
        throw LogicError( "loop_nogood: empty loop" );
    auto membership = scc_membership( program );
    std::size_t component = membership.at( loop.begin()->id );
    for ( Atom a : loop )
        if ( membership.at( a.id ) != component )
            throw LogicError( "loop_nogood: loop spans several positive components" );

    std::vector< Literal > external;
    for ( std::size_t i = 0; i < program.rules.size(); ++i )
    {
        const Rule& r = program.rules[ i ];
        if ( !r.head || !loop.contains( *r.head ) )
            continue;
        bool internal = std::any_of( r.body_pos.begin(), r.body_pos.end(), [ & ]( Atom a ) { return loop.contains( a ); } );
        if ( internal )
            continue;
        if ( !map.body_literal[ i ] )
            return {}; // a fact supports the loop unconditionally
        external.push_back( *map.body_literal[ i ] );
    }

    std::vector< Clause > out;
    for ( Atom a : loop )
    {
        std::vector< Literal > clause{ Literal::negative( a ) };
        clause.insert( clause.end(), external.begin(), external.end() );
        out.emplace_back( std::move( clause ) );
    }
    return out;
}

StableOracle::StableOracle( Program program )
        : SatBackedOracle{ program.vocabulary }, _program{ std::move( program ) }
{
    auto [ formula, map ] = clark_completion( _program );
    _map = std::move( map );
    _solver.ensure_vars( formula.vocabulary.size() );
    for ( const Clause& c : formula.clauses )
        _solver.add_clause( c );
    _scc_of = scc_membership( _program );
    Graph graph = dependency_graph( _program );
    _dependencies.resize( graph.size() );
    for ( std::size_t v = 0; v < graph.size(); ++v )
        for ( std::uint32_t w : graph[ v ] )
            _dependencies[ v ].push_back( Atom{ w } );
}

AtomSet StableOracle::violated_loop( const AtomSet& unfounded ) const
{
    Graph graph( _dependencies.size() );
    std::vector< bool > active( _dependencies.size(), false );
    for ( Atom a : unfounded )
    {
        active[ a.id ] = true;
        for ( Atom b : _dependencies[ a.id ] )
            graph[ a.id ].push_back( b.id );
    }
    auto components = tarjan( graph, active );

    std::vector< std::size_t > component_of( graph.size(), 0 );
    for ( std::size_t c = 0; c < components.size(); ++c )
        for ( std::uint32_t v : components[ c ] )
            component_of[ v ] = c;

    const std::vector< std::uint32_t >* best = nullptr;
    for ( std::size_t c = 0; c < components.size(); ++c )
    {
        bool bottom = true;
        for ( std::uint32_t v : components[ c ] )
            for ( std::uint32_t w : graph[ v ] )
                if ( active[ w ] && component_of[ w ] != c )
                    bottom = false;
        if ( !bottom )
            continue;
        const auto& candidate = components[ c ];
        if ( !best || candidate.size() < best->size() ||
             ( candidate.size() == best->size() && candidate.front() < best->front() ) )
            best = &candidate;
    }
    assert( best != nullptr );
    AtomSet out;
    for ( std::uint32_t v : *best )
        out.insert( Atom{ v } );
    return out;
}

SolveOutcome StableOracle::search( std::span< const Literal > assumptions )
{
    const std::size_t n = _program.vocabulary.size();
    while ( true )
    {
        SolveOutcome outcome = _solver.solve( assumptions );
        const auto* found = std::get_if< ModelFound >( &outcome );
        if ( !found )
            return outcome;

        AtomSet positive;
        for ( std::uint32_t a = 0; a < n; ++a )
            if ( found->model.value( Atom{ a } ) )
                positive.insert( positive.end(), Atom{ a } );
        AtomSet founded = least_model( reduct( _program, positive ) );
        if ( founded == positive )
            return outcome;

        AtomSet loop = violated_loop( set_difference( positive, founded ) );
        bool fresh = _loops.insert( loop ).second;
        assert( fresh && "a loop formula was violated twice" );
        (void)fresh;
        for ( const Clause& c : loop_nogood( _program, _map, loop ) )
            _solver.add_clause( c );
    }
}

SolveOutcome stable_solve( StableOracle& oracle, std::span< const Literal > assumptions )
{
    OracleQuery query;
    query.assumptions.assign( assumptions.begin(), assumptions.end() );
    return oracle.solve( query );
}

} // namespace cautious
