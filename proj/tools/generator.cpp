#include "generator.hpp"

#include <cautious/parsers.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

namespace cautious::frontend
{

namespace
{

// Draws below `n` with a plain modulo so results do not depend on the
// standard library's distribution implementations.
std::size_t draw( std::mt19937_64& rng, std::size_t n ) { return static_cast< std::size_t >( rng() % n ); }

bool chance( std::mt19937_64& rng, double p ) { return static_cast< double >( rng() >> 11 ) * 0x1.0p-53 < p; }

struct RawRule
{
    std::optional< std::size_t > head;
    std::vector< std::size_t > pos;
    std::vector< std::size_t > neg;
};

} // namespace

Program random_program( std::mt19937_64& rng, const ProgramShape& shape )
{
    if ( shape.atoms == 0 )
        return {};
    std::vector< RawRule > raw;
    for ( std::size_t r = 0; r < shape.rules; ++r )
    {
        RawRule rule;
        std::size_t body = draw( rng, shape.max_body + 1 );
        if ( chance( rng, shape.constraint_probability ) && body > 0 )
            rule.head.reset();
        else
            rule.head = draw( rng, shape.atoms );
        for ( std::size_t i = 0; i < body; ++i )
            ( chance( rng, 0.5 ) ? rule.pos : rule.neg ).push_back( draw( rng, shape.atoms ) );
        raw.push_back( std::move( rule ) );
    }
    if ( shape.atoms > 1 && chance( rng, shape.cycle_probability ) )
    {
        // a <- b, b <- a, optionally with one external support for a.
        std::size_t a = draw( rng, shape.atoms );
        std::size_t b = ( a + 1 + draw( rng, shape.atoms - 1 ) ) % shape.atoms;
        raw.push_back( { a, { b }, {} } );
        raw.push_back( { b, { a }, {} } );
        if ( chance( rng, 0.5 ) )
            raw.push_back( { a, {}, { draw( rng, shape.atoms ) } } );
    }

    Program program;
    auto atom = [ & ]( std::size_t i ) { return program.vocabulary.intern( "p" + std::to_string( i + 1 ) ); };
    for ( const RawRule& r : raw )
    {
        std::optional< Atom > head;
        if ( r.head )
            head = atom( *r.head );
        std::vector< Atom > pos, neg;
        for ( std::size_t i : r.pos )
            pos.push_back( atom( i ) );
        for ( std::size_t i : r.neg )
            neg.push_back( atom( i ) );
        program.rules.emplace_back( head, std::move( pos ), std::move( neg ) );
    }
    return program;
}

CnfFormula random_3cnf( std::mt19937_64& rng, std::size_t vars, std::size_t clauses )
{
    CnfFormula formula;
    for ( std::size_t i = 1; i <= vars; ++i )
        formula.vocabulary.intern( "v" + std::to_string( i ) );
    if ( vars < 3 )
        throw std::invalid_argument( "random_3cnf needs at least three variables" );
    for ( std::size_t c = 0; c < clauses; ++c )
    {
        std::vector< std::uint32_t > picked;
        while ( picked.size() < 3 )
        {
            auto v = static_cast< std::uint32_t >( draw( rng, vars ) );
            if ( std::find( picked.begin(), picked.end(), v ) == picked.end() )
                picked.push_back( v );
        }
        std::vector< Literal > clause;
        for ( std::uint32_t v : picked )
            clause.push_back( Literal::make( Atom{ v }, chance( rng, 0.5 ) ) );
        formula.clauses.emplace_back( std::move( clause ) );
    }
    return formula;
}

std::vector< std::filesystem::path > generate_instances( InstanceKind kind, std::size_t count, std::size_t atoms,
                                                         std::size_t rules_or_clauses, std::uint64_t seed,
                                                         const std::filesystem::path& dir )
{
    std::vector< std::filesystem::path > out;
    if ( count == 0 )
        return out;
    std::filesystem::create_directories( dir );
    std::mt19937_64 rng( seed );
    for ( std::size_t i = 0; i < count; ++i )
    {
        char name[ 32 ];
        std::snprintf( name, sizeof name, kind == InstanceKind::program ? "prog_%04zu.lp" : "cnf_%04zu.cnf", i );
        std::filesystem::path path = dir / name;
        std::string text;
        if ( kind == InstanceKind::program )
        {
            ProgramShape shape;
            shape.atoms = atoms;
            shape.rules = rules_or_clauses;
            text = render( random_program( rng, shape ) );
        }
        else
            text = render( random_3cnf( rng, atoms, rules_or_clauses ) );
        std::ofstream file( path, std::ios::binary );
        file << text;
        if ( !file )
            throw std::runtime_error( "cannot write " + path.string() );
        out.push_back( path );
    }
    return out;
}

} // namespace cautious::frontend
