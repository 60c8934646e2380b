#include "cautious/logic.hpp"

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <string>

namespace cautious
{

namespace
{

template < typename T >
std::vector< T > sorted_unique( std::vector< T > values )
{
    std::sort( values.begin(), values.end() );
    values.erase( std::unique( values.begin(), values.end() ), values.end() );
    return values;
}

// Brute-force encoding: atom i lives at bit (n - 1 - i) so that counting
// upwards over masks enumerates assignments in lexicographic order.
struct MaskLayout
{
    std::size_t n;

    [[nodiscard]] std::uint64_t bit( Atom a ) const { return std::uint64_t{ 1 } << ( n - 1 - a.id ); }

    [[nodiscard]] std::uint64_t mask( std::span< const Atom > atoms ) const
    {
        std::uint64_t m = 0;
        for ( Atom a : atoms )
            m |= bit( a );
        return m;
    }

    [[nodiscard]] Assignment decode( std::uint64_t m ) const
    {
        Assignment out( n );
        for ( std::uint32_t i = 0; i < n; ++i )
            out.set( Atom{ i }, ( m & bit( Atom{ i } ) ) != 0 );
        return out;
    }
};

struct MaskedClause
{
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
};

struct MaskedRule
{
    std::uint64_t head = 0; // 0 for constraints
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
};

std::vector< MaskedClause > mask_clauses( const CnfFormula& f, const MaskLayout& layout )
{
    std::vector< MaskedClause > out;
    out.reserve( f.clauses.size() );
    for ( const Clause& c : f.clauses )
    {
        MaskedClause mc;
        for ( Literal l : c.literals() )
            ( l.is_positive() ? mc.pos : mc.neg ) |= layout.bit( l.atom() );
        out.push_back( mc );
    }
    return out;
}

std::vector< MaskedRule > mask_rules( const Program& p, const MaskLayout& layout )
{
    std::vector< MaskedRule > out;
    out.reserve( p.rules.size() );
    for ( const Rule& r : p.rules )
    {
        MaskedRule mr;
        if ( r.head )
            mr.head = layout.bit( *r.head );
        mr.pos = layout.mask( r.body_pos );
        mr.neg = layout.mask( r.body_neg );
        out.push_back( mr );
    }
    return out;
}

bool satisfies_all( std::span< const MaskedClause > clauses, std::uint64_t m )
{
    return std::all_of( clauses.begin(), clauses.end(),
                        [ m ]( const MaskedClause& c ) { return ( m & c.pos ) != 0 || ( ~m & c.neg ) != 0; } );
}

bool rules_satisfied( std::span< const MaskedRule > rules, std::uint64_t m )
{
    for ( const MaskedRule& r : rules )
    {
        bool body = ( m & r.pos ) == r.pos && ( m & r.neg ) == 0;
        if ( body && ( m & r.head ) == 0 )
            return false;
    }
    return true;
}

bool is_stable_mask( std::span< const MaskedRule > rules, std::uint64_t m )
{
    if ( !rules_satisfied( rules, m ) )
        return false;
    std::uint64_t lm = 0;
    bool changed = true;
    while ( changed )
    {
        changed = false;
        for ( const MaskedRule& r : rules )
        {
            if ( r.head == 0 || ( r.neg & m ) != 0 || ( lm & r.head ) != 0 )
                continue;
            if ( ( lm & r.pos ) == r.pos )
            {
                lm |= r.head;
                changed = true;
            }
        }
    }
    return lm == m;
}

void check_total( const SymbolTable& vocabulary, const Assignment& m )
{
    if ( m.size() != vocabulary.size() )
        throw LogicError( "assignment over " + std::to_string( m.size() ) + " atoms is not total over a vocabulary of " +
                          std::to_string( vocabulary.size() ) );
}

} // namespace

Atom SymbolTable::intern( std::string_view name )
{
    std::string key{ name };
    if ( auto it = _ids.find( key ); it != _ids.end() )
        return it->second;
    Atom a{ static_cast< std::uint32_t >( _names.size() ) };
    _names.push_back( key );
    _ids.emplace( std::move( key ), a );
    return a;
}

std::optional< Atom > SymbolTable::find( std::string_view name ) const
{
    if ( auto it = _ids.find( std::string{ name } ); it != _ids.end() )
        return it->second;
    return std::nullopt;
}

AtomSet SymbolTable::all() const
{
    AtomSet out;
    for ( std::uint32_t i = 0; i < _names.size(); ++i )
        out.insert( out.end(), Atom{ i } );
    return out;
}

Clause::Clause( std::vector< Literal > literals ) : _literals{ sorted_unique( std::move( literals ) ) } {}

Rule::Rule( std::optional< Atom > h, std::vector< Atom > pos, std::vector< Atom > neg )
        : head{ h }, body_pos{ sorted_unique( std::move( pos ) ) }, body_neg{ sorted_unique( std::move( neg ) ) }
{
}

const SymbolTable& vocabulary_of( const Theory& theory )
{
    return std::visit( []( const auto& t ) -> const SymbolTable& { return t.vocabulary; }, theory );
}

Assignment Assignment::from_positive( std::size_t size, const AtomSet& positive )
{
    Assignment out( size );
    for ( Atom a : positive )
        out.set( a, true );
    return out;
}

AtomSet Assignment::positive_atoms() const
{
    AtomSet out;
    for ( std::uint32_t i = 0; i < _values.size(); ++i )
        if ( _values[ i ] )
            out.insert( out.end(), Atom{ i } );
    return out;
}

std::vector< Literal > Assignment::literals() const
{
    std::vector< Literal > out;
    out.reserve( _values.size() );
    for ( std::uint32_t i = 0; i < _values.size(); ++i )
        out.push_back( Literal::make( Atom{ i }, _values[ i ] ) );
    return out;
}

AtomSet atoms_of( const Program& program )
{
    AtomSet out;
    for ( const Rule& r : program.rules )
    {
        if ( r.head )
            out.insert( *r.head );
        out.insert( r.body_pos.begin(), r.body_pos.end() );
        out.insert( r.body_neg.begin(), r.body_neg.end() );
    }
    return out;
}

AtomSet atoms_of( const CnfFormula& formula )
{
    AtomSet out;
    for ( const Clause& c : formula.clauses )
        for ( Literal l : c.literals() )
            out.insert( l.atom() );
    return out;
}

AtomSet atoms_of( std::span< const Literal > literals )
{
    AtomSet out;
    for ( Literal l : literals )
        out.insert( l.atom() );
    return out;
}

Program reduct( const Program& program, const AtomSet& x )
{
    Program out;
    out.vocabulary = program.vocabulary;
    for ( const Rule& r : program.rules )
    {
        bool blocked = std::any_of( r.body_neg.begin(), r.body_neg.end(), [ & ]( Atom a ) { return x.contains( a ); } );
        if ( !blocked )
            out.rules.emplace_back( r.head, r.body_pos, std::vector< Atom >{} );
    }
    return out;
}

AtomSet least_model( const Program& positive_program )
{
    for ( const Rule& r : positive_program.rules )
        if ( !r.is_positive() )
            throw LogicError( "least_model requires a positive program" );

    // Counter-based propagation: each headed rule fires once all of its
    // positive body atoms are derived.
    std::size_t n = positive_program.vocabulary.size();
    for ( const Rule& r : positive_program.rules )
    {
        if ( r.head )
            n = std::max< std::size_t >( n, r.head->id + 1 );
        for ( Atom a : r.body_pos )
            n = std::max< std::size_t >( n, a.id + 1 );
    }
    std::vector< std::vector< std::size_t > > watching( n );
    std::vector< std::size_t > missing( positive_program.rules.size() );
    std::vector< bool > derived( n, false );
    std::vector< Atom > queue;

    for ( std::size_t i = 0; i < positive_program.rules.size(); ++i )
    {
        const Rule& r = positive_program.rules[ i ];
        if ( !r.head )
            continue;
        missing[ i ] = r.body_pos.size();
        for ( Atom a : r.body_pos )
            watching[ a.id ].push_back( i );
        if ( missing[ i ] == 0 && !derived[ r.head->id ] )
        {
            derived[ r.head->id ] = true;
            queue.push_back( *r.head );
        }
    }
    while ( !queue.empty() )
    {
        Atom a = queue.back();
        queue.pop_back();
        for ( std::size_t i : watching[ a.id ] )
        {
            const Rule& r = positive_program.rules[ i ];
            if ( --missing[ i ] == 0 && !derived[ r.head->id ] )
            {
                derived[ r.head->id ] = true;
                queue.push_back( *r.head );
            }
        }
    }
    AtomSet out;
    for ( std::uint32_t i = 0; i < n; ++i )
        if ( derived[ i ] )
            out.insert( out.end(), Atom{ i } );
    return out;
}

bool is_classical_model( const Program& program, const Assignment& m )
{
    check_total( program.vocabulary, m );
    for ( const Rule& r : program.rules )
    {
        bool body = std::all_of( r.body_pos.begin(), r.body_pos.end(), [ & ]( Atom a ) { return m.value( a ); } ) &&
                    std::none_of( r.body_neg.begin(), r.body_neg.end(), [ & ]( Atom a ) { return m.value( a ); } );
        if ( body && !( r.head && m.value( *r.head ) ) )
            return false;
    }
    return true;
}

bool is_classical_model( const CnfFormula& formula, const Assignment& m )
{
    check_total( formula.vocabulary, m );
    return std::all_of( formula.clauses.begin(), formula.clauses.end(), [ & ]( const Clause& c ) {
        return std::any_of( c.literals().begin(), c.literals().end(), [ & ]( Literal l ) { return m.satisfies( l ); } );
    } );
}

bool is_classical_model( const Theory& theory, const Assignment& m )
{
    return std::visit( [ & ]( const auto& t ) { return is_classical_model( t, m ); }, theory );
}

bool is_answer_set( const Program& program, const Assignment& m )
{
    if ( !is_classical_model( program, m ) )
        return false;
    AtomSet positive = m.positive_atoms();
    return least_model( reduct( program, positive ) ) == positive;
}

bool is_model( const Theory& theory, const Assignment& m, Semantics semantics )
{
    if ( semantics == Semantics::stable )
        if ( const auto* program = std::get_if< Program >( &theory ) )
            return is_answer_set( *program, m );
    return is_classical_model( theory, m );
}

std::vector< Assignment > enumerate_models( const Theory& theory, Semantics semantics, std::size_t bound )
{
    const SymbolTable& vocabulary = vocabulary_of( theory );
    std::size_t n = vocabulary.size();
    if ( n > bound || n > max_brute_force_bound )
        throw BoundExceeded( "brute force over " + std::to_string( n ) + " atoms exceeds the bound of " +
                             std::to_string( std::min( bound, max_brute_force_bound ) ) );

    MaskLayout layout{ n };
    std::vector< Assignment > out;
    const std::uint64_t end = std::uint64_t{ 1 } << n;

    if ( const auto* formula = std::get_if< CnfFormula >( &theory ) )
    {
        auto clauses = mask_clauses( *formula, layout );
        for ( std::uint64_t m = 0; m < end; ++m )
            if ( satisfies_all( clauses, m ) )
                out.push_back( layout.decode( m ) );
        return out;
    }

    const auto& program = std::get< Program >( theory );
    auto rules = mask_rules( program, layout );
    for ( std::uint64_t m = 0; m < end; ++m )
    {
        bool ok = semantics == Semantics::stable ? is_stable_mask( rules, m ) : rules_satisfied( rules, m );
        if ( ok )
            out.push_back( layout.decode( m ) );
    }
    return out;
}

AtomSet brute_consequences( const Theory& theory, Semantics semantics, std::size_t bound )
{
    AtomSet out = vocabulary_of( theory ).all();
    for ( const Assignment& m : enumerate_models( theory, semantics, bound ) )
        std::erase_if( out, [ & ]( Atom a ) { return !m.value( a ); } );
    return out;
}

AtomSet set_union( const AtomSet& a, const AtomSet& b )
{
    AtomSet out = a;
    out.insert( b.begin(), b.end() );
    return out;
}

AtomSet set_intersection( const AtomSet& a, const AtomSet& b )
{
    AtomSet out;
    std::set_intersection( a.begin(), a.end(), b.begin(), b.end(), std::inserter( out, out.end() ) );
    return out;
}

AtomSet set_difference( const AtomSet& a, const AtomSet& b )
{
    AtomSet out;
    std::set_difference( a.begin(), a.end(), b.begin(), b.end(), std::inserter( out, out.end() ) );
    return out;
}

bool is_subset( const AtomSet& a, const AtomSet& b )
{
    return std::includes( b.begin(), b.end(), a.begin(), a.end() );
}

bool is_consistent( std::span< const Literal > literals )
{
    LiteralSet seen( literals.begin(), literals.end() );
    return std::none_of( seen.begin(), seen.end(), [ & ]( Literal l ) { return seen.contains( ~l ); } );
}

} // namespace cautious
