#include "cautious/sat_solver.hpp"

#include <algorithm>
#include <cassert>

namespace cautious
{

bool SatSolver::VarOrder::before( const Activity& act, std::uint32_t a, std::uint32_t b )
{
    if ( act[ a ] != act[ b ] )
        return act[ a ] > act[ b ];
    return a < b;
}

void SatSolver::VarOrder::up( const Activity& act, std::size_t i )
{
    std::uint32_t v = _heap[ i ];
    while ( i > 0 )
    {
        std::size_t parent = ( i - 1 ) / 2;
        if ( !before( act, v, _heap[ parent ] ) )
            break;
        _heap[ i ] = _heap[ parent ];
        _index[ _heap[ i ] ] = static_cast< std::int32_t >( i );
        i = parent;
    }
    _heap[ i ] = v;
    _index[ v ] = static_cast< std::int32_t >( i );
}

void SatSolver::VarOrder::down( const Activity& act, std::size_t i )
{
    std::uint32_t v = _heap[ i ];
    while ( true )
    {
        std::size_t child = 2 * i + 1;
        if ( child >= _heap.size() )
            break;
        if ( child + 1 < _heap.size() && before( act, _heap[ child + 1 ], _heap[ child ] ) )
            ++child;
        if ( !before( act, _heap[ child ], v ) )
            break;
        _heap[ i ] = _heap[ child ];
        _index[ _heap[ i ] ] = static_cast< std::int32_t >( i );
        i = child;
    }
    _heap[ i ] = v;
    _index[ v ] = static_cast< std::int32_t >( i );
}

void SatSolver::VarOrder::insert( const Activity& act, std::uint32_t v )
{
    if ( contains( v ) )
        return;
    _index[ v ] = static_cast< std::int32_t >( _heap.size() );
    _heap.push_back( v );
    up( act, _heap.size() - 1 );
}

void SatSolver::VarOrder::increased( const Activity& act, std::uint32_t v )
{
    if ( contains( v ) )
        up( act, static_cast< std::size_t >( _index[ v ] ) );
}

std::uint32_t SatSolver::VarOrder::pop( const Activity& act )
{
    std::uint32_t top = _heap.front();
    _index[ top ] = -1;
    std::uint32_t last = _heap.back();
    _heap.pop_back();
    if ( !_heap.empty() )
    {
        _heap[ 0 ] = last;
        _index[ last ] = 0;
        down( act, 0 );
    }
    return top;
}

void SatSolver::ensure_vars( std::size_t n )
{
    if ( n <= _assigns.size() )
        return;
    std::size_t old = _assigns.size();
    _assigns.resize( n, Value::Undef );
    _phase.resize( n, false );
    _level.resize( n, 0 );
    _reason.resize( n, no_reason );
    _activity.resize( n, 0.0 );
    _seen.resize( n, false );
    _watches.resize( 2 * n );
    _order.grow( n );
    for ( std::size_t v = old; v < n; ++v )
        _order.insert( _activity, static_cast< std::uint32_t >( v ) );
}

Atom SatSolver::new_var()
{
    Atom a{ static_cast< std::uint32_t >( _assigns.size() ) };
    ensure_vars( _assigns.size() + 1 );
    return a;
}

void SatSolver::set_default_phase( Atom var, bool value )
{
    ensure_vars( var.id + 1 );
    _phase[ var.id ] = value;
}

void SatSolver::enqueue( Literal l, ClauseRef reason )
{
    assert( value( l ) == Value::Undef );
    _assigns[ l.atom().id ] = l.is_positive() ? Value::True : Value::False;
    _level[ l.atom().id ] = decision_level();
    _reason[ l.atom().id ] = reason;
    _trail.push_back( l );
}

SatSolver::ClauseRef SatSolver::attach( std::vector< Literal > lits, bool learnt )
{
    assert( lits.size() >= 2 );
    auto ref = static_cast< ClauseRef >( _clauses.size() );
    _watches[ ( ~lits[ 0 ] ).code() ].push_back( { ref, lits[ 1 ] } );
    _watches[ ( ~lits[ 1 ] ).code() ].push_back( { ref, lits[ 0 ] } );
    _clauses.push_back( { std::move( lits ), learnt } );
    return ref;
}

void SatSolver::add_clause( std::span< const Literal > literals )
{
    cancel_until( 0 );
    for ( Literal l : literals )
        ensure_vars( l.atom().id + 1 );
    if ( !_ok )
        return;

    std::vector< Literal > lits( literals.begin(), literals.end() );
    std::sort( lits.begin(), lits.end() );
    lits.erase( std::unique( lits.begin(), lits.end() ), lits.end() );

    std::vector< Literal > kept;
    for ( std::size_t i = 0; i < lits.size(); ++i )
    {
        if ( i + 1 < lits.size() && lits[ i + 1 ] == ~lits[ i ] )
            return; // tautology
        Value v = value( lits[ i ] );
        if ( v == Value::True )
            return;
        if ( v == Value::Undef )
            kept.push_back( lits[ i ] );
    }

    if ( kept.empty() )
    {
        _ok = false;
        return;
    }
    if ( kept.size() == 1 )
    {
        enqueue( kept[ 0 ], no_reason );
        if ( propagate() != no_reason )
            _ok = false;
        return;
    }
    attach( std::move( kept ), false );
}

SatSolver::ClauseRef SatSolver::propagate()
{
    ClauseRef conflict = no_reason;
    while ( _qhead < _trail.size() )
    {
        Literal p = _trail[ _qhead++ ];
        ++_stats.propagations;
        std::vector< Watcher >& ws = _watches[ p.code() ];
        Literal false_lit = ~p;
        std::size_t i = 0, j = 0;
        while ( i < ws.size() )
        {
            Watcher w = ws[ i ];
            if ( value( w.blocker ) == Value::True )
            {
                ws[ j++ ] = ws[ i++ ];
                continue;
            }
            std::vector< Literal >& c = _clauses[ w.clause ].lits;
            if ( c[ 0 ] == false_lit )
                std::swap( c[ 0 ], c[ 1 ] );
            ++i;
            Literal first = c[ 0 ];
            Watcher nw{ w.clause, first };
            if ( first != w.blocker && value( first ) == Value::True )
            {
                ws[ j++ ] = nw;
                continue;
            }
            bool moved = false;
            for ( std::size_t k = 2; k < c.size(); ++k )
            {
                if ( value( c[ k ] ) != Value::False )
                {
                    std::swap( c[ 1 ], c[ k ] );
                    _watches[ ( ~c[ 1 ] ).code() ].push_back( nw );
                    moved = true;
                    break;
                }
            }
            if ( moved )
                continue;
            ws[ j++ ] = nw;
            if ( value( first ) == Value::False )
            {
                conflict = w.clause;
                _qhead = _trail.size();
                while ( i < ws.size() )
                    ws[ j++ ] = ws[ i++ ];
            }
            else
                enqueue( first, w.clause );
        }
        ws.resize( j );
        if ( conflict != no_reason )
            break;
    }
    return conflict;
}

void SatSolver::bump( Atom var )
{
    if ( ( _activity[ var.id ] += _var_inc ) > 1e100 )
    {
        for ( double& a : _activity )
            a *= 1e-100;
        _var_inc *= 1e-100;
    }
    _order.increased( _activity, var.id );
}

void SatSolver::analyze( ClauseRef conflict, std::vector< Literal >& learnt, std::size_t& backtrack_level )
{
    learnt.clear();
    learnt.push_back( Literal{} ); // asserting literal, filled in below
    int path = 0;
    bool have_p = false;
    Literal p;
    std::size_t index = _trail.size();
    ClauseRef reason = conflict;

    do
    {
        assert( reason != no_reason );
        const std::vector< Literal >& c = _clauses[ reason ].lits;
        for ( std::size_t k = have_p ? 1 : 0; k < c.size(); ++k )
        {
            Literal q = c[ k ];
            std::uint32_t v = q.atom().id;
            if ( _seen[ v ] || _level[ v ] == 0 )
                continue;
            bump( q.atom() );
            _seen[ v ] = true;
            if ( _level[ v ] >= decision_level() )
                ++path;
            else
                learnt.push_back( q );
        }
        while ( !_seen[ _trail[ --index ].atom().id ] )
            ;
        p = _trail[ index ];
        have_p = true;
        reason = _reason[ p.atom().id ];
        _seen[ p.atom().id ] = false;
        --path;
    } while ( path > 0 );
    learnt[ 0 ] = ~p;

    // Drop literals implied by the rest of the clause through a single reason.
    std::vector< Literal > original = learnt;
    std::size_t out = 1;
    for ( std::size_t k = 1; k < learnt.size(); ++k )
    {
        ClauseRef r = _reason[ learnt[ k ].atom().id ];
        bool keep = true;
        if ( r != no_reason )
        {
            keep = false;
            const std::vector< Literal >& c = _clauses[ r ].lits;
            for ( std::size_t m = 1; m < c.size(); ++m )
            {
                std::uint32_t v = c[ m ].atom().id;
                if ( !_seen[ v ] && _level[ v ] > 0 )
                {
                    keep = true;
                    break;
                }
            }
        }
        if ( keep )
            learnt[ out++ ] = learnt[ k ];
    }
    learnt.resize( out );
    for ( Literal l : original )
        _seen[ l.atom().id ] = false;

    if ( learnt.size() == 1 )
        backtrack_level = 0;
    else
    {
        std::size_t best = 1;
        for ( std::size_t k = 2; k < learnt.size(); ++k )
            if ( _level[ learnt[ k ].atom().id ] > _level[ learnt[ best ].atom().id ] )
                best = k;
        std::swap( learnt[ 1 ], learnt[ best ] );
        backtrack_level = _level[ learnt[ 1 ].atom().id ];
    }
}

std::vector< Literal > SatSolver::analyze_final( Literal failed )
{
    std::vector< Literal > core{ failed };
    if ( decision_level() == 0 )
        return core;
    _seen[ failed.atom().id ] = true;
    for ( std::size_t i = _trail.size(); i-- > _trail_lim[ 0 ]; )
    {
        std::uint32_t v = _trail[ i ].atom().id;
        if ( !_seen[ v ] )
            continue;
        ClauseRef r = _reason[ v ];
        if ( r == no_reason )
            core.push_back( _trail[ i ] );
        else
        {
            const std::vector< Literal >& c = _clauses[ r ].lits;
            for ( std::size_t k = 1; k < c.size(); ++k )
                if ( _level[ c[ k ].atom().id ] > 0 )
                    _seen[ c[ k ].atom().id ] = true;
        }
        _seen[ v ] = false;
    }
    _seen[ failed.atom().id ] = false;
    return core;
}

void SatSolver::cancel_until( std::size_t level )
{
    if ( decision_level() <= level )
        return;
    for ( std::size_t i = _trail.size(); i-- > _trail_lim[ level ]; )
    {
        std::uint32_t v = _trail[ i ].atom().id;
        _phase[ v ] = _assigns[ v ] == Value::True;
        _assigns[ v ] = Value::Undef;
        _reason[ v ] = no_reason;
        _order.insert( _activity, v );
    }
    _trail.resize( _trail_lim[ level ] );
    _trail_lim.resize( level );
    _qhead = _trail.size();
}

void SatSolver::check_limits( std::uint64_t conflicts_this_solve )
{
    if ( _limits.conflicts_per_solve && conflicts_this_solve > *_limits.conflicts_per_solve )
    {
        cancel_until( 0 );
        throw ResourceLimitExceeded( "conflict budget exhausted" );
    }
    if ( _limits.deadline && std::chrono::steady_clock::now() >= *_limits.deadline )
    {
        cancel_until( 0 );
        throw ResourceLimitExceeded( "time limit reached" );
    }
}

SolveOutcome SatSolver::solve( std::span< const Literal > assumptions )
{
    ++_stats.solves;
    cancel_until( 0 );
    for ( Literal l : assumptions )
        ensure_vars( l.atom().id + 1 );
    if ( !_ok )
        return Incoherent{};

    std::uint64_t conflicts = 0;
    std::uint64_t since_restart = 0;
    double restart_limit = 100;
    std::vector< Literal > learnt;

    while ( true )
    {
        ClauseRef conflict = propagate();
        if ( conflict != no_reason )
        {
            ++_stats.conflicts;
            ++conflicts;
            ++since_restart;
            if ( decision_level() == 0 )
            {
                _ok = false;
                return Incoherent{};
            }
            std::size_t backtrack = 0;
            analyze( conflict, learnt, backtrack );
            cancel_until( backtrack );
            ++_stats.learned;
            if ( learnt.size() == 1 )
                enqueue( learnt[ 0 ], no_reason );
            else
            {
                Literal asserting = learnt[ 0 ];
                ClauseRef ref = attach( learnt, true );
                enqueue( asserting, ref );
            }
            decay();
            check_limits( conflicts );
            if ( since_restart >= restart_limit )
            {
                ++_stats.restarts;
                since_restart = 0;
                restart_limit *= 1.5;
                cancel_until( 0 );
            }
            continue;
        }

        std::optional< Literal > next;
        while ( decision_level() < assumptions.size() )
        {
            Literal a = assumptions[ decision_level() ];
            Value v = value( a );
            if ( v == Value::True )
            {
                _trail_lim.push_back( _trail.size() );
                continue;
            }
            if ( v == Value::False )
            {
                std::vector< Literal > core = analyze_final( a );
                cancel_until( 0 );
                return Incoherent{ std::move( core ) };
            }
            next = a;
            break;
        }
        if ( !next )
        {
            while ( !_order.empty() )
            {
                std::uint32_t v = _order.pop( _activity );
                if ( _assigns[ v ] == Value::Undef )
                {
                    next = Literal::make( Atom{ v }, _phase[ v ] );
                    break;
                }
            }
            if ( !next )
            {
                Assignment model( _assigns.size() );
                for ( std::uint32_t v = 0; v < _assigns.size(); ++v )
                    model.set( Atom{ v }, _assigns[ v ] == Value::True );
                cancel_until( 0 );
                return ModelFound{ std::move( model ) };
            }
            ++_stats.decisions;
        }
        _trail_lim.push_back( _trail.size() );
        enqueue( *next, no_reason );
    }
}

std::vector< Literal > minimize_core( SatSolver& solver, std::span< const Literal > core )
{
    std::vector< Literal > current( core.begin(), core.end() );
    std::size_t i = 0;
    while ( i < current.size() )
    {
        std::vector< Literal > trial;
        trial.reserve( current.size() - 1 );
        for ( std::size_t k = 0; k < current.size(); ++k )
            if ( k != i )
                trial.push_back( current[ k ] );
        SolveOutcome outcome = solver.solve( trial );
        if ( const auto* inc = std::get_if< Incoherent >( &outcome ) )
        {
            // Everything before position i was shown necessary and therefore
            // survives in the returned sub-core.
            LiteralSet keep( inc->core.begin(), inc->core.end() );
            std::erase_if( trial, [ & ]( Literal l ) { return !keep.contains( l ); } );
            current = std::move( trial );
        }
        else
            ++i;
    }
    return current;
}

} // namespace cautious
