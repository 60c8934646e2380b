#include "cautious/runner.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <numeric>
#include <random>

namespace cautious
{

namespace
{

constexpr std::array< RuleId, 7 > return_rules{
    RuleId::FailOver, RuleId::FailUnder, RuleId::FailChunk, RuleId::Find,
    RuleId::Fail1Pre, RuleId::Fail2Pre,  RuleId::FindPre,
};

std::vector< Technique > default_schedule( const GraphFamily& family )
{
    std::vector< Technique > out;
    for ( Technique t : { Technique::ov, Technique::un, Technique::ch } )
        if ( family.techniques.contains( t ) )
            out.push_back( t );
    return out;
}

// Inconsistent record for a failed call: the clashing pairs of the atoms
// the call constrained.
Record failure_record( const AtomSet& over, const Action& action, Atom fallback )
{
    std::vector< Atom > atoms;
    if ( std::holds_alternative< OverAction >( action ) )
        atoms.assign( over.begin(), over.end() );
    else if ( const auto* u = std::get_if< UnderAction >( &action ) )
        atoms.push_back( u->atom );
    else if ( const auto* c = std::get_if< ChunkAction >( &action ) )
        atoms.assign( c->n.begin(), c->n.end() );
    if ( atoms.empty() )
        atoms.push_back( fallback );
    Record out;
    for ( Atom a : atoms )
    {
        out.push_back( Literal::positive( a ) );
        out.push_back( Literal::negative( a ) );
    }
    return out;
}

class Driver
{
public:
    Driver( const Theory& base, const StrategyConfig& config, Oracle& oracle )
            : _config{ config },
              _oracle{ oracle },
              _atoms{ vocabulary_of( base ).all() },
              _ranking{ vocabulary_of( base ).size(), config.order, config.seed }
    {
        if ( _config.algorithm.kind == GraphFamily::Kind::mixed )
        {
            _schedule = _config.mixed_schedule.empty() ? default_schedule( _config.algorithm ) : _config.mixed_schedule;
            if ( _schedule.empty() )
                throw LogicError( "mixed graph needs at least one technique" );
            for ( Technique t : _schedule )
                if ( !_config.algorithm.techniques.contains( t ) )
                    throw LogicError( "mixed schedule uses a technique outside the graph" );
        }
        _chunk_size = _config.chunk_policy.size_for( _atoms.size() );
    }

    RunResult run()
    {
        if ( _atoms.empty() )
        {
            _result.consequences = AtomSet{};
            return std::move( _result );
        }

        SolverLimits limits;
        if ( _config.timeout )
            limits.deadline = std::chrono::steady_clock::now() + *_config.timeout;
        limits.conflicts_per_solve = _config.conflicts_per_call;
        _oracle.set_limits( limits );

        std::optional< Technique > start;
        if ( !_schedule.empty() )
            start = _schedule.front();
        _state = initial_state( _config.algorithm, _atoms, start );

        while ( step() )
        {
        }
        finish();
        return std::move( _result );
    }

private:
    bool step()
    {
        if ( auto* core = std::get_if< CoreState >( &_state ) )
        {
            if ( core->record.empty() )
                call_oracle( *core );
            else
                fire( unique_return_rule() );
            return true;
        }
        if ( const auto* control = std::get_if< ControlState >( &_state ) )
        {
            if ( control->over == control->under )
                fire( RuleId::Terminal );
            else
                refine( *control );
            return true;
        }
        if ( const auto* pre = std::get_if< PreState >( &_state ) )
        {
            fire( pre->n.empty() ? RuleId::Main : RuleId::Continue );
            return true;
        }
        if ( const auto* eval = std::get_if< EvalState >( &_state ) )
        {
            fire( eval->over == eval->under ? RuleId::Final : RuleId::NewSet );
            return true;
        }
        if ( const auto* cont = std::get_if< TerminalCont >( &_state ) )
        {
            if ( _config.algorithm.kind != GraphFamily::Kind::fs_then_ch )
                return false;
            if ( cont->over == cont->under )
                fire( RuleId::Terminal );
            else
            {
                // The chunk size of the combined method is taken from the
                // candidates left over by the core phase.
                _chunk_size = _config.chunk_policy.size_for( cont->over.size() - cont->under.size() );
                fire( RuleId::Chunk, select_chunk( cont->over, cont->under, _chunk_size, _ranking ) );
            }
            return true;
        }
        return false;
    }

    void refine( const ControlState& control )
    {
        Technique technique = Technique::ov;
        switch ( _config.algorithm.kind )
        {
        case GraphFamily::Kind::ov: technique = Technique::ov; break;
        case GraphFamily::Kind::un: technique = Technique::un; break;
        case GraphFamily::Kind::ch:
        case GraphFamily::Kind::fs_then_ch: technique = Technique::ch; break;
        case GraphFamily::Kind::mixed: technique = _schedule[ ++_schedule_pos % _schedule.size() ]; break;
        case GraphFamily::Kind::fs: throw LogicError( "core graph reached a control state" );
        }
        switch ( technique )
        {
        case Technique::ov: fire( RuleId::OverApprox ); break;
        case Technique::un: fire( RuleId::UnderApprox, select_candidate( control.over, control.under, _ranking ) ); break;
        case Technique::ch:
            fire( RuleId::Chunk, select_chunk( control.over, control.under, _chunk_size, _ranking ) );
            break;
        }
    }

    void call_oracle( const CoreState& core )
    {
        const bool core_action = std::holds_alternative< CoreAction >( core.action );
        OracleQuery query = oracle_query( core.over, core.under, core.action );

        SolverStats before = _oracle.stats();
        SolveOutcome outcome;
        try
        {
            outcome = _oracle.solve( query );
        }
        catch ( const ResourceLimitExceeded& e )
        {
            interrupt( e.what() );
        }
        ++_result.oracle_calls;

        Record record;
        if ( const auto* found = std::get_if< ModelFound >( &outcome ) )
        {
            _coherent = true;
            record = found->model.literals();
        }
        else if ( core_action )
        {
            std::vector< Literal > c = std::get< Incoherent >( outcome ).core;
            if ( _config.minimize_cores && c.size() > 1 )
            {
                std::uint64_t solves = _oracle.stats().solves;
                try
                {
                    c = _oracle.minimize_core( c );
                }
                catch ( const ResourceLimitExceeded& e )
                {
                    interrupt( e.what() );
                }
                _result.minimization_calls += _oracle.stats().solves - solves;
            }
            if ( c.size() > 1 && !base_coherent() )
                c.clear();
            if ( c.empty() )
            {
                // The base theory itself has no model; every subset of the
                // assumptions is a core, so name a single one.
                c.push_back( *std::get< CoreAction >( core.action ).n.begin() );
            }
            std::sort( c.begin(), c.end() );
            record = record_of_core( c );
        }
        else
            record = failure_record( core.over, core.action, *_atoms.begin() );

        SolverStats after = _oracle.stats();
        OracleStats stats{ after.conflicts - before.conflicts, after.decisions - before.decisions };
        fire( core_action ? RuleId::CoreOracle : RuleId::Oracle, std::move( record ), stats );
    }

    // Without a model of the base theory any single assumption is a core,
    // and naming one per call closes the bracket at the full vocabulary.
    bool base_coherent()
    {
        if ( _coherent )
            return *_coherent;
        std::uint64_t solves = _oracle.stats().solves;
        try
        {
            _coherent = std::holds_alternative< ModelFound >( _oracle.solve( OracleQuery{} ) );
        }
        catch ( const ResourceLimitExceeded& e )
        {
            interrupt( e.what() );
        }
        _result.minimization_calls += _oracle.stats().solves - solves;
        return *_coherent;
    }

    RuleId unique_return_rule() const
    {
        std::optional< RuleId > found;
        for ( RuleId r : return_rules )
            if ( applicable( r, _state ) )
            {
                if ( found )
                    throw LogicError( "two return rules apply" );
                found = r;
            }
        if ( !found )
            throw LogicError( "no return rule applies" );
        return *found;
    }

    void fire( RuleId rule, RuleInput input = {}, std::optional< OracleStats > stats = std::nullopt )
    {
        State next = apply( rule, _state, input );
        _result.trace.push_back( TraceEvent{ _result.trace.size(), rule, _state, next, stats } );
        _state = std::move( next );
    }

    [[noreturn]] void interrupt( const std::string& what )
    {
        _result.conflicts = _oracle.stats().conflicts;
        throw RunInterrupted( what, *over_of( _state ), *under_of( _state ), _result.oracle_calls,
                              std::move( _result.trace ) );
    }

    void finish()
    {
        _result.conflicts = _oracle.stats().conflicts;
        if ( const auto* ok = std::get_if< TerminalOk >( &_state ) )
            _result.consequences = ok->witness;
        else if ( const auto* cont = std::get_if< TerminalCont >( &_state ) )
        {
            if ( cont->over == cont->under )
                _result.consequences = cont->over;
            else
                _result.bounds.emplace( cont->over, cont->under );
        }
    }

    const StrategyConfig& _config;
    Oracle& _oracle;
    AtomSet _atoms;
    CandidateRanking _ranking;
    std::vector< Technique > _schedule;
    std::size_t _schedule_pos = 0;
    std::size_t _chunk_size = 1;
    State _state;
    RunResult _result;
    /// Set once some call has returned a model, or the base theory has been
    /// checked directly.
    std::optional< bool > _coherent;
};

} // namespace

std::size_t ChunkPolicy::size_for( std::size_t candidate_count ) const
{
    std::size_t size = value;
    if ( kind == Kind::percent )
        size = ( value * candidate_count + 99 ) / 100;
    return std::max< std::size_t >( size, 1 );
}

CandidateRanking::CandidateRanking( std::size_t atom_count, CandidateOrder order, std::uint64_t seed )
        : _rank( atom_count )
{
    std::vector< std::uint32_t > atoms( atom_count );
    std::iota( atoms.begin(), atoms.end(), 0 );
    if ( order == CandidateOrder::descending )
        std::reverse( atoms.begin(), atoms.end() );
    else if ( order == CandidateOrder::shuffle )
    {
        // Fisher-Yates with an explicit draw so the permutation does not
        // depend on the standard library's shuffle.
        std::mt19937_64 rng( seed );
        for ( std::size_t i = atom_count; i > 1; --i )
            std::swap( atoms[ i - 1 ], atoms[ rng() % i ] );
    }
    for ( std::uint32_t pos = 0; pos < atom_count; ++pos )
        _rank[ atoms[ pos ] ] = pos;
}

std::vector< Atom > CandidateRanking::sorted( const AtomSet& set ) const
{
    std::vector< Atom > out( set.begin(), set.end() );
    std::sort( out.begin(), out.end(), [ this ]( Atom a, Atom b ) { return _rank.at( a.id ) < _rank.at( b.id ); } );
    return out;
}

Atom select_candidate( const AtomSet& over, const AtomSet& under, const CandidateRanking& ranking )
{
    AtomSet candidates = set_difference( over, under );
    if ( candidates.empty() )
        throw LogicError( "select_candidate: no candidate left" );
    return ranking.sorted( candidates ).front();
}

Atom select_candidate( const AtomSet& over, const AtomSet& under, CandidateOrder order )
{
    std::size_t n = over.empty() ? 0 : over.rbegin()->id + 1;
    return select_candidate( over, under, CandidateRanking( n, order ) );
}

AtomSet select_chunk( const AtomSet& over, const AtomSet& under, std::size_t size, const CandidateRanking& ranking )
{
    AtomSet candidates = set_difference( over, under );
    if ( candidates.empty() )
        throw LogicError( "select_chunk: no candidate left" );
    std::vector< Atom > ordered = ranking.sorted( candidates );
    ordered.resize( std::min( std::max< std::size_t >( size, 1 ), ordered.size() ) );
    return { ordered.begin(), ordered.end() };
}

AtomSet select_chunk( const AtomSet& over, const AtomSet& under, const ChunkPolicy& policy, std::size_t initial_count,
                      CandidateOrder order )
{
    std::size_t n = over.empty() ? 0 : over.rbegin()->id + 1;
    return select_chunk( over, under, policy.size_for( initial_count ), CandidateRanking( n, order ) );
}

RunInterrupted::RunInterrupted( const std::string& what, AtomSet o, AtomSet u, std::uint64_t calls, Trace t )
        : ResourceLimitExceeded{ what },
          over{ std::move( o ) },
          under{ std::move( u ) },
          oracle_calls{ calls },
          trace{ std::move( t ) }
{
}

RunResult run( const Theory& base, const StrategyConfig& config )
{
    std::unique_ptr< Oracle > oracle = make_oracle( base, config.oracle_kind );
    return run( base, config, *oracle );
}

RunResult run( const Theory& base, const StrategyConfig& config, Oracle& oracle )
{
    return Driver( base, config, oracle ).run();
}

} // namespace cautious
