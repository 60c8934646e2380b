#include "test_support.hpp"

#include <cautious/runner.hpp>

#include <frontend.hpp>

#include <gtest/gtest.h>

using namespace cautious;
using namespace cautious::testing;

namespace
{

StrategyConfig config( GraphFamily family, CandidateOrder order = CandidateOrder::ascending )
{
    StrategyConfig c;
    c.algorithm = std::move( family );
    c.order = order;
    return c;
}

ModelFound model( const SymbolTable& v, std::initializer_list< std::string_view > positive )
{
    return { assignment( v, positive ) };
}

Incoherent core( const SymbolTable& v, std::initializer_list< std::string_view > names )
{
    Record c = record( v, names );
    return { c };
}

const std::vector< std::string >& algorithm_names()
{
    static const std::vector< std::string > names{ "over",    "under",   "mixed",      "chunk-1", "chunk-2",
                                                   "chunk-50%", "core", "core-chunk", "core-chunk-1" };
    return names;
}

} // namespace

TEST( ChunkPolicy, SizeFor )
{
    EXPECT_EQ( ChunkPolicy::fixed( 3 ).size_for( 10 ), 3u );
    EXPECT_EQ( ChunkPolicy::fixed( 0 ).size_for( 10 ), 1u );
    EXPECT_EQ( ChunkPolicy::percent( 20 ).size_for( 10 ), 2u );
    EXPECT_EQ( ChunkPolicy::percent( 20 ).size_for( 11 ), 3u );
    EXPECT_EQ( ChunkPolicy::percent( 1 ).size_for( 3 ), 1u );
    EXPECT_EQ( ChunkPolicy::percent( 100 ).size_for( 7 ), 7u );
}

TEST( Selection, Examples )
{
    AtomSet o{ Atom{ 0 }, Atom{ 2 }, Atom{ 3 } };
    AtomSet u{ Atom{ 2 } };
    EXPECT_EQ( select_candidate( o, u, CandidateOrder::ascending ), Atom{ 0 } );
    EXPECT_EQ( select_candidate( o, u, CandidateOrder::descending ), Atom{ 3 } );
    EXPECT_THROW( (void)select_candidate( u, u, CandidateOrder::ascending ), LogicError );
    EXPECT_EQ( select_chunk( o, u, ChunkPolicy::fixed( 5 ), 4, CandidateOrder::ascending ), ( AtomSet{ Atom{ 0 }, Atom{ 3 } } ) );
    EXPECT_EQ( select_chunk( o, u, ChunkPolicy::fixed( 1 ), 4, CandidateOrder::descending ), AtomSet{ Atom{ 3 } } );
    EXPECT_EQ( select_chunk( o, {}, ChunkPolicy::percent( 50 ), 4, CandidateOrder::ascending ), ( AtomSet{ Atom{ 0 }, Atom{ 2 } } ) );
}

TEST( Selection, ShuffleIsSeeded )
{
    AtomSet all;
    for ( std::uint32_t i = 0; i < 20; ++i )
        all.insert( Atom{ i } );
    CandidateRanking a( 20, CandidateOrder::shuffle, 7 ), b( 20, CandidateOrder::shuffle, 7 ), c( 20, CandidateOrder::shuffle, 8 );
    EXPECT_EQ( a.sorted( all ), b.sorted( all ) );
    EXPECT_NE( a.sorted( all ), c.sorted( all ) );
    auto perm = a.sorted( all );
    EXPECT_EQ( AtomSet( perm.begin(), perm.end() ), all );
}

TEST( Runner, UnderOnRunningExample )
{
    Program p = p1();
    RunResult r = run( p, config( GraphFamily::un() ) );
    ASSERT_TRUE( r.consequences );
    EXPECT_EQ( *r.consequences, atoms( p.vocabulary, { "c" } ) );
    EXPECT_EQ( r.oracle_calls, 3u );
    EXPECT_TRUE( validate_structure( r.trace, p, GraphFamily::un() ).ok );
    EXPECT_TRUE( validate_semantics( r.trace, p, Semantics::stable ).ok );
}

TEST( Runner, ChunkOnSecondExample )
{
    Program p = p2();
    for ( auto order : { CandidateOrder::ascending, CandidateOrder::descending } )
    {
        RunResult r = run( p, config( GraphFamily::ch(), order ) );
        ASSERT_TRUE( r.consequences );
        EXPECT_EQ( *r.consequences, atoms( p.vocabulary, { "c", "d" } ) );
    }
}

TEST( Runner, OverOnFormula )
{
    CnfFormula f = f1();
    StrategyConfig c = config( GraphFamily::ov() );
    c.oracle_kind = Semantics::classical;
    RunResult r = run( f, c );
    ASSERT_TRUE( r.consequences );
    EXPECT_EQ( *r.consequences, atoms( f.vocabulary, { "v3" } ) );
    EXPECT_TRUE( validate_semantics( r.trace, f, Semantics::classical ).ok );
}

TEST( Runner, CoreOnRunningExampleStopsWithBracket )
{
    Program p = p1();
    RunResult r = run( p, config( GraphFamily::fs() ) );
    ASSERT_TRUE( r.bounds );
    EXPECT_EQ( r.bounds->second, atoms( p.vocabulary, { "c" } ) );
    EXPECT_TRUE( is_subset( r.bounds->second, r.bounds->first ) );
    EXPECT_TRUE( std::holds_alternative< TerminalCont >( r.trace.back().after ) );
}

TEST( Runner, EmptyVocabulary )
{
    RunResult r = run( Program{}, config( GraphFamily::un() ) );
    ASSERT_TRUE( r.consequences );
    EXPECT_TRUE( r.consequences->empty() );
    EXPECT_TRUE( r.trace.empty() );
    EXPECT_EQ( r.oracle_calls, 0u );
}

TEST( Runner, MixedScheduleMustFitGraph )
{
    StrategyConfig c = config( GraphFamily::mixed( { Technique::ov } ) );
    c.mixed_schedule = { Technique::un };
    EXPECT_THROW( (void)run( p1(), c ), LogicError );
}

TEST( Runner, MixedScheduleAlternates )
{
    Program p = p2();
    StrategyConfig c = config( GraphFamily::mixed( { Technique::ov, Technique::un } ) );
    c.mixed_schedule = { Technique::un, Technique::ov };
    RunResult r = run( p, c );
    ASSERT_TRUE( r.consequences );
    EXPECT_EQ( *r.consequences, atoms( p.vocabulary, { "c", "d" } ) );
    EXPECT_TRUE( std::holds_alternative< UnderEmptyAction >( std::get< CoreState >( r.trace.front().before ).action ) );
    EXPECT_TRUE( validate_structure( r.trace, p, c.algorithm ).ok );
}

TEST( ScriptedPaths, UnderOnP1 )
{
    Program p = p1();
    const auto& v = p.vocabulary;
    ScriptedOracle oracle( v, { model( v, { "a", "c" } ), Incoherent{}, model( v, { "b", "c" } ) } );
    RunResult r = run( p, config( GraphFamily::un(), CandidateOrder::descending ), oracle );
    Trace golden = deserialize( read_data( "under_p1.jsonl" ), v );
    EXPECT_EQ( path_difference( r.trace, golden, v ), "" );
    EXPECT_TRUE( oracle.exhausted() );
    ASSERT_EQ( oracle.queries.size(), 3u );
    EXPECT_EQ( oracle.queries[ 1 ].forbidden, ( std::vector< std::vector< Atom > >{ { atom( v, "c" ) } } ) );
}

TEST( ScriptedPaths, ChunkOnP2 )
{
    Program p = p2();
    const auto& v = p.vocabulary;
    ScriptedOracle oracle( v, { model( v, { "a", "c", "d" } ), Incoherent{}, model( v, { "b", "c", "d" } ) } );
    RunResult r = run( p, config( GraphFamily::ch(), CandidateOrder::descending ), oracle );
    Trace golden = deserialize( read_data( "chunk_p2.jsonl" ), v );
    EXPECT_EQ( path_difference( r.trace, golden, v ), "" );
    ASSERT_TRUE( r.consequences );
    EXPECT_EQ( *r.consequences, atoms( v, { "c", "d" } ) );
}

TEST( ScriptedPaths, CoreOnP1 )
{
    Program p = p1();
    const auto& v = p.vocabulary;
    // The core {-a, -b} arrives before any model, so the runner first asks
    // whether P1 has a model at all.
    ScriptedOracle oracle( v, { core( v, { "-c" } ), core( v, { "-a", "-b" } ), model( v, { "a", "c" } ) } );
    RunResult r = run( p, config( GraphFamily::fs() ), oracle );
    Trace golden = deserialize( read_data( "core_p1.jsonl" ), v );
    EXPECT_EQ( path_difference( r.trace, golden, v ), "" );
    ASSERT_EQ( oracle.queries.size(), 3u );
    EXPECT_TRUE( oracle.queries[ 2 ].assumptions.empty() );
    EXPECT_EQ( r.oracle_calls, 2u );
    ASSERT_TRUE( r.bounds );
    EXPECT_EQ( r.bounds->first, v.all() );
    EXPECT_EQ( r.bounds->second, atoms( v, { "c" } ) );
}

TEST( ScriptedPaths, EmptyCoreNamesOneLiteral )
{
    Program p = parse_program( "a :- not a. b." );
    const auto& v = p.vocabulary;
    ScriptedOracle oracle( v, { Incoherent{}, Incoherent{} } );
    RunResult r = run( p, config( GraphFamily::fs() ), oracle );
    ASSERT_TRUE( r.consequences );
    EXPECT_EQ( *r.consequences, v.all() );
    EXPECT_EQ( r.oracle_calls, 2u );
}

TEST( Runner, Interrupted )
{
    std::string text = pigeonhole_program( 7 );
    Program prog = parse_program( text );
    StrategyConfig c = config( GraphFamily::un() );
    c.conflicts_per_call = 5;
    try
    {
        (void)run( prog, c );
        FAIL() << "expected an interruption";
    }
    catch ( const RunInterrupted& e )
    {
        EXPECT_TRUE( is_subset( e.under, e.over ) );
        EXPECT_EQ( e.oracle_calls, 0u );
        EXPECT_TRUE( e.trace.empty() );
    }

    c.conflicts_per_call.reset();
    c.timeout = std::chrono::milliseconds( 0 );
    EXPECT_THROW( (void)run( prog, c ), RunInterrupted );
}

TEST( RunnerProperties, AllAlgorithmsAgreeWithBruteForce )
{
    std::mt19937_64 rng( 71 );
    for ( int i = 0; i < 200; ++i )
    {
        const bool program = i % 3 != 2;
        Theory t = program ? Theory( random_small_program( rng, 9, 14 ) ) : Theory( random_small_cnf( rng, 10 ) );
        Semantics sem = program ? Semantics::stable : Semantics::classical;
        AtomSet expected = brute_consequences( t, sem );
        for ( const std::string& name : algorithm_names() )
        {
            StrategyConfig c = *frontend::bench_strategy_for( name );
            c.oracle_kind = sem;
            c.order = static_cast< CandidateOrder >( i % 3 );
            c.seed = static_cast< std::uint64_t >( i );
            c.minimize_cores = ( i % 2 ) == 0;
            RunResult r = run( t, c );
            if ( r.consequences )
                ASSERT_EQ( *r.consequences, expected ) << name;
            else
            {
                ASSERT_EQ( c.algorithm.kind, GraphFamily::Kind::fs ) << name;
                ASSERT_TRUE( is_subset( r.bounds->second, expected ) );
                ASSERT_TRUE( is_subset( expected, r.bounds->first ) );
            }
            auto structure = validate_structure( r.trace, t, c.algorithm );
            ASSERT_TRUE( structure.ok ) << name << "\n" << structure.to_string();
            auto semantics = validate_semantics( r.trace, t, sem );
            ASSERT_TRUE( semantics.ok ) << name << "\n" << semantics.to_string();
        }
    }
}

TEST( RunnerProperties, IncoherentInputsYieldEveryAtom )
{
    std::vector< Theory > inputs{ parse_program( "a :- not a. b :- not c. c :- not b." ),
                                  parse_program( "a. :- a. b :- c." ),
                                  parse_dimacs( "p cnf 3 2\n1 0\n-1 0\n" ) };
    for ( const Theory& t : inputs )
    {
        Semantics sem = std::holds_alternative< CnfFormula >( t ) ? Semantics::classical : Semantics::stable;
        for ( const std::string& name : algorithm_names() )
        {
            StrategyConfig c = *frontend::bench_strategy_for( name );
            c.oracle_kind = sem;
            RunResult r = run( t, c );
            ASSERT_TRUE( r.consequences ) << name;
            EXPECT_EQ( *r.consequences, vocabulary_of( t ).all() ) << name;
        }
    }
}

TEST( RunnerProperties, DeterministicPerSeed )
{
    std::mt19937_64 rng( 72 );
    for ( int i = 0; i < 30; ++i )
    {
        Program p = random_small_program( rng, 9, 14 );
        StrategyConfig c = *frontend::bench_strategy_for( "chunk-2" );
        c.order = CandidateOrder::shuffle;
        c.seed = 99;
        RunResult a = run( p, c ), b = run( p, c );
        ASSERT_EQ( a.trace, b.trace );
    }
}

TEST( RunnerExamples, CoreClosesIncoherentInputsWithLargeCores )
{
    // The solver refutes pigeonhole with cores over several assumptions;
    // the runner must still name single literals once the input is known
    // to have no answer set.
    Program p = parse_program( pigeonhole_program( 3 ) );
    for ( bool minimize : { false, true } )
    {
        StrategyConfig c = *frontend::strategy_for( "core" );
        c.minimize_cores = minimize;
        RunResult r = run( p, c );
        ASSERT_TRUE( r.consequences );
        EXPECT_EQ( *r.consequences, p.vocabulary.all() );
        EXPECT_EQ( r.oracle_calls, p.vocabulary.size() );
        EXPECT_TRUE( validate_structure( r.trace, p, c.algorithm ).ok );
    }
}
