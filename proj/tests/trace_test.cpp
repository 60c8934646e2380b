#include "test_support.hpp"

#include <cautious/runner.hpp>
#include <cautious/trace.hpp>

#include <frontend.hpp>

#include <gtest/gtest.h>

using namespace cautious;
using namespace cautious::testing;

namespace
{

bool has_check( const ValidationReport& r, std::string_view check )
{
    return std::any_of( r.violations.begin(), r.violations.end(), [ & ]( const Violation& v ) { return v.check == check; } );
}

struct Golden
{
    const char* file;
    Program program;
    GraphFamily family;
};

std::vector< Golden > goldens()
{
    return { { "under_p1.jsonl", p1(), GraphFamily::un() },
             { "chunk_p2.jsonl", p2(), GraphFamily::ch() },
             { "core_p1.jsonl", p1(), GraphFamily::fs() } };
}

} // namespace

TEST( GoldenTraces, Validate )
{
    for ( const Golden& g : goldens() )
    {
        Trace t = deserialize( read_data( g.file ), g.program.vocabulary );
        auto s = validate_structure( t, g.program, g.family );
        EXPECT_TRUE( s.ok ) << g.file << "\n" << s.to_string();
        auto m = validate_semantics( t, g.program, Semantics::stable );
        EXPECT_TRUE( m.ok ) << g.file << "\n" << m.to_string();
        // Without a family, any graph is accepted.
        EXPECT_TRUE( validate_structure( t, g.program ).ok );
    }
}

TEST( GoldenTraces, Lengths )
{
    Program p = p1();
    EXPECT_EQ( deserialize( read_data( "under_p1.jsonl" ), p.vocabulary ).size(), 9u );
    EXPECT_EQ( deserialize( read_data( "chunk_p2.jsonl" ), p2().vocabulary ).size(), 9u );
    EXPECT_EQ( deserialize( read_data( "core_p1.jsonl" ), p.vocabulary ).size(), 6u );
}

TEST( GoldenTraces, WrongFamilyIsRejected )
{
    Program p = p1();
    Trace t = deserialize( read_data( "under_p1.jsonl" ), p.vocabulary );
    auto r = validate_structure( t, p, GraphFamily::ov() );
    EXPECT_FALSE( r.ok );
    EXPECT_TRUE( has_check( r, "initial" ) );
    EXPECT_TRUE( has_check( r, "family" ) );
}

TEST( CorruptedTraces, WrongFindTarget )
{
    Program p = p1();
    const auto& v = p.vocabulary;
    Trace t = deserialize( read_data( "under_p1.jsonl" ), v );
    std::get< ControlState >( t[ 1 ].after ).over = v.all();
    auto r = validate_structure( t, p, GraphFamily::un() );
    EXPECT_FALSE( r.ok );
    EXPECT_TRUE( has_check( r, "apply" ) );
    EXPECT_EQ( r.violations.front().step, 1u );
}

TEST( CorruptedTraces, FindAfterANonModel )
{
    // The second call forbids c; answering with a model containing c and
    // taking Find instead of FailUnder is caught by the semantic check.
    Program p = p1();
    const auto& v = p.vocabulary;
    Trace t = deserialize( read_data( "under_p1.jsonl" ), v );
    Record fake = record( v, { "a", "-b", "c" } );
    std::get< CoreState >( t[ 3 ].after ).record = fake;
    std::get< CoreState >( t[ 4 ].before ).record = fake;
    t[ 4 ].rule = RuleId::Find;
    t[ 4 ].after = cautious::apply( RuleId::Find, t[ 4 ].before );
    t.resize( 5 );
    auto r = validate_semantics( t, p, Semantics::stable );
    EXPECT_FALSE( r.ok );
    EXPECT_TRUE( has_check( r, "model" ) );
}

TEST( CorruptedTraces, FailureWithModelAvailable )
{
    Program p = p1();
    const auto& v = p.vocabulary;
    Trace t = deserialize( read_data( "under_p1.jsonl" ), v );
    // Claim the unconstrained call failed.
    Record clash = record( v, { "a", "-a" } );
    std::get< CoreState >( t[ 0 ].after ).record = clash;
    t.resize( 1 );
    auto r = validate_semantics( t, p, Semantics::stable );
    EXPECT_TRUE( has_check( r, "no-model" ) );
}

TEST( CorruptedTraces, WrongAnswer )
{
    Program p = p1();
    const auto& v = p.vocabulary;
    Trace t = deserialize( read_data( "under_p1.jsonl" ), v );
    t.back().after = TerminalOk{ atoms( v, { "a", "c" } ) };
    EXPECT_TRUE( has_check( validate_semantics( t, p, Semantics::stable ), "solution" ) );
    EXPECT_TRUE( has_check( validate_structure( t, p, GraphFamily::un() ), "apply" ) );
}

TEST( CorruptedTraces, StructuralDefects )
{
    Program p = p1();
    const auto& v = p.vocabulary;
    Trace full = deserialize( read_data( "under_p1.jsonl" ), v );

    Trace cut = full;
    cut.pop_back();
    EXPECT_TRUE( has_check( validate_structure( cut, p ), "terminal" ) );

    Trace renumbered = full;
    renumbered[ 2 ].step = 7;
    EXPECT_TRUE( has_check( validate_structure( renumbered, p ), "step" ) );

    Trace gap = full;
    gap.erase( gap.begin() + 2 );
    EXPECT_TRUE( has_check( validate_structure( gap, p ), "path" ) );

    Trace core = deserialize( read_data( "core_p1.jsonl" ), v );
    // Cont is only a final state of the core graph.
    EXPECT_TRUE( has_check( validate_structure( core, p, GraphFamily::fs_then_ch() ), "terminal" ) );
}

TEST( Validation, EmptyTrace )
{
    EXPECT_TRUE( validate_structure( {}, Program{} ).ok );
    EXPECT_TRUE( validate_semantics( {}, Program{}, Semantics::stable ).ok );
    EXPECT_FALSE( validate_structure( {}, p1() ).ok );
}

TEST( Validation, BoundIsEnforced )
{
    Program p = p1();
    Trace t = deserialize( read_data( "under_p1.jsonl" ), p.vocabulary );
    EXPECT_THROW( (void)validate_semantics( t, p, Semantics::stable, 2 ), BoundExceeded );
}

TEST( Serialization, Format )
{
    Program p = p1();
    const auto& v = p.vocabulary;
    std::string text = read_data( "under_p1.jsonl" );
    Trace t = deserialize( text, v );
    std::string again = serialize( t, v );
    EXPECT_EQ( std::count( again.begin(), again.end(), '\n' ), 9 );
    EXPECT_EQ( again, text );
    EXPECT_EQ( serialize_state( TerminalOk{ atoms( v, { "c", "a" } ) }, v ), R"({"kind":"ok","witness":["a","c"]})" );
}

TEST( Serialization, StatsRoundTrip )
{
    Program p = p2();
    RunResult r = run( p, StrategyConfig{} );
    std::string text = serialize( r.trace, p.vocabulary );
    Trace back = deserialize( text, p.vocabulary );
    EXPECT_EQ( back, r.trace );
    EXPECT_NE( text.find( "\"stats\"" ), std::string::npos );
}

TEST( Serialization, RandomRunsRoundTrip )
{
    std::mt19937_64 rng( 81 );
    for ( int i = 0; i < 100; ++i )
    {
        Program p = random_small_program( rng, 9, 14 );
        for ( const std::string& name : frontend::default_bench_algorithms() )
        {
            StrategyConfig c = *frontend::bench_strategy_for( name );
            c.order = static_cast< CandidateOrder >( i % 3 );
            RunResult r = run( p, c );
            ASSERT_EQ( deserialize( serialize( r.trace, p.vocabulary ), p.vocabulary ), r.trace ) << name;
        }
    }
}

TEST( Serialization, ErrorsCarryLineNumbers )
{
    Program p = p1();
    const auto& v = p.vocabulary;
    std::string text = read_data( "under_p1.jsonl" );
    auto line_of = [ & ]( const std::string& s ) -> std::size_t {
        try
        {
            (void)deserialize( s, v );
        }
        catch ( const TraceFormatError& e )
        {
            return e.line;
        }
        return 0;
    };
    std::size_t third = text.find( '\n', text.find( '\n' ) + 1 ) + 1;

    std::string broken_json = text;
    broken_json.insert( third, "{not json\n" );
    EXPECT_EQ( line_of( broken_json ), 3u );

    std::string unknown_atom = text;
    unknown_atom.replace( unknown_atom.find( "\"a\"" ), 3, "\"zz\"" );
    EXPECT_EQ( line_of( unknown_atom ), 1u );

    std::string unknown_rule = text;
    unknown_rule.replace( unknown_rule.find( "\"Find\"" ), 6, "\"Lose\"" );
    EXPECT_EQ( line_of( unknown_rule ), 2u );

    std::string missing_field = "\n" + std::string( R"({"step":0,"rule":"Final","before":{"kind":"eval","over":[],"under":[]}})" );
    EXPECT_EQ( line_of( missing_field ), 2u );

    EXPECT_TRUE( deserialize( "\n\n", v ).empty() );
}

TEST( TraceProperties, RunnerTracesValidate )
{
    std::mt19937_64 rng( 82 );
    for ( int i = 0; i < 150; ++i )
    {
        const bool program = i % 4 != 3;
        Theory t = program ? Theory( random_small_program( rng, 10, 14 ) ) : Theory( random_small_cnf( rng, 12 ) );
        Semantics sem = program ? Semantics::stable : Semantics::classical;
        for ( const std::string& name : frontend::default_bench_algorithms() )
        {
            StrategyConfig c = *frontend::bench_strategy_for( name );
            c.oracle_kind = sem;
            c.order = CandidateOrder::shuffle;
            c.seed = static_cast< std::uint64_t >( i );
            RunResult r = run( t, c );
            auto s = validate_structure( r.trace, t, c.algorithm );
            ASSERT_TRUE( s.ok ) << name << "\n" << s.to_string();
            auto m = validate_semantics( r.trace, t, sem );
            ASSERT_TRUE( m.ok ) << name << "\n" << m.to_string();
        }
    }
}
