#include "frontend.hpp"

#include "generator.hpp"

#include <cautious/parsers.hpp>
#include <cautious/trace.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cautious::frontend
{

namespace
{

std::string read_file( const std::filesystem::path& path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw std::runtime_error( "cannot open " + path.string() );
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

std::optional< std::size_t > parse_count( std::string_view text )
{
    std::size_t value = 0;
    auto [ end, ec ] = std::from_chars( text.data(), text.data() + text.size(), value );
    if ( ec != std::errc{} || end != text.data() + text.size() || value == 0 )
        return std::nullopt;
    return value;
}

// "K" or "P%" after a chunk prefix.
std::optional< ChunkPolicy > parse_chunk_suffix( std::string_view suffix )
{
    if ( !suffix.empty() && suffix.back() == '%' )
    {
        auto p = parse_count( suffix.substr( 0, suffix.size() - 1 ) );
        if ( !p || *p > 100 )
            return std::nullopt;
        return ChunkPolicy::percent( *p );
    }
    auto k = parse_count( suffix );
    if ( !k )
        return std::nullopt;
    return ChunkPolicy::fixed( *k );
}

std::string join_names( const AtomSet& atoms, const SymbolTable& vocabulary )
{
    std::string out;
    for ( const std::string& name : sorted_names( atoms, vocabulary ) )
        out += ( out.empty() ? "" : " " ) + name;
    return out;
}

struct SolveOptions
{
    std::string file;
    std::string algo = "under";
    std::optional< std::size_t > chunk_size;
    std::optional< std::size_t > chunk_pct;
    std::string order = "asc";
    std::uint64_t seed = 0;
    std::string trace_path;
    bool check = false;
    std::optional< double > timeout;
    bool json = false;
    bool minimize_cores = false;
};

void add_solve_options( CLI::App& cmd, SolveOptions& o )
{
    cmd.add_option( "file", o.file, "Input file" )->required();
    cmd.add_option( "--algo", o.algo, "Algorithm" )
        ->check( CLI::IsMember( { "over", "under", "mixed", "chunk", "core", "core-chunk" } ) )
        ->capture_default_str();
    auto* size = cmd.add_option( "--chunk-size", o.chunk_size, "Fixed chunk size K" )->check( CLI::PositiveNumber );
    cmd.add_option( "--chunk-pct", o.chunk_pct, "Chunk size as P% of the initial candidates" )
        ->check( CLI::Range( 1, 100 ) )
        ->excludes( size );
    cmd.add_option( "--order", o.order, "Candidate order" )
        ->check( CLI::IsMember( { "asc", "desc", "shuffle" } ) )
        ->capture_default_str();
    cmd.add_option( "--seed", o.seed, "Seed of the shuffled order" );
    cmd.add_option( "--trace", o.trace_path, "Write the trace (JSON lines) to this path" );
    cmd.add_flag( "--check", o.check, "Validate the trace; semantic checks run when the vocabulary is small enough" );
    cmd.add_option( "--timeout", o.timeout, "Time limit in seconds" )->check( CLI::PositiveNumber );
    cmd.add_flag( "--json", o.json, "Print the result as JSON" );
    cmd.add_flag( "--minimize-cores", o.minimize_cores, "Shrink cores by deletion (core algorithms)" );
}

int write_text( const std::string& path, const std::string& text, std::ostream& err )
{
    std::ofstream file( path, std::ios::binary );
    file << text;
    if ( !file )
    {
        err << "error: cannot write " << path << '\n';
        return exit_parse_error;
    }
    return exit_ok;
}

int check_trace( const Trace& trace, const Instance& instance, std::optional< GraphFamily > family, std::ostream& err )
{
    ValidationReport structure = validate_structure( trace, instance.theory, family );
    bool ok = structure.ok;
    if ( !structure.ok )
        err << "structure violations:\n" << structure.to_string();
    if ( vocabulary_of( instance.theory ).size() <= default_brute_force_bound )
    {
        ValidationReport semantics = validate_semantics( trace, instance.theory, instance.semantics );
        ok = ok && semantics.ok;
        if ( !semantics.ok )
            err << "semantic violations:\n" << semantics.to_string();
    }
    else
        err << "note: semantic checks skipped (vocabulary above " << default_brute_force_bound << " atoms)\n";
    return ok ? exit_ok : exit_validation_failure;
}

void print_result( const SolveOptions& o, const SymbolTable& vocabulary, const std::optional< AtomSet >& exact,
                   const AtomSet& under, const AtomSet& over, std::uint64_t calls, std::uint64_t conflicts,
                   std::ostream& out )
{
    if ( o.json )
    {
        nlohmann::ordered_json j;
        j[ "algorithm" ] = o.algo;
        j[ "complete" ] = exact.has_value();
        if ( exact )
            j[ "consequences" ] = sorted_names( *exact, vocabulary );
        else
        {
            j[ "under" ] = sorted_names( under, vocabulary );
            j[ "over" ] = sorted_names( over, vocabulary );
        }
        j[ "oracle_calls" ] = calls;
        j[ "conflicts" ] = conflicts;
        out << j.dump() << '\n';
        return;
    }
    if ( exact )
    {
        for ( const std::string& name : sorted_names( *exact, vocabulary ) )
            out << name << '\n';
        return;
    }
    out << "INCOMPLETE\n";
    out << "U: " << join_names( under, vocabulary ) << '\n';
    out << "O: " << join_names( over, vocabulary ) << '\n';
}

int solve( const SolveOptions& o, bool dimacs, std::ostream& out, std::ostream& err )
{
    Instance instance;
    try
    {
        std::string text = read_file( o.file );
        if ( dimacs )
            instance = { parse_dimacs( text ), Semantics::classical };
        else
            instance = { parse_program( text ), Semantics::stable };
    }
    catch ( const ParseError& e )
    {
        err << o.file << ':' << e.diagnostic().to_string() << '\n';
        return exit_parse_error;
    }
    catch ( const std::runtime_error& e )
    {
        err << "error: " << e.what() << '\n';
        return exit_parse_error;
    }

    StrategyConfig config = *strategy_for( o.algo );
    if ( o.chunk_size )
        config.chunk_policy = ChunkPolicy::fixed( *o.chunk_size );
    if ( o.chunk_pct )
        config.chunk_policy = ChunkPolicy::percent( *o.chunk_pct );
    config.order = o.order == "desc"      ? CandidateOrder::descending
                   : o.order == "shuffle" ? CandidateOrder::shuffle
                                          : CandidateOrder::ascending;
    config.seed = o.seed;
    config.oracle_kind = instance.semantics;
    config.minimize_cores = o.minimize_cores;
    if ( o.timeout )
        config.timeout = std::chrono::milliseconds( static_cast< std::int64_t >( *o.timeout * 1000.0 ) );

    const SymbolTable& vocabulary = vocabulary_of( instance.theory );
    RunResult result;
    try
    {
        result = run( instance.theory, config );
    }
    catch ( const RunInterrupted& e )
    {
        if ( !o.trace_path.empty() )
            write_text( o.trace_path, serialize( e.trace, vocabulary ), err );
        err << "resource limit: " << e.what() << '\n';
        print_result( o, vocabulary, std::nullopt, e.under, e.over, e.oracle_calls, 0, out );
        return exit_resource_limit;
    }

    if ( !o.trace_path.empty() )
        if ( int code = write_text( o.trace_path, serialize( result.trace, vocabulary ), err ) )
            return code;

    if ( result.consequences )
        print_result( o, vocabulary, result.consequences, {}, {}, result.oracle_calls, result.conflicts, out );
    else
        print_result( o, vocabulary, std::nullopt, result.bounds->second, result.bounds->first, result.oracle_calls,
                      result.conflicts, out );

    if ( o.check )
        return check_trace( result.trace, instance, config.algorithm, err );
    return exit_ok;
}

std::string consequence_field( const RunResult& r )
{
    if ( r.consequences )
        return std::to_string( r.consequences->size() );
    return std::to_string( r.bounds->second.size() ) + ":" + std::to_string( r.bounds->first.size() );
}

constexpr const char* backbone_note =
    "Variables declared in the DIMACS header but used in no clause belong to\n"
    "the vocabulary. They are reported as backbone atoms only when the formula\n"
    "is unsatisfiable (every atom is then a consequence); for a satisfiable\n"
    "formula they are never backbone atoms.";

} // namespace

std::optional< StrategyConfig > strategy_for( std::string_view algo )
{
    StrategyConfig config;
    if ( algo == "over" )
        config.algorithm = GraphFamily::ov();
    else if ( algo == "under" )
        config.algorithm = GraphFamily::un();
    else if ( algo == "mixed" )
        config.algorithm = GraphFamily::mixed( { Technique::ov, Technique::un } );
    else if ( algo == "chunk" )
        config.algorithm = GraphFamily::ch();
    else if ( algo == "core" )
        config.algorithm = GraphFamily::fs();
    else if ( algo == "core-chunk" )
        config.algorithm = GraphFamily::fs_then_ch();
    else
        return std::nullopt;
    return config;
}

std::optional< StrategyConfig > bench_strategy_for( std::string_view name )
{
    if ( auto config = strategy_for( name ) )
        return config;
    for ( std::string_view prefix : { std::string_view( "core-chunk-" ), std::string_view( "chunk-" ) } )
    {
        if ( name.substr( 0, prefix.size() ) != prefix )
            continue;
        auto policy = parse_chunk_suffix( name.substr( prefix.size() ) );
        if ( !policy )
            return std::nullopt;
        StrategyConfig config = *strategy_for( prefix == "chunk-" ? "chunk" : "core-chunk" );
        config.chunk_policy = *policy;
        return config;
    }
    return std::nullopt;
}

std::vector< std::string > default_bench_algorithms()
{
    return { "over", "under", "mixed", "chunk-2", "chunk-20%", "core", "core-chunk" };
}

Instance load_instance( const std::filesystem::path& path )
{
    std::string text = read_file( path );
    if ( path.extension() == ".cnf" )
        return { parse_dimacs( text ), Semantics::classical };
    return { parse_program( text ), Semantics::stable };
}

std::vector< std::string > sorted_names( const AtomSet& atoms, const SymbolTable& vocabulary )
{
    std::vector< std::string > names;
    for ( Atom a : atoms )
        names.push_back( vocabulary.name( a ) );
    std::sort( names.begin(), names.end() );
    return names;
}

std::vector< BenchRecord > run_bench( const std::filesystem::path& dir, const std::vector< std::string >& algorithms,
                                      std::optional< std::chrono::milliseconds > timeout, std::ostream& csv,
                                      std::ostream& log )
{
    std::vector< std::pair< std::string, StrategyConfig > > strategies;
    for ( const std::string& name : algorithms )
    {
        auto config = bench_strategy_for( name );
        if ( !config )
            throw std::invalid_argument( "unknown algorithm '" + name + "'" );
        config->timeout = timeout;
        strategies.emplace_back( name, *config );
    }

    std::vector< std::filesystem::path > files;
    for ( const auto& entry : std::filesystem::directory_iterator( dir ) )
        if ( entry.is_regular_file() && ( entry.path().extension() == ".lp" || entry.path().extension() == ".cnf" ) )
            files.push_back( entry.path() );
    std::sort( files.begin(), files.end() );

    std::vector< BenchRecord > records;
    csv << bench_header << '\n';
    auto emit = [ & ]( BenchRecord r ) {
        csv << r.instance << ',' << r.algorithm << ',' << ( r.solved ? "true" : "false" ) << ',' << r.wall_time_ms
            << ',' << r.oracle_calls << ',' << r.consequences << '\n';
        records.push_back( std::move( r ) );
    };

    for ( const auto& path : files )
    {
        const std::string instance_name = path.filename().string();
        Instance instance;
        try
        {
            instance = load_instance( path );
        }
        catch ( const std::exception& e )
        {
            log << "warning: skipping " << path.string() << ": " << e.what() << '\n';
            emit( { instance_name, "parse-error", false, 0, 0, "" } );
            continue;
        }
        for ( auto [ name, config ] : strategies )
        {
            config.oracle_kind = instance.semantics;
            BenchRecord record{ instance_name, name, false, 0, 0, "" };
            auto start = std::chrono::steady_clock::now();
            try
            {
                RunResult result = run( instance.theory, config );
                auto elapsed = std::chrono::steady_clock::now() - start;
                record.solved = true;
                record.wall_time_ms =
                    static_cast< std::uint64_t >( std::chrono::duration_cast< std::chrono::milliseconds >( elapsed ).count() );
                record.oracle_calls = result.oracle_calls;
                record.consequences = consequence_field( result );
            }
            catch ( const RunInterrupted& e )
            {
                record.wall_time_ms = timeout ? static_cast< std::uint64_t >( timeout->count() ) : 0;
                record.oracle_calls = e.oracle_calls;
                record.consequences = std::to_string( e.under.size() ) + ":" + std::to_string( e.over.size() );
            }
            emit( std::move( record ) );
        }
    }
    return records;
}

int run_cli( const std::vector< std::string >& args, std::ostream& out, std::ostream& err )
{
    CLI::App app{ "Cautious consequences of ground normal programs and backbones of CNF formulas" };
    app.name( "cautious" );
    app.require_subcommand( 1 );

    SolveOptions cautious_opts;
    auto* cautious_cmd = app.add_subcommand( "cautious", "Cautious consequences of a ground program" );
    add_solve_options( *cautious_cmd, cautious_opts );

    SolveOptions backbone_opts;
    auto* backbone_cmd = app.add_subcommand( "backbone", "Backbone of a DIMACS CNF formula" );
    add_solve_options( *backbone_cmd, backbone_opts );
    backbone_cmd->footer( backbone_note );

    std::string trace_file, instance_file, validate_algo;
    auto* validate_cmd = app.add_subcommand( "validate", "Validate a trace against an instance" );
    validate_cmd->add_option( "trace", trace_file, "Trace file (JSON lines)" )->required();
    validate_cmd->add_option( "file", instance_file, "Instance (.cnf: DIMACS, otherwise a program)" )->required();
    validate_cmd->add_option( "--algo", validate_algo, "Also check the rules against this algorithm's graph" )
        ->check( CLI::IsMember( { "over", "under", "mixed", "chunk", "core", "core-chunk" } ) );

    std::string gen_kind = "random-program", gen_out = ".";
    std::size_t gen_count = 10, gen_atoms = 8, gen_size = 12;
    std::uint64_t gen_seed = 0;
    auto* gen_cmd = app.add_subcommand( "gen", "Generate random instances" );
    gen_cmd->add_option( "--kind", gen_kind, "Instance kind" )
        ->check( CLI::IsMember( { "random-program", "random-3cnf" } ) )
        ->capture_default_str();
    gen_cmd->add_option( "--count", gen_count, "Number of instances" )->capture_default_str();
    gen_cmd->add_option( "--atoms", gen_atoms, "Atoms (programs) or variables (CNF)" )->capture_default_str();
    gen_cmd->add_option( "--size", gen_size, "Rules (programs) or clauses (CNF)" )->capture_default_str();
    gen_cmd->add_option( "--seed", gen_seed, "Random seed" )->capture_default_str();
    gen_cmd->add_option( "--out", gen_out, "Output directory" )->capture_default_str();

    std::string bench_dir, bench_out;
    std::vector< std::string > bench_algos = default_bench_algorithms();
    std::optional< double > bench_timeout;
    auto* bench_cmd = app.add_subcommand( "bench", "Run algorithms over a directory of instances; CSV output" );
    bench_cmd->add_option( "dir", bench_dir, "Directory with .lp or .cnf files" )->required();
    bench_cmd->add_option( "--algos", bench_algos, "Algorithms (over, under, mixed, chunk-K, chunk-P%, core, "
                                                    "core-chunk, core-chunk-K, core-chunk-P%)" )
        ->delimiter( ',' );
    bench_cmd->add_option( "--timeout", bench_timeout, "Per-run time limit in seconds" )->check( CLI::PositiveNumber );
    bench_cmd->add_option( "--out", bench_out, "CSV path (default: standard output)" );

    std::vector< const char* > argv{ "cautious" };
    for ( const std::string& a : args )
        argv.push_back( a.c_str() );
    try
    {
        app.parse( static_cast< int >( argv.size() ), argv.data() );
    }
    catch ( const CLI::ParseError& e )
    {
        int code = app.exit( e, out, err );
        return code == 0 ? exit_ok : exit_parse_error;
    }

    if ( cautious_cmd->parsed() )
        return solve( cautious_opts, false, out, err );
    if ( backbone_cmd->parsed() )
        return solve( backbone_opts, true, out, err );

    if ( validate_cmd->parsed() )
    {
        Instance instance;
        Trace trace;
        try
        {
            instance = load_instance( instance_file );
            trace = deserialize( read_file( trace_file ), vocabulary_of( instance.theory ) );
        }
        catch ( const ParseError& e )
        {
            err << instance_file << ':' << e.diagnostic().to_string() << '\n';
            return exit_parse_error;
        }
        catch ( const std::runtime_error& e )
        {
            err << "error: " << e.what() << '\n';
            return exit_parse_error;
        }
        std::optional< GraphFamily > family;
        if ( !validate_algo.empty() )
            family = strategy_for( validate_algo )->algorithm;
        int code = check_trace( trace, instance, family, err );
        out << ( code == exit_ok ? "ok" : "invalid" ) << '\n';
        return code;
    }

    if ( gen_cmd->parsed() )
    {
        try
        {
            auto kind = gen_kind == "random-3cnf" ? InstanceKind::cnf : InstanceKind::program;
            for ( const auto& path : generate_instances( kind, gen_count, gen_atoms, gen_size, gen_seed, gen_out ) )
                out << path.string() << '\n';
        }
        catch ( const std::exception& e )
        {
            err << "error: " << e.what() << '\n';
            return exit_parse_error;
        }
        return exit_ok;
    }

    if ( bench_cmd->parsed() )
    {
        std::optional< std::chrono::milliseconds > timeout;
        if ( bench_timeout )
            timeout = std::chrono::milliseconds( static_cast< std::int64_t >( *bench_timeout * 1000.0 ) );
        try
        {
            if ( bench_out.empty() )
                run_bench( bench_dir, bench_algos, timeout, out, err );
            else
            {
                std::ofstream csv( bench_out, std::ios::binary );
                if ( !csv )
                    throw std::runtime_error( "cannot write " + bench_out );
                run_bench( bench_dir, bench_algos, timeout, csv, err );
            }
        }
        catch ( const std::exception& e )
        {
            err << "error: " << e.what() << '\n';
            return exit_parse_error;
        }
        return exit_ok;
    }
    return exit_parse_error;
}

} // namespace cautious::frontend
