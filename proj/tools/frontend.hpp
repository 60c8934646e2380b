#pragma once

// Command-line layer: algorithm names, input loading, the subcommands and
// the benchmark harness.

#include <cautious/logic.hpp>
#include <cautious/runner.hpp>

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cautious::frontend
{

enum ExitCode : int
{
    exit_ok = 0,
    exit_parse_error = 1,
    exit_resource_limit = 2,
    exit_validation_failure = 3,
};

/// Strategy for one of the `--algo` names: over, under, mixed, chunk,
/// core, core-chunk.
[[nodiscard]] std::optional< StrategyConfig > strategy_for( std::string_view algo );

/// Strategy for a benchmark column name: the `--algo` names plus
/// chunk-K, chunk-P%, core-chunk-K and core-chunk-P%.
[[nodiscard]] std::optional< StrategyConfig > bench_strategy_for( std::string_view name );

[[nodiscard]] std::vector< std::string > default_bench_algorithms();

struct Instance
{
    Theory theory;
    Semantics semantics = Semantics::stable;
};

/// `.cnf` files are DIMACS read with classical semantics; anything else is
/// a ground program read with stable semantics. Throws ParseError.
[[nodiscard]] Instance load_instance( const std::filesystem::path& path );

/// Atom names in lexicographic order.
[[nodiscard]] std::vector< std::string > sorted_names( const AtomSet& atoms, const SymbolTable& vocabulary );

struct BenchRecord
{
    std::string instance;
    std::string algorithm;
    bool solved = false;
    std::uint64_t wall_time_ms = 0;
    std::uint64_t oracle_calls = 0;
    /// Count of consequences, or "lo:hi" = |U|:|O| when only a bracket is known.
    std::string consequences;
};

inline constexpr std::string_view bench_header = "instance,algorithm,solved,wall_time_ms,oracle_calls,consequences";

/// Runs every algorithm on every .lp / .cnf file of `dir` (sorted by name)
/// and writes the CSV to `csv`. Unparseable files produce one row with
/// algorithm "parse-error" and a warning on `log`.
std::vector< BenchRecord > run_bench( const std::filesystem::path& dir, const std::vector< std::string >& algorithms,
                                      std::optional< std::chrono::milliseconds > timeout, std::ostream& csv,
                                      std::ostream& log );

/// Entry point of the `cautious` executable. `args` excludes the program
/// name.
int run_cli( const std::vector< std::string >& args, std::ostream& out, std::ostream& err );

} // namespace cautious::frontend
