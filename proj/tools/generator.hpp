#pragma once

// Random instance generators: ground normal programs and uniform 3-CNF.

#include <cautious/logic.hpp>

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

namespace cautious::frontend
{

struct ProgramShape
{
    std::size_t atoms = 8;
    std::size_t rules = 12;
    /// Chance that a positive cycle is planted among the rules.
    double cycle_probability = 0.3;
    /// Chance that a rule is a constraint.
    double constraint_probability = 0.1;
    std::size_t max_body = 3;
};

/// Atoms are named p1..pN; the vocabulary holds exactly the atoms used, in
/// order of first occurrence.
[[nodiscard]] Program random_program( std::mt19937_64& rng, const ProgramShape& shape );

/// Variables v1..vN are all declared; clauses have three distinct variables.
[[nodiscard]] CnfFormula random_3cnf( std::mt19937_64& rng, std::size_t vars, std::size_t clauses );

enum class InstanceKind
{
    program,
    cnf,
};

/// Writes `count` instances named prog_0000.lp / cnf_0000.cnf into `dir`
/// (created if missing) and returns their paths. Output is a function of
/// the arguments only.
std::vector< std::filesystem::path > generate_instances( InstanceKind kind, std::size_t count, std::size_t atoms,
                                                         std::size_t rules_or_clauses, std::uint64_t seed,
                                                         const std::filesystem::path& dir );

} // namespace cautious::frontend
