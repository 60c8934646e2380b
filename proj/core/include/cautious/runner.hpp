#pragma once

// Drives a solver graph from its initial state to a terminal state,
// resolving every choice deterministically.

#include "cautious/logic.hpp"
#include "cautious/oracle.hpp"
#include "cautious/trace.hpp"
#include "cautious/transitions.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace cautious
{

struct ChunkPolicy
{
    enum class Kind
    {
        fixed,
        percent,
    };

    Kind kind = Kind::fixed;
    std::size_t value = 2;

    static ChunkPolicy fixed( std::size_t k ) { return { Kind::fixed, k }; }
    static ChunkPolicy percent( std::size_t p ) { return { Kind::percent, p }; }

    /// Chunk size for the given candidate count: k, or ceil(p * count / 100);
    /// never below 1.
    [[nodiscard]] std::size_t size_for( std::size_t candidate_count ) const;
};

enum class CandidateOrder
{
    ascending,
    descending,
    shuffle,
};

/// Ranking of atoms used to pick candidates: by id, by reverse id, or by a
/// seeded permutation.
class CandidateRanking
{
    std::vector< std::uint32_t > _rank; // atom id -> position

public:
    CandidateRanking( std::size_t atom_count, CandidateOrder order, std::uint64_t seed = 0 );

    /// The atoms of `set` in ranking order.
    [[nodiscard]] std::vector< Atom > sorted( const AtomSet& set ) const;
};

[[nodiscard]] Atom select_candidate( const AtomSet& over, const AtomSet& under, const CandidateRanking& ranking );
[[nodiscard]] Atom select_candidate( const AtomSet& over, const AtomSet& under, CandidateOrder order );

/// The first min(size, |O \ U|) candidates in ranking order.
[[nodiscard]] AtomSet select_chunk( const AtomSet& over, const AtomSet& under, std::size_t size,
                                    const CandidateRanking& ranking );
[[nodiscard]] AtomSet select_chunk( const AtomSet& over, const AtomSet& under, const ChunkPolicy& policy,
                                    std::size_t initial_count, CandidateOrder order );

struct StrategyConfig
{
    GraphFamily algorithm = GraphFamily::un();
    ChunkPolicy chunk_policy = ChunkPolicy::fixed( 2 );
    CandidateOrder order = CandidateOrder::ascending;
    std::uint64_t seed = 0;
    Semantics oracle_kind = Semantics::stable;
    /// Mixed graphs: techniques used at successive control states, cycled;
    /// the first one also picks the initial state. Empty means the
    /// techniques of the graph in the order over, under, chunk.
    std::vector< Technique > mixed_schedule;
    /// Shrink every core by deletion before it is recorded.
    bool minimize_cores = false;
    std::optional< std::chrono::milliseconds > timeout;
    std::optional< std::uint64_t > conflicts_per_call;
};

struct RunResult
{
    /// Set when the run established the exact answer: it ended in Ok(W),
    /// or in Cont(O, U) with O = U.
    std::optional< AtomSet > consequences;
    /// Set otherwise: the (O, U) of the final Cont state.
    std::optional< std::pair< AtomSet, AtomSet > > bounds;
    /// Oracle / CoreOracle firings.
    std::uint64_t oracle_calls = 0;
    /// Extra oracle calls spent on core minimization and on checking whether
    /// the base theory has a model at all.
    std::uint64_t minimization_calls = 0;
    std::uint64_t conflicts = 0;
    Trace trace;
};

/// Thrown when the oracle runs out of budget; carries the bracket reached
/// so far (U within the answer within O) and the partial trace.
struct RunInterrupted : ResourceLimitExceeded
{
    AtomSet over;
    AtomSet under;
    std::uint64_t oracle_calls = 0;
    Trace trace;

    RunInterrupted( const std::string& what, AtomSet o, AtomSet u, std::uint64_t calls, Trace t );
};

/// Runs the configured graph on `base` with an oracle built from
/// `config.oracle_kind`.
[[nodiscard]] RunResult run( const Theory& base, const StrategyConfig& config );

/// Same, with a caller-supplied oracle for `base`.
[[nodiscard]] RunResult run( const Theory& base, const StrategyConfig& config, Oracle& oracle );

} // namespace cautious
