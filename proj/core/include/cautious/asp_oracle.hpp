#pragma once

// Stable-model oracle: Clark completion solved by the CDCL engine, repaired
// for non-tight programs by lazily added loop formulas.

#include "cautious/logic.hpp"
#include "cautious/oracle.hpp"

#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace cautious
{

struct CompletionMap
{
    /// Program atoms keep their ids; auxiliary body atoms follow them.
    std::size_t program_atoms = 0;
    /// Per rule: the literal standing for its body, nullopt for an empty
    /// (always true) body.
    std::vector< std::optional< Literal > > body_literal;
    /// Per auxiliary atom (indexed from program_atoms): the defining rule.
    std::vector< std::size_t > aux_rule;

    [[nodiscard]] bool is_auxiliary( Atom a ) const { return a.id >= program_atoms; }
};

/// a <-> body(r1) | ... | body(rk) for every atom, one auxiliary atom per
/// multi-literal body, `not body` for every constraint.
[[nodiscard]] std::pair< CnfFormula, CompletionMap > clark_completion( const Program& program );

/// Strongly connected components of the positive dependency graph
/// (head -> positive body atom), sinks first.
[[nodiscard]] std::vector< std::vector< Atom > > positive_sccs( const Program& program );

[[nodiscard]] bool is_tight( const Program& program );

/// If some atom of `loop` is true, some rule supporting the loop from
/// outside must have a true body. Clauses are over the completion
/// vocabulary. Throws LogicError unless `loop` lies inside one positive SCC.
[[nodiscard]] std::vector< Clause > loop_nogood( const Program& program, const CompletionMap& map,
                                                 const AtomSet& loop );

/// Oracle_ASP.
class StableOracle final : public SatBackedOracle
{
public:
    explicit StableOracle( Program program );

    [[nodiscard]] Semantics semantics() const override { return Semantics::stable; }

    [[nodiscard]] const CompletionMap& completion() const { return _map; }
    [[nodiscard]] std::size_t loops_added() const { return _loops.size(); }

protected:
    SolveOutcome search( std::span< const Literal > assumptions ) override;

private:
    /// A bottom component of the unfounded part of a supported model;
    /// smallest first, ties by smallest atom id.
    [[nodiscard]] AtomSet violated_loop( const AtomSet& unfounded ) const;

    Program _program;
    CompletionMap _map;
    std::vector< std::size_t > _scc_of;
    std::vector< std::vector< Atom > > _dependencies; // head -> positive body atoms
    std::set< AtomSet > _loops;
};

/// Convenience form of StableOracle::solve with plain assumptions.
[[nodiscard]] SolveOutcome stable_solve( StableOracle& oracle, std::span< const Literal > assumptions );

} // namespace cautious
