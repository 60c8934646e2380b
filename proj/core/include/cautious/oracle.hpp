#pragma once

// Oracle calls of the abstract solver graphs: "give me a model of the base
// theory extended with these per-call constraints, or tell me it has none".

#include "cautious/logic.hpp"
#include "cautious/sat_solver.hpp"

#include <memory>
#include <span>
#include <vector>

namespace cautious
{

struct OracleQuery
{
    /// Literals every returned model must satisfy; cores are drawn from these.
    std::vector< Literal > assumptions;
    /// Each group G stands for the constraint `:- G.` (not all of G true).
    std::vector< std::vector< Atom > > forbidden;
};

/// Answers queries against one fixed base theory. Work (learned clauses,
/// activities) carries over between calls of the same instance.
class Oracle
{
public:
    virtual ~Oracle() = default;

    /// ModelFound assigns exactly the base vocabulary. Incoherent cores are
    /// subsets of `query.assumptions`.
    [[nodiscard]] virtual SolveOutcome solve( const OracleQuery& query ) = 0;

    [[nodiscard]] virtual Semantics semantics() const = 0;
    [[nodiscard]] virtual const SymbolTable& vocabulary() const = 0;
    [[nodiscard]] virtual SolverStats stats() const = 0;
    virtual void set_limits( SolverLimits limits ) = 0;

    /// Deletion-based shrinking of an assumption core.
    [[nodiscard]] std::vector< Literal > minimize_core( std::span< const Literal > core );
};

/// Shared plumbing for oracles running on top of one SatSolver session:
/// forbidden groups become clauses guarded by fresh selector atoms which
/// are assumed for one call and retired afterwards.
class SatBackedOracle : public Oracle
{
public:
    [[nodiscard]] SolveOutcome solve( const OracleQuery& query ) final;
    [[nodiscard]] const SymbolTable& vocabulary() const final { return _vocabulary; }
    [[nodiscard]] SolverStats stats() const final { return _solver.stats(); }
    void set_limits( SolverLimits limits ) final { _solver.set_limits( limits ); }

    [[nodiscard]] const SatSolver& solver() const { return _solver; }

protected:
    explicit SatBackedOracle( SymbolTable vocabulary ) : _vocabulary{ std::move( vocabulary ) } {}

    /// Solves under the given solver-level assumptions; may refine the
    /// clause database. Returned models may include auxiliary atoms.
    virtual SolveOutcome search( std::span< const Literal > assumptions ) = 0;

    SatSolver _solver;
    SymbolTable _vocabulary;
};

/// Oracle_SAT: classical models of a CNF formula or of a program read as
/// clauses.
class ClassicalOracle final : public SatBackedOracle
{
public:
    explicit ClassicalOracle( const Theory& theory );
    [[nodiscard]] Semantics semantics() const override { return Semantics::classical; }

protected:
    SolveOutcome search( std::span< const Literal > assumptions ) override;
};

[[nodiscard]] std::unique_ptr< Oracle > make_oracle( const Theory& theory, Semantics semantics );

} // namespace cautious
