#include "cautious/transitions.hpp"

#include <algorithm>
#include <array>
#include <iterator>

namespace cautious
{

namespace
{

constexpr std::array< std::string_view, rule_count > rule_names{
    "Oracle",      "CoreOracle", "FailOver", "FailUnder", "FailChunk", "Find",
    "Terminal",    "OverApprox", "UnderApprox", "Chunk", "Fail1Pre", "Fail2Pre",
    "FindPre",     "Main",       "Continue", "NewSet",    "Final",
};

template< typename... Ts >
struct overloaded : Ts...
{
    using Ts::operator()...;
};

bool is_core_action( const Action& a ) { return std::holds_alternative< CoreAction >( a ); }

AtomSet gap( const AtomSet& over, const AtomSet& under ) { return set_difference( over, under ); }

LiteralSet negated( const AtomSet& atoms )
{
    LiteralSet out;
    for ( Atom a : atoms )
        out.insert( Literal::negative( a ) );
    return out;
}

bool duplicate_free( const Record& record )
{
    LiteralSet seen( record.begin(), record.end() );
    return seen.size() == record.size();
}

LiteralSet intersect( const LiteralSet& a, const LiteralSet& b )
{
    LiteralSet out;
    std::set_intersection( a.begin(), a.end(), b.begin(), b.end(), std::inserter( out, out.end() ) );
    return out;
}

// Oracle result shape accepted by Oracle/CoreOracle: nonempty,
// duplicate-free; an inconsistent result of CoreOracle must have its hat
// inside N.
bool acceptable_result( const CoreState& s, const Record& r )
{
    if ( r.empty() || !duplicate_free( r ) )
        return false;
    if ( const auto* core = std::get_if< CoreAction >( &s.action ); core && !is_consistent_record( r ) )
    {
        LiteralSet hat = record_hat( r );
        return !hat.empty() && std::includes( core->n.begin(), core->n.end(), hat.begin(), hat.end() );
    }
    return true;
}

} // namespace

std::string_view rule_name( RuleId rule ) { return rule_names.at( static_cast< std::size_t >( rule ) ); }

std::optional< RuleId > rule_from_name( std::string_view name )
{
    for ( std::size_t i = 0; i < rule_names.size(); ++i )
        if ( rule_names[ i ] == name )
            return static_cast< RuleId >( i );
    return std::nullopt;
}

std::set< RuleId > rules_of( const GraphFamily& family )
{
    using R = RuleId;
    const std::set< R > ov{ R::Oracle, R::FailOver, R::Find, R::Terminal, R::OverApprox };
    const std::set< R > un{ R::Oracle, R::FailUnder, R::Find, R::Terminal, R::UnderApprox };
    const std::set< R > ch{ R::Oracle, R::FailChunk, R::Find, R::Terminal, R::Chunk };
    const std::set< R > in{ R::CoreOracle, R::Fail1Pre, R::Fail2Pre, R::FindPre,
                            R::Main,       R::Continue, R::NewSet,   R::Final };
    auto join = []( std::set< R > a, const std::set< R >& b ) {
        a.insert( b.begin(), b.end() );
        return a;
    };
    switch ( family.kind )
    {
    case GraphFamily::Kind::ov: return ov;
    case GraphFamily::Kind::un: return un;
    case GraphFamily::Kind::ch: return ch;
    case GraphFamily::Kind::fs: return in;
    case GraphFamily::Kind::fs_then_ch: return join( in, ch );
    case GraphFamily::Kind::mixed:
    {
        std::set< R > out;
        if ( family.techniques.contains( Technique::ov ) )
            out = join( out, ov );
        if ( family.techniques.contains( Technique::un ) )
            out = join( out, un );
        if ( family.techniques.contains( Technique::ch ) )
            out = join( out, ch );
        return out;
    }
    }
    return {};
}

Action initial_action( Technique technique )
{
    switch ( technique )
    {
    case Technique::ov: return OverAction{};
    case Technique::un: return UnderEmptyAction{};
    case Technique::ch: return ChunkStartAction{};
    }
    return OverAction{};
}

State initial_state( const GraphFamily& family, const AtomSet& atoms, std::optional< Technique > mixed_start )
{
    switch ( family.kind )
    {
    case GraphFamily::Kind::ov: return CoreState{ {}, atoms, {}, OverAction{} };
    case GraphFamily::Kind::un: return CoreState{ {}, atoms, {}, UnderEmptyAction{} };
    case GraphFamily::Kind::ch: return CoreState{ {}, atoms, {}, ChunkStartAction{} };
    case GraphFamily::Kind::fs:
    case GraphFamily::Kind::fs_then_ch: return CoreState{ {}, atoms, {}, CoreAction{ negated( atoms ) } };
    case GraphFamily::Kind::mixed:
    {
        if ( family.techniques.empty() )
            throw LogicError( "mixed graph needs at least one technique" );
        Technique start = mixed_start.value_or( *family.techniques.begin() );
        if ( !family.techniques.contains( start ) )
            throw LogicError( "mixed graph does not contain the requested initial technique" );
        return CoreState{ {}, atoms, {}, initial_action( start ) };
    }
    }
    return TerminalOk{};
}

bool applicable( RuleId rule, const State& state, const RuleInput& input )
{
    const auto* core = std::get_if< CoreState >( &state );
    const auto* control = std::get_if< ControlState >( &state );
    const auto* pre = std::get_if< PreState >( &state );
    const auto* eval = std::get_if< EvalState >( &state );
    const auto* cont = std::get_if< TerminalCont >( &state );

    const bool no_input = std::holds_alternative< std::monostate >( input );
    // Return rules read the record already in the core state.
    const bool returned = core && !core->record.empty();
    const bool consistent = returned && is_consistent_record( core->record );

    switch ( rule )
    {
    case RuleId::Oracle:
    case RuleId::CoreOracle:
    {
        const auto* result = std::get_if< Record >( &input );
        if ( !core || !core->record.empty() || !result )
            return false;
        if ( is_core_action( core->action ) != ( rule == RuleId::CoreOracle ) )
            return false;
        return acceptable_result( *core, *result );
    }
    case RuleId::FailOver:
        return no_input && returned && !consistent && std::holds_alternative< OverAction >( core->action );
    case RuleId::FailUnder:
        return no_input && returned && !consistent &&
               ( std::holds_alternative< UnderEmptyAction >( core->action ) ||
                 std::holds_alternative< UnderAction >( core->action ) );
    case RuleId::FailChunk:
        return no_input && returned && !consistent &&
               ( std::holds_alternative< ChunkStartAction >( core->action ) ||
                 std::holds_alternative< ChunkAction >( core->action ) );
    case RuleId::Find: return no_input && returned && consistent && !is_core_action( core->action );
    case RuleId::FindPre: return no_input && returned && consistent && is_core_action( core->action );
    case RuleId::Fail1Pre:
    case RuleId::Fail2Pre:
    {
        if ( !no_input || !returned || consistent || !is_core_action( core->action ) )
            return false;
        LiteralSet common = intersect( record_hat( core->record ), std::get< CoreAction >( core->action ).n );
        if ( rule == RuleId::Fail1Pre )
            return common.size() == 1 && common.begin()->is_negative();
        return common.size() > 1;
    }
    case RuleId::Terminal:
        if ( !no_input )
            return false;
        if ( control )
            return control->over == control->under;
        return cont && cont->over == cont->under;
    case RuleId::OverApprox: return no_input && control && control->over != control->under;
    case RuleId::UnderApprox:
    {
        const auto* a = std::get_if< Atom >( &input );
        return control && a && control->over.contains( *a ) && !control->under.contains( *a );
    }
    case RuleId::Chunk:
    {
        const auto* n = std::get_if< AtomSet >( &input );
        if ( !n || n->empty() || !( control || cont ) )
            return false;
        const AtomSet& o = control ? control->over : cont->over;
        const AtomSet& u = control ? control->under : cont->under;
        return is_subset( *n, gap( o, u ) );
    }
    case RuleId::Main: return no_input && pre && pre->n.empty();
    case RuleId::Continue: return no_input && pre && !pre->n.empty();
    case RuleId::NewSet: return no_input && eval && eval->over != eval->under;
    case RuleId::Final: return no_input && eval && eval->over == eval->under;
    }
    return false;
}

State apply( RuleId rule, const State& state, const RuleInput& input )
{
    if ( !applicable( rule, state, input ) )
        throw LogicError( "rule " + std::string( rule_name( rule ) ) + " is not applicable" );

    switch ( rule )
    {
    case RuleId::Oracle:
    case RuleId::CoreOracle:
    {
        CoreState next = std::get< CoreState >( state );
        next.record = std::get< Record >( input );
        return next;
    }
    case RuleId::FailOver:
    {
        const auto& s = std::get< CoreState >( state );
        return ControlState{ s.over, s.over, s.action };
    }
    case RuleId::FailUnder:
    {
        const auto& s = std::get< CoreState >( state );
        AtomSet under = s.under;
        if ( const auto* a = std::get_if< UnderAction >( &s.action ) )
            under.insert( a->atom );
        return ControlState{ s.over, std::move( under ), s.action };
    }
    case RuleId::FailChunk:
    {
        // O is kept: removing N from O as well would break U within O.
        const auto& s = std::get< CoreState >( state );
        AtomSet under = s.under;
        if ( const auto* c = std::get_if< ChunkAction >( &s.action ) )
            under.insert( c->n.begin(), c->n.end() );
        return ControlState{ s.over, std::move( under ), s.action };
    }
    case RuleId::Find:
    {
        const auto& s = std::get< CoreState >( state );
        return ControlState{ set_intersection( s.over, positive_part( s.record ) ), s.under, s.action };
    }
    case RuleId::FindPre:
    {
        const auto& s = std::get< CoreState >( state );
        return EvalState{ set_intersection( s.over, positive_part( s.record ) ), s.under };
    }
    case RuleId::Fail1Pre:
    {
        const auto& s = std::get< CoreState >( state );
        LiteralSet n = std::get< CoreAction >( s.action ).n;
        Literal l = *intersect( record_hat( s.record ), n ).begin();
        n.erase( l );
        AtomSet under = s.under;
        under.insert( l.atom() );
        return PreState{ std::move( n ), s.over, std::move( under ) };
    }
    case RuleId::Fail2Pre:
    {
        const auto& s = std::get< CoreState >( state );
        LiteralSet n = std::get< CoreAction >( s.action ).n;
        for ( Literal l : record_hat( s.record ) )
            n.erase( l );
        return PreState{ std::move( n ), s.over, s.under };
    }
    case RuleId::Terminal:
        if ( const auto* c = std::get_if< ControlState >( &state ) )
            return TerminalOk{ c->over };
        return TerminalOk{ std::get< TerminalCont >( state ).over };
    case RuleId::OverApprox:
    {
        const auto& c = std::get< ControlState >( state );
        return CoreState{ {}, c.over, c.under, OverAction{} };
    }
    case RuleId::UnderApprox:
    {
        const auto& c = std::get< ControlState >( state );
        return CoreState{ {}, c.over, c.under, UnderAction{ std::get< Atom >( input ) } };
    }
    case RuleId::Chunk:
    {
        const AtomSet& n = std::get< AtomSet >( input );
        if ( const auto* c = std::get_if< ControlState >( &state ) )
            return CoreState{ {}, c->over, c->under, ChunkAction{ n } };
        const auto& t = std::get< TerminalCont >( state );
        return CoreState{ {}, t.over, t.under, ChunkAction{ n } };
    }
    case RuleId::Main:
    {
        const auto& p = std::get< PreState >( state );
        return TerminalCont{ p.over, p.under };
    }
    case RuleId::Continue:
    {
        const auto& p = std::get< PreState >( state );
        return CoreState{ {}, p.over, p.under, CoreAction{ p.n } };
    }
    case RuleId::NewSet:
    {
        // N ranges over the remaining candidates O \ U only; atoms already
        // in U are known consequences and need no further test.
        const auto& e = std::get< EvalState >( state );
        return CoreState{ {}, e.over, e.under, CoreAction{ negated( gap( e.over, e.under ) ) } };
    }
    case RuleId::Final: return TerminalOk{ std::get< EvalState >( state ).over };
    }
    throw LogicError( "unknown rule" );
}

RuleInput input_for( RuleId rule, const State& after )
{
    const auto* core = std::get_if< CoreState >( &after );
    switch ( rule )
    {
    case RuleId::Oracle:
    case RuleId::CoreOracle:
        if ( core )
            return core->record;
        break;
    case RuleId::UnderApprox:
        if ( core )
            if ( const auto* a = std::get_if< UnderAction >( &core->action ) )
                return a->atom;
        break;
    case RuleId::Chunk:
        if ( core )
            if ( const auto* c = std::get_if< ChunkAction >( &core->action ) )
                return c->n;
        break;
    default: break;
    }
    return std::monostate{};
}

ConstrainedTheory constrained_theory( const Theory& base, const AtomSet& over, const AtomSet& under,
                                      const Action& action )
{
    if ( !is_subset( under, over ) )
        throw LogicError( "constrained_theory: U must be a subset of O" );
    const AtomSet candidates = gap( over, under );

    std::optional< std::vector< Atom > > forbidden;
    std::vector< Literal > assumptions;
    std::visit( overloaded{
                    [ & ]( const OverAction& ) { forbidden.emplace( over.begin(), over.end() ); },
                    []( const UnderEmptyAction& ) {},
                    [ & ]( const UnderAction& a ) {
                        if ( !candidates.contains( a.atom ) )
                            throw LogicError( "constrained_theory: tested atom is not a candidate" );
                        forbidden.emplace( std::vector< Atom >{ a.atom } );
                    },
                    []( const ChunkStartAction& ) {},
                    [ & ]( const ChunkAction& c ) {
                        if ( c.n.empty() )
                            throw LogicError( "constrained_theory: empty chunk" );
                        if ( !is_subset( c.n, candidates ) )
                            throw LogicError( "constrained_theory: chunk outside the candidates" );
                        forbidden.emplace( c.n.begin(), c.n.end() );
                    },
                    [ & ]( const CoreAction& c ) {
                        for ( Literal l : c.n )
                        {
                            if ( !l.is_negative() )
                                throw LogicError( "constrained_theory: core sets hold negative literals" );
                            assumptions.push_back( l );
                        }
                    },
                },
                action );

    Theory theory = base;
    if ( forbidden )
    {
        std::visit( overloaded{
                        [ & ]( Program& p ) { p.rules.emplace_back( std::nullopt, *forbidden, std::vector< Atom >{} ); },
                        [ & ]( CnfFormula& f ) {
                            std::vector< Literal > clause;
                            for ( Atom a : *forbidden )
                                clause.push_back( Literal::negative( a ) );
                            f.clauses.emplace_back( std::move( clause ) );
                        },
                    },
                    theory );
    }
    return { std::move( theory ), std::move( assumptions ) };
}

Theory with_assumptions( const Theory& theory, std::span< const Literal > assumptions )
{
    Theory out = theory;
    for ( Literal l : assumptions )
    {
        std::visit( overloaded{
                        // The constraint `:- l-bar.`
                        [ & ]( Program& p ) {
                            if ( l.is_positive() )
                                p.rules.emplace_back( std::nullopt, std::vector< Atom >{}, std::vector< Atom >{ l.atom() } );
                            else
                                p.rules.emplace_back( std::nullopt, std::vector< Atom >{ l.atom() }, std::vector< Atom >{} );
                        },
                        [ & ]( CnfFormula& f ) { f.clauses.emplace_back( std::vector< Literal >{ l } ); },
                    },
                    out );
    }
    return out;
}

OracleQuery oracle_query( const AtomSet& over, const AtomSet& /*under*/, const Action& action )
{
    OracleQuery query;
    std::visit( overloaded{
                    [ & ]( const OverAction& ) { query.forbidden.emplace_back( over.begin(), over.end() ); },
                    []( const UnderEmptyAction& ) {},
                    [ & ]( const UnderAction& a ) { query.forbidden.push_back( { a.atom } ); },
                    []( const ChunkStartAction& ) {},
                    [ & ]( const ChunkAction& c ) { query.forbidden.emplace_back( c.n.begin(), c.n.end() ); },
                    [ & ]( const CoreAction& c ) { query.assumptions.assign( c.n.begin(), c.n.end() ); },
                },
                action );
    return query;
}

bool is_consistent_record( const Record& record ) { return is_consistent( record ); }

AtomSet positive_part( const Record& record )
{
    AtomSet out;
    for ( Literal l : record )
        if ( l.is_positive() )
            out.insert( l.atom() );
    return out;
}

LiteralSet record_hat( const Record& record )
{
    LiteralSet present( record.begin(), record.end() );
    LiteralSet out;
    for ( Literal l : record )
        if ( l.is_positive() && present.contains( ~l ) )
            out.insert( ~l );
    return out;
}

Record record_of_core( std::span< const Literal > core )
{
    Record out;
    for ( Literal l : core )
    {
        out.push_back( ~l );
        out.push_back( l );
    }
    return out;
}

const AtomSet* over_of( const State& state )
{
    return std::visit( overloaded{
                           []( const TerminalOk& ) -> const AtomSet* { return nullptr; },
                           []( const auto& s ) -> const AtomSet* { return &s.over; },
                       },
                       state );
}

const AtomSet* under_of( const State& state )
{
    return std::visit( overloaded{
                           []( const TerminalOk& ) -> const AtomSet* { return nullptr; },
                           []( const auto& s ) -> const AtomSet* { return &s.under; },
                       },
                       state );
}

bool is_terminal( const State& state )
{
    return std::holds_alternative< TerminalOk >( state ) || std::holds_alternative< TerminalCont >( state );
}

} // namespace cautious
