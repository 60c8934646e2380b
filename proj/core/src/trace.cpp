#include "cautious/trace.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace cautious
{

namespace
{

using Json = nlohmann::ordered_json;

template< typename... Ts >
struct overloaded : Ts...
{
    using Ts::operator()...;
};

std::string join( const AtomSet& atoms, const SymbolTable& vocabulary )
{
    std::vector< std::string > names;
    for ( Atom a : atoms )
        names.push_back( vocabulary.name( a ) );
    std::sort( names.begin(), names.end() );
    std::string out = "{";
    for ( std::size_t i = 0; i < names.size(); ++i )
        out += ( i ? "," : "" ) + names[ i ];
    return out + "}";
}

// Atom ids of the state packed into a key for the repeated-state check.
std::string state_key( const State& state )
{
    std::string key( 1, static_cast< char >( '0' + state.index() ) );
    auto put_atoms = [ &key ]( const AtomSet& s ) {
        key += '|';
        for ( Atom a : s )
            key += std::to_string( a.id ) + ',';
    };
    auto put_literals = [ &key ]( const auto& s ) {
        key += '|';
        for ( Literal l : s )
            key += std::to_string( l.code() ) + ',';
    };
    auto put_action = [ & ]( const Action& a ) {
        key += '|' + std::to_string( a.index() );
        if ( const auto* u = std::get_if< UnderAction >( &a ) )
            key += ':' + std::to_string( u->atom.id );
        else if ( const auto* c = std::get_if< ChunkAction >( &a ) )
            put_atoms( c->n );
        else if ( const auto* k = std::get_if< CoreAction >( &a ) )
            put_literals( k->n );
    };
    std::visit( overloaded{
                    [ & ]( const CoreState& s ) {
                        put_literals( s.record );
                        put_atoms( s.over );
                        put_atoms( s.under );
                        put_action( s.action );
                    },
                    [ & ]( const ControlState& s ) {
                        put_atoms( s.over );
                        put_atoms( s.under );
                        put_action( s.action );
                    },
                    [ & ]( const PreState& s ) {
                        put_literals( s.n );
                        put_atoms( s.over );
                        put_atoms( s.under );
                    },
                    [ & ]( const EvalState& s ) {
                        put_atoms( s.over );
                        put_atoms( s.under );
                    },
                    [ & ]( const TerminalOk& s ) { put_atoms( s.witness ); },
                    [ & ]( const TerminalCont& s ) {
                        put_atoms( s.over );
                        put_atoms( s.under );
                    },
                },
                state );
    return key;
}

std::size_t gap_size( const State& state )
{
    const AtomSet* o = over_of( state );
    const AtomSet* u = under_of( state );
    return o && u ? set_difference( *o, *u ).size() : 0;
}

bool unconstrained_initial( const Action& a )
{
    return std::holds_alternative< UnderEmptyAction >( a ) || std::holds_alternative< ChunkStartAction >( a );
}

bool is_return_rule( RuleId r )
{
    switch ( r )
    {
    case RuleId::FailOver:
    case RuleId::FailUnder:
    case RuleId::FailChunk:
    case RuleId::Find:
    case RuleId::Fail1Pre:
    case RuleId::Fail2Pre:
    case RuleId::FindPre: return true;
    default: return false;
    }
}

std::vector< State > possible_initial_states( const AtomSet& atoms, const std::optional< GraphFamily >& family )
{
    std::vector< State > out;
    if ( family && family->kind == GraphFamily::Kind::mixed )
    {
        for ( Technique t : family->techniques )
            out.push_back( initial_state( *family, atoms, t ) );
        return out;
    }
    if ( family )
        return { initial_state( *family, atoms ) };
    for ( GraphFamily f : { GraphFamily::ov(), GraphFamily::un(), GraphFamily::ch(), GraphFamily::fs() } )
        out.push_back( initial_state( f, atoms ) );
    return out;
}

// --- JSON encoding --------------------------------------------------------

std::string literal_name( Literal l, const SymbolTable& v )
{
    return ( l.is_negative() ? "-" : "" ) + v.name( l.atom() );
}

Json encode_atoms( const AtomSet& atoms, const SymbolTable& v )
{
    std::vector< std::string > names;
    for ( Atom a : atoms )
        names.push_back( v.name( a ) );
    std::sort( names.begin(), names.end() );
    return names;
}

Json encode_literal_set( const LiteralSet& literals, const SymbolTable& v )
{
    std::vector< std::string > names;
    for ( Literal l : literals )
        names.push_back( literal_name( l, v ) );
    std::sort( names.begin(), names.end() );
    return names;
}

Json encode_record( const Record& record, const SymbolTable& v )
{
    Json out = Json::array();
    for ( Literal l : record )
        out.push_back( literal_name( l, v ) );
    return out;
}

Json encode_action( const Action& action, const SymbolTable& v )
{
    return std::visit( overloaded{
                           []( const OverAction& ) { return Json{ { "kind", "over" } }; },
                           []( const UnderEmptyAction& ) { return Json{ { "kind", "under_empty" } }; },
                           [ & ]( const UnderAction& a ) {
                               return Json{ { "kind", "under" }, { "atom", v.name( a.atom ) } };
                           },
                           []( const ChunkStartAction& ) { return Json{ { "kind", "chunk_start" } }; },
                           [ & ]( const ChunkAction& a ) {
                               return Json{ { "kind", "chunk" }, { "n", encode_atoms( a.n, v ) } };
                           },
                           [ & ]( const CoreAction& a ) {
                               return Json{ { "kind", "core" }, { "n", encode_literal_set( a.n, v ) } };
                           },
                       },
                       action );
}

Json encode_state( const State& state, const SymbolTable& v )
{
    return std::visit( overloaded{
                           [ & ]( const CoreState& s ) {
                               return Json{ { "kind", "core" },
                                            { "record", encode_record( s.record, v ) },
                                            { "over", encode_atoms( s.over, v ) },
                                            { "under", encode_atoms( s.under, v ) },
                                            { "action", encode_action( s.action, v ) } };
                           },
                           [ & ]( const ControlState& s ) {
                               return Json{ { "kind", "control" },
                                            { "over", encode_atoms( s.over, v ) },
                                            { "under", encode_atoms( s.under, v ) },
                                            { "action", encode_action( s.action, v ) } };
                           },
                           [ & ]( const PreState& s ) {
                               return Json{ { "kind", "pre" },
                                            { "n", encode_literal_set( s.n, v ) },
                                            { "over", encode_atoms( s.over, v ) },
                                            { "under", encode_atoms( s.under, v ) } };
                           },
                           [ & ]( const EvalState& s ) {
                               return Json{ { "kind", "eval" },
                                            { "over", encode_atoms( s.over, v ) },
                                            { "under", encode_atoms( s.under, v ) } };
                           },
                           [ & ]( const TerminalOk& s ) {
                               return Json{ { "kind", "ok" }, { "witness", encode_atoms( s.witness, v ) } };
                           },
                           [ & ]( const TerminalCont& s ) {
                               return Json{ { "kind", "cont" },
                                            { "over", encode_atoms( s.over, v ) },
                                            { "under", encode_atoms( s.under, v ) } };
                           },
                       },
                       state );
}

// --- JSON decoding --------------------------------------------------------

struct Decoder
{
    const SymbolTable& vocabulary;

    [[noreturn]] static void fail( const std::string& message ) { throw std::invalid_argument( message ); }

    static const Json& field( const Json& j, const char* name )
    {
        if ( !j.is_object() || !j.contains( name ) )
            fail( std::string( "missing field '" ) + name + "'" );
        return j.at( name );
    }

    static std::string text( const Json& j )
    {
        if ( !j.is_string() )
            fail( "expected a string" );
        return j.get< std::string >();
    }

    Atom atom( const Json& j ) const
    {
        std::string name = text( j );
        auto a = vocabulary.find( name );
        if ( !a )
            fail( "unknown atom '" + name + "'" );
        return *a;
    }

    Literal literal( const Json& j ) const
    {
        std::string name = text( j );
        bool negative = !name.empty() && name.front() == '-';
        auto a = vocabulary.find( negative ? std::string_view( name ).substr( 1 ) : std::string_view( name ) );
        if ( !a )
            fail( "unknown literal '" + name + "'" );
        return Literal::make( *a, !negative );
    }

    static const Json& array( const Json& j )
    {
        if ( !j.is_array() )
            fail( "expected a list" );
        return j;
    }

    AtomSet atoms( const Json& j ) const
    {
        AtomSet out;
        for ( const Json& e : array( j ) )
            out.insert( atom( e ) );
        return out;
    }

    LiteralSet literal_set( const Json& j ) const
    {
        LiteralSet out;
        for ( const Json& e : array( j ) )
            out.insert( literal( e ) );
        return out;
    }

    Record record( const Json& j ) const
    {
        Record out;
        for ( const Json& e : array( j ) )
            out.push_back( literal( e ) );
        return out;
    }

    Action action( const Json& j ) const
    {
        std::string kind = text( field( j, "kind" ) );
        if ( kind == "over" )
            return OverAction{};
        if ( kind == "under_empty" )
            return UnderEmptyAction{};
        if ( kind == "under" )
            return UnderAction{ atom( field( j, "atom" ) ) };
        if ( kind == "chunk_start" )
            return ChunkStartAction{};
        if ( kind == "chunk" )
            return ChunkAction{ atoms( field( j, "n" ) ) };
        if ( kind == "core" )
            return CoreAction{ literal_set( field( j, "n" ) ) };
        fail( "unknown action kind '" + kind + "'" );
    }

    State state( const Json& j ) const
    {
        std::string kind = text( field( j, "kind" ) );
        if ( kind == "core" )
            return CoreState{ record( field( j, "record" ) ), atoms( field( j, "over" ) ), atoms( field( j, "under" ) ),
                              action( field( j, "action" ) ) };
        if ( kind == "control" )
            return ControlState{ atoms( field( j, "over" ) ), atoms( field( j, "under" ) ),
                                 action( field( j, "action" ) ) };
        if ( kind == "pre" )
            return PreState{ literal_set( field( j, "n" ) ), atoms( field( j, "over" ) ), atoms( field( j, "under" ) ) };
        if ( kind == "eval" )
            return EvalState{ atoms( field( j, "over" ) ), atoms( field( j, "under" ) ) };
        if ( kind == "ok" )
            return TerminalOk{ atoms( field( j, "witness" ) ) };
        if ( kind == "cont" )
            return TerminalCont{ atoms( field( j, "over" ) ), atoms( field( j, "under" ) ) };
        fail( "unknown state kind '" + kind + "'" );
    }

    static std::uint64_t count( const Json& j )
    {
        if ( !j.is_number_unsigned() )
            fail( "expected a non-negative integer" );
        return j.get< std::uint64_t >();
    }

    TraceEvent event( const Json& j ) const
    {
        TraceEvent e;
        e.step = count( field( j, "step" ) );
        std::string name = text( field( j, "rule" ) );
        auto rule = rule_from_name( name );
        if ( !rule )
            fail( "unknown rule '" + name + "'" );
        e.rule = *rule;
        e.before = state( field( j, "before" ) );
        e.after = state( field( j, "after" ) );
        if ( j.contains( "stats" ) )
        {
            const Json& s = j.at( "stats" );
            e.stats = OracleStats{ count( field( s, "conflicts" ) ), count( field( s, "decisions" ) ) };
        }
        return e;
    }
};

// Constraint of the action, checked directly on an assignment.
bool satisfies_action( const Assignment& m, const AtomSet& over, const Action& action )
{
    auto not_all_true = [ & ]( const auto& atoms ) {
        return std::any_of( atoms.begin(), atoms.end(), [ & ]( Atom a ) { return !m.value( a ); } );
    };
    return std::visit( overloaded{
                           [ & ]( const OverAction& ) { return not_all_true( over ); },
                           []( const UnderEmptyAction& ) { return true; },
                           [ & ]( const UnderAction& a ) { return !m.value( a.atom ); },
                           []( const ChunkStartAction& ) { return true; },
                           [ & ]( const ChunkAction& a ) { return not_all_true( a.n ); },
                           [ & ]( const CoreAction& a ) {
                               return std::all_of( a.n.begin(), a.n.end(),
                                                   [ & ]( Literal l ) { return m.satisfies( l ); } );
                           },
                       },
                       action );
}

std::optional< Assignment > as_assignment( const Record& record, std::size_t size )
{
    if ( record.size() != size )
        return std::nullopt;
    Assignment m( size );
    std::vector< bool > seen( size, false );
    for ( Literal l : record )
    {
        if ( l.atom().id >= size || seen[ l.atom().id ] )
            return std::nullopt;
        seen[ l.atom().id ] = true;
        m.set( l.atom(), l.is_positive() );
    }
    return m;
}

} // namespace

void ValidationReport::add( std::size_t step, std::string check, std::string detail )
{
    ok = false;
    violations.push_back( { step, std::move( check ), std::move( detail ) } );
}

std::string ValidationReport::to_string() const
{
    std::ostringstream out;
    for ( const Violation& v : violations )
        out << "step " << v.step << ": " << v.check << ": " << v.detail << '\n';
    return out.str();
}

ValidationReport validate_structure( const Trace& trace, const Theory& base, std::optional< GraphFamily > family )
{
    ValidationReport report;
    const SymbolTable& vocabulary = vocabulary_of( base );
    const AtomSet atoms = vocabulary.all();

    if ( trace.empty() )
    {
        if ( !atoms.empty() )
            report.add( 0, "terminal", "empty trace over a nonempty vocabulary" );
        return report;
    }

    auto initial = possible_initial_states( atoms, family );
    if ( std::find( initial.begin(), initial.end(), trace.front().before ) == initial.end() )
        report.add( 0, "initial", "path does not start at an initial state: " +
                                      serialize_state( trace.front().before, vocabulary ) );

    const std::set< RuleId > allowed = family ? rules_of( *family ) : std::set< RuleId >{};
    const bool handoff_allowed = !family || family->kind == GraphFamily::Kind::fs_then_ch;

    std::unordered_set< std::string > seen{ state_key( trace.front().before ) };
    for ( std::size_t i = 0; i < trace.size(); ++i )
    {
        const TraceEvent& e = trace[ i ];
        const std::string rule = std::string( rule_name( e.rule ) );
        if ( e.step != i )
            report.add( i, "step", "event numbered " + std::to_string( e.step ) );
        if ( i > 0 && !( trace[ i - 1 ].after == e.before ) )
            report.add( i, "path", "state before differs from the previous state after" );
        if ( family && !allowed.contains( e.rule ) )
            report.add( i, "family", rule + " is not a rule of the graph" );

        for ( const State* s : { &e.before, &e.after } )
        {
            const AtomSet* o = over_of( *s );
            const AtomSet* u = under_of( *s );
            if ( o && u && !is_subset( *u, *o ) )
                report.add( i, "under-within-over", "U is not a subset of O" );
            if ( o && !is_subset( *o, atoms ) )
                report.add( i, "vocabulary", "O mentions atoms outside the vocabulary" );
        }

        RuleInput input = input_for( e.rule, e.after );
        if ( !applicable( e.rule, e.before, input ) )
            report.add( i, "applicable", rule + " does not apply" );
        else if ( !( apply( e.rule, e.before, input ) == e.after ) )
            report.add( i, "apply", rule + " leads to " + serialize_state( apply( e.rule, e.before, input ), vocabulary ) );

        if ( !seen.insert( state_key( e.after ) ).second )
            report.add( i, "acyclic", "state repeated: " + serialize_state( e.after, vocabulary ) );

        if ( is_return_rule( e.rule ) )
        {
            const auto* core = std::get_if< CoreState >( &e.before );
            if ( core && e.rule == RuleId::Fail2Pre )
            {
                const auto* pre = std::get_if< PreState >( &e.after );
                const auto* action = std::get_if< CoreAction >( &core->action );
                if ( pre && action && pre->n.size() >= action->n.size() )
                    report.add( i, "progress", "Fail2Pre did not shrink N" );
            }
            else if ( core && !unconstrained_initial( core->action ) && gap_size( e.after ) >= gap_size( e.before ) )
                report.add( i, "progress", rule + " did not shrink O \\ U" );
        }

        if ( std::holds_alternative< TerminalOk >( e.before ) )
            report.add( i, "terminal", "path continues after Ok" );
        if ( std::holds_alternative< TerminalCont >( e.before ) && !handoff_allowed )
            report.add( i, "terminal", "path continues after Cont" );
    }

    const State& last = trace.back().after;
    if ( !is_terminal( last ) )
        report.add( trace.size() - 1, "terminal", "path ends in a non-terminal state" );
    else if ( std::holds_alternative< TerminalCont >( last ) && family &&
              family->kind != GraphFamily::Kind::fs )
        report.add( trace.size() - 1, "terminal", "only the core graph ends in Cont" );
    return report;
}

ValidationReport validate_semantics( const Trace& trace, const Theory& base, Semantics semantics, std::size_t bound )
{
    return validate_semantics( trace, base, semantics, enumerate_models( base, semantics, bound ) );
}

ValidationReport validate_semantics( const Trace& trace, const Theory& base, Semantics semantics,
                                     std::span< const Assignment > models )
{
    ValidationReport report;
    const SymbolTable& vocabulary = vocabulary_of( base );
    const std::size_t n = vocabulary.size();

    AtomSet target = vocabulary.all();
    for ( const Assignment& m : models )
        target = set_intersection( target, m.positive_atoms() );

    const std::string t_text = join( target, vocabulary );
    auto check_bracket = [ & ]( std::size_t step, const State& s ) {
        if ( const auto* ok = std::get_if< TerminalOk >( &s ) )
        {
            if ( ok->witness != target )
                report.add( step, "solution", "Ok" + join( ok->witness, vocabulary ) + " but T = " + t_text );
            return;
        }
        const AtomSet* o = over_of( s );
        const AtomSet* u = under_of( s );
        if ( u && !is_subset( *u, target ) )
            report.add( step, "under-bound", "U = " + join( *u, vocabulary ) + " is not within T = " + t_text );
        if ( o && !is_subset( target, *o ) )
            report.add( step, "over-bound", "T = " + t_text + " is not within O = " + join( *o, vocabulary ) );
    };

    for ( std::size_t i = 0; i < trace.size(); ++i )
    {
        const TraceEvent& e = trace[ i ];
        if ( i == 0 )
            check_bracket( i, e.before );
        check_bracket( i, e.after );

        const auto* core = std::get_if< CoreState >( &e.before );
        if ( e.rule == RuleId::FailOver && core && core->over != target )
            report.add( i, "fail-over", "FailOver with O = " + join( core->over, vocabulary ) + " but T = " + t_text );

        if ( ( e.rule != RuleId::Oracle && e.rule != RuleId::CoreOracle ) || !core )
            continue;
        const auto* result = std::get_if< CoreState >( &e.after );
        if ( !result )
            continue;
        const Record& record = result->record;

        if ( is_consistent_record( record ) )
        {
            auto m = as_assignment( record, n );
            if ( !m )
                report.add( i, "model", "record is not a total assignment over the vocabulary" );
            else if ( !is_model( base, *m, semantics ) || !satisfies_action( *m, core->over, core->action ) )
                report.add( i, "model", "record is not a model of the constrained theory" );
            continue;
        }

        // No model of the base satisfies the call's constraints (for core
        // actions: the hat of the record, which must itself be a core).
        Action tested = core->action;
        if ( std::holds_alternative< CoreAction >( tested ) )
            tested = CoreAction{ record_hat( record ) };
        for ( const Assignment& m : models )
            if ( satisfies_action( m, core->over, tested ) )
            {
                report.add( i, "no-model", "the constrained theory has a model: " +
                                               join( m.positive_atoms(), vocabulary ) );
                break;
            }
    }
    return report;
}

TraceFormatError::TraceFormatError( std::size_t line_number, const std::string& message )
        : std::runtime_error( "line " + std::to_string( line_number ) + ": " + message ), line{ line_number }
{
}

std::string serialize_state( const State& state, const SymbolTable& vocabulary )
{
    return encode_state( state, vocabulary ).dump();
}

std::string serialize( const Trace& trace, const SymbolTable& vocabulary )
{
    std::string out;
    for ( const TraceEvent& e : trace )
    {
        Json j{ { "step", e.step },
                { "rule", std::string( rule_name( e.rule ) ) },
                { "before", encode_state( e.before, vocabulary ) },
                { "after", encode_state( e.after, vocabulary ) } };
        if ( e.stats )
            j[ "stats" ] = Json{ { "conflicts", e.stats->conflicts }, { "decisions", e.stats->decisions } };
        out += j.dump();
        out += '\n';
    }
    return out;
}

Trace deserialize( std::string_view text, const SymbolTable& vocabulary )
{
    Trace trace;
    Decoder decoder{ vocabulary };
    std::size_t line_number = 0;
    std::size_t pos = 0;
    while ( pos < text.size() )
    {
        std::size_t end = text.find( '\n', pos );
        if ( end == std::string_view::npos )
            end = text.size();
        std::string_view line = text.substr( pos, end - pos );
        pos = end + 1;
        ++line_number;
        if ( line.find_first_not_of( " \t\r" ) == std::string_view::npos )
            continue;
        try
        {
            trace.push_back( decoder.event( Json::parse( line ) ) );
        }
        catch ( const nlohmann::json::exception& e )
        {
            throw TraceFormatError( line_number, e.what() );
        }
        catch ( const std::invalid_argument& e )
        {
            throw TraceFormatError( line_number, e.what() );
        }
    }
    return trace;
}

} // namespace cautious
