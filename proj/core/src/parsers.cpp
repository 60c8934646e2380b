#include "cautious/parsers.hpp"

#include <cctype>
#include <cstdint>
#include <limits>
#include <optional>

namespace cautious
{

std::string ParseDiagnostic::to_string() const
{
    return std::to_string( line ) + ":" + std::to_string( column ) + ": " + message;
}

ParseError::ParseError( ParseDiagnostic d ) : std::runtime_error{ d.to_string() }, _diagnostic{ std::move( d ) } {}

namespace
{

class Cursor
{
    std::string_view _text;
    std::size_t _pos = 0;
    std::size_t _line = 1;
    std::size_t _column = 1;

public:
    explicit Cursor( std::string_view text ) : _text{ text } {}

    [[nodiscard]] bool done() const { return _pos >= _text.size(); }
    [[nodiscard]] char peek( std::size_t ahead = 0 ) const
    {
        return _pos + ahead < _text.size() ? _text[ _pos + ahead ] : '\0';
    }

    char advance()
    {
        char c = _text[ _pos++ ];
        if ( c == '\n' )
        {
            ++_line;
            _column = 1;
        }
        else
            ++_column;
        return c;
    }

    [[nodiscard]] ParseDiagnostic here( std::string message ) const { return { _line, _column, std::move( message ) }; }
    [[noreturn]] void fail( std::string message ) const { throw ParseError( here( std::move( message ) ) ); }

    void skip_line()
    {
        while ( !done() && peek() != '\n' )
            advance();
    }

    // Skips blanks; stops at newlines when `cross_lines` is false.
    void skip_space( bool cross_lines = true )
    {
        while ( !done() )
        {
            char c = peek();
            if ( c == '\n' && !cross_lines )
                return;
            if ( c != ' ' && c != '\t' && c != '\r' && c != '\n' && c != '\f' && c != '\v' )
                return;
            advance();
        }
    }
};

bool is_space( char c )
{
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

// Reads an optionally signed decimal integer token; fails on anything else.
std::int64_t read_integer( Cursor& in, const char* what )
{
    bool negative = false;
    if ( in.peek() == '-' || in.peek() == '+' )
        negative = in.advance() == '-';
    if ( !std::isdigit( static_cast< unsigned char >( in.peek() ) ) )
        in.fail( std::string( "expected " ) + what );
    std::int64_t value = 0;
    constexpr std::int64_t limit = std::numeric_limits< std::int32_t >::max();
    while ( std::isdigit( static_cast< unsigned char >( in.peek() ) ) )
    {
        value = value * 10 + ( in.advance() - '0' );
        if ( value > limit )
            in.fail( std::string( what ) + " out of range" );
    }
    if ( !in.done() && !is_space( in.peek() ) )
        in.fail( std::string( "unexpected character in " ) + what );
    return negative ? -value : value;
}

void expect_word( Cursor& in, std::string_view word )
{
    for ( char expected : word )
    {
        if ( in.peek() != expected )
            in.fail( "malformed header, expected 'p cnf <vars> <clauses>'" );
        in.advance();
    }
}

constexpr std::int64_t max_dimacs_variables = std::int64_t{ 1 } << 24;

} // namespace

CnfFormula parse_dimacs( std::string_view text )
{
    Cursor in{ text };
    CnfFormula formula;
    std::optional< std::int64_t > declared_vars;
    std::vector< Literal > pending;
    bool clause_open = false;
    ParseDiagnostic clause_start;

    while ( true )
    {
        in.skip_space();
        if ( in.done() )
            break;
        char c = in.peek();
        if ( c == 'c' )
        {
            in.skip_line();
            continue;
        }
        if ( c == 'p' )
        {
            if ( declared_vars )
                in.fail( "duplicate header" );
            in.advance();
            in.skip_space( false );
            expect_word( in, "cnf" );
            if ( !is_space( in.peek() ) )
                in.fail( "malformed header, expected 'p cnf <vars> <clauses>'" );
            in.skip_space( false );
            std::int64_t vars = read_integer( in, "variable count" );
            in.skip_space( false );
            std::int64_t clauses = read_integer( in, "clause count" );
            if ( vars < 0 || clauses < 0 )
                in.fail( "negative count in header" );
            if ( vars > max_dimacs_variables )
                in.fail( "variable count exceeds " + std::to_string( max_dimacs_variables ) );
            in.skip_space( false );
            if ( !in.done() && in.peek() != '\n' )
                in.fail( "trailing characters after header" );
            declared_vars = vars;
            for ( std::int64_t v = 1; v <= vars; ++v )
                formula.vocabulary.intern( "v" + std::to_string( v ) );
            continue;
        }
        if ( !declared_vars )
            in.fail( "clause data before the 'p cnf' header" );
        if ( c != '-' && c != '+' && !std::isdigit( static_cast< unsigned char >( c ) ) )
            in.fail( "trailing garbage, expected a literal" );

        if ( !clause_open )
        {
            clause_start = in.here( "" );
            clause_open = true;
        }
        ParseDiagnostic at = in.here( "" );
        std::int64_t value = read_integer( in, "literal" );
        if ( value == 0 )
        {
            formula.clauses.emplace_back( std::move( pending ) );
            pending.clear();
            clause_open = false;
            continue;
        }
        std::int64_t var = value < 0 ? -value : value;
        if ( var > *declared_vars )
            throw ParseError( { at.line, at.column,
                                "variable " + std::to_string( var ) + " exceeds declared " +
                                    std::to_string( *declared_vars ) } );
        pending.push_back( Literal::make( Atom{ static_cast< std::uint32_t >( var - 1 ) }, value > 0 ) );
    }
    if ( !declared_vars )
        in.fail( "missing 'p cnf' header" );
    if ( clause_open )
        throw ParseError( { clause_start.line, clause_start.column, "clause is not terminated by 0" } );
    return formula;
}

namespace
{

bool is_atom_start( char c )
{
    return c >= 'a' && c <= 'z';
}

bool is_atom_char( char c )
{
    return std::isalnum( static_cast< unsigned char >( c ) ) || c == '_';
}

class ProgramParser
{
    Cursor _in;
    Program _program;

    void skip_trivia()
    {
        while ( true )
        {
            _in.skip_space();
            if ( _in.peek() == '%' )
                _in.skip_line();
            else
                return;
        }
    }

    std::string identifier()
    {
        if ( !is_atom_start( _in.peek() ) )
            _in.fail( "expected an atom" );
        std::string out;
        while ( is_atom_char( _in.peek() ) )
            out.push_back( _in.advance() );
        return out;
    }

    Atom atom()
    {
        ParseDiagnostic at = _in.here( "" );
        std::string name = identifier();
        if ( name == "not" )
            throw ParseError( { at.line, at.column, "'not' is reserved and cannot name an atom" } );
        return _program.vocabulary.intern( name );
    }

    bool at_keyword_not()
    {
        if ( _in.peek( 0 ) != 'n' || _in.peek( 1 ) != 'o' || _in.peek( 2 ) != 't' )
            return false;
        char after = _in.peek( 3 );
        return !is_atom_char( after );
    }

    void body( std::vector< Atom >& pos, std::vector< Atom >& neg )
    {
        while ( true )
        {
            skip_trivia();
            if ( at_keyword_not() )
            {
                for ( int i = 0; i < 3; ++i )
                    _in.advance();
                skip_trivia();
                neg.push_back( atom() );
            }
            else
                pos.push_back( atom() );
            skip_trivia();
            if ( _in.peek() == ',' )
            {
                _in.advance();
                continue;
            }
            return;
        }
    }

    void rule()
    {
        ParseDiagnostic start = _in.here( "" );
        std::optional< Atom > head;
        std::vector< Atom > pos, neg;
        if ( is_atom_start( _in.peek() ) )
        {
            head = atom();
            skip_trivia();
        }
        if ( _in.peek() == ':' )
        {
            _in.advance();
            if ( _in.peek() != '-' )
                _in.fail( "expected ':-'" );
            _in.advance();
            body( pos, neg );
        }
        else if ( !head )
            _in.fail( _in.peek() == '.' ? "empty rule" : "expected an atom or ':-'" );
        if ( _in.peek() != '.' )
            _in.fail( "expected '.'" );
        _in.advance();
        if ( !head && pos.empty() && neg.empty() )
            throw ParseError( { start.line, start.column, "empty rule" } );
        _program.rules.emplace_back( head, std::move( pos ), std::move( neg ) );
    }

public:
    explicit ProgramParser( std::string_view text ) : _in{ text } {}

    Program run()
    {
        while ( true )
        {
            skip_trivia();
            if ( _in.done() )
                return std::move( _program );
            rule();
        }
    }
};

void render_body( std::string& out, const Program& program, const Rule& r )
{
    bool first = true;
    auto separator = [ & ] {
        if ( !first )
            out += ", ";
        first = false;
    };
    for ( Atom a : r.body_pos )
    {
        separator();
        out += program.vocabulary.name( a );
    }
    for ( Atom a : r.body_neg )
    {
        separator();
        out += "not ";
        out += program.vocabulary.name( a );
    }
}

} // namespace

Program parse_program( std::string_view text )
{
    return ProgramParser{ text }.run();
}

std::string render( const Program& program )
{
    std::string out;
    for ( const Rule& r : program.rules )
    {
        if ( r.head )
            out += program.vocabulary.name( *r.head );
        if ( !r.body_pos.empty() || !r.body_neg.empty() )
        {
            out += r.head ? " :- " : ":- ";
            render_body( out, program, r );
        }
        out += ".\n";
    }
    return out;
}

std::string render( const CnfFormula& formula )
{
    std::string out = "p cnf " + std::to_string( formula.vocabulary.size() ) + " " +
                      std::to_string( formula.clauses.size() ) + "\n";
    for ( const Clause& c : formula.clauses )
    {
        for ( Literal l : c.literals() )
        {
            if ( l.is_negative() )
                out += '-';
            out += std::to_string( l.atom().id + 1 );
            out += ' ';
        }
        out += "0\n";
    }
    return out;
}

} // namespace cautious
