#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace citywalk::syntax {

enum class TokenKind {
    Identifier,
    Number,
    String,
    CharLit,
    Punct,
    Comment,
    Preprocessor,
};

struct Token {
    TokenKind kind;
    std::size_t begin = 0;  // byte offset, inclusive
    std::size_t end = 0;    // byte offset, exclusive
    int line = 1;           // 1-based line of `begin`
};

// Tokenizes C++ source. Comments and preprocessor directives are kept as
// single tokens; multi-character operators (::, ->, &&, ||, <<, >>) are fused.
std::vector<Token> lex(std::string_view source);

inline std::string_view token_text(std::string_view source, const Token& t) {
    return source.substr(t.begin, t.end - t.begin);
}

struct IncludeDirective {
    std::string raw;     // normalized directive text, e.g. `#include <string>`
    std::string target;  // path between the delimiters
    bool angled = false;
    int line = 0;
};

struct FunctionInfo {
    std::string name;                      // unqualified; "~X" for destructors
    std::string class_name;                // qualifier or enclosing class, or empty
    std::vector<std::string> namespaces;   // enclosing namespace chain
    std::string return_type;               // leading declaration text, may be empty
    std::vector<std::string> param_types;  // one normalized type text per parameter
    std::string signature;                 // normalized "ret name(params) quals"
    bool is_definition = false;
    int decl_line = 0;
    int body_open_line = 0;  // definitions only
    int end_line = 0;        // line of closing '}' (or ';' for declarations)
    std::size_t decl_begin = 0;
    std::size_t body_open_offset = 0;  // offset of '{' (definitions only)
    std::size_t end_offset = 0;        // one past the closing token
};

enum class RecordKind { Class, Struct, Enum };

struct ClassInfo {
    RecordKind kind = RecordKind::Class;
    std::string name;
    std::vector<std::string> namespaces;
    int decl_line = 0;
    int end_line = 0;
    std::size_t decl_begin = 0;
    std::size_t end_offset = 0;
    std::vector<std::string> field_decls;  // member variable declaration texts
};

struct CommentBlock {
    std::string text;  // byte-exact slice
    int first_line = 0;
    int last_line = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct NamespaceDecl {
    std::string name;  // possibly qualified a::b; empty for anonymous
    std::string text;  // e.g. "namespace YAML"
    int line = 0;
};

struct FileSyntax {
    std::vector<IncludeDirective> includes;
    std::vector<NamespaceDecl> namespaces;
    std::vector<FunctionInfo> functions;
    std::vector<ClassInfo> records;
    std::vector<CommentBlock> comments;  // standalone comment blocks
    bool parse_ok = true;
    std::string diagnostic;
};

// Abstract parse backend so the concrete parser can be substituted.
class SyntaxBackend {
  public:
    virtual ~SyntaxBackend() = default;
    virtual FileSyntax parse(std::string_view source) const = 0;
};

// Token-stream heuristic parser. Recognizes namespace/class/enum scopes,
// function declarations and definitions (free, member, out-of-line
// qualified), include directives, member fields, and standalone comment
// blocks. Does not expand macros or instantiate templates.
class LexerBackend final : public SyntaxBackend {
  public:
    FileSyntax parse(std::string_view source) const override;
};

const SyntaxBackend& default_backend();

// Splits a parenthesized parameter list body (without the outer parens)
// into normalized per-parameter type texts. Default arguments and trailing
// parameter names are stripped.
std::vector<std::string> parse_parameter_types(std::string_view params_text);

// Collapses all whitespace runs to single spaces and trims.
std::string normalize_ws(std::string_view s);

}  // namespace citywalk::syntax
