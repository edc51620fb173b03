#include "citywalk/syntax.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

#include "citywalk/util.hpp"

namespace citywalk::syntax {

namespace {

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

const std::unordered_set<std::string_view> kControlKeywords = {
    "if",     "for",    "while",  "switch",   "catch",    "return",
    "sizeof", "new",    "delete", "throw",    "alignof",  "decltype",
    "else",   "do",     "case",   "co_await", "co_return", "co_yield",
    "static_assert", "typeid", "assert",
};

}  // namespace

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1;
    const std::size_t n = src.size();

    auto push = [&](TokenKind kind, std::size_t begin, std::size_t end, int tok_line) {
        out.push_back(Token{kind, begin, end, tok_line});
    };
    auto advance_lines = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k)
            if (src[k] == '\n') ++line;
    };

    while (i < n) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        // Preprocessor directive: only whitespace may precede '#' on the line.
        if (c == '#') {
            std::size_t ls = src.rfind('\n', i == 0 ? 0 : i - 1);
            ls = (ls == std::string_view::npos) ? 0 : ls + 1;
            bool leading = true;
            for (std::size_t k = ls; k < i; ++k)
                if (!std::isspace(static_cast<unsigned char>(src[k]))) leading = false;
            if (leading) {
                std::size_t begin = i;
                int tok_line = line;
                while (i < n) {
                    if (src[i] == '\\' && i + 1 < n && src[i + 1] == '\n') {
                        i += 2;
                        ++line;
                        continue;
                    }
                    if (src[i] == '\n') break;
                    ++i;
                }
                push(TokenKind::Preprocessor, begin, i, tok_line);
                continue;
            }
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            std::size_t begin = i;
            while (i < n && src[i] != '\n') ++i;
            push(TokenKind::Comment, begin, i, line);
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            std::size_t begin = i;
            int tok_line = line;
            std::size_t end = src.find("*/", i + 2);
            end = (end == std::string_view::npos) ? n : end + 2;
            advance_lines(i, end);
            i = end;
            push(TokenKind::Comment, begin, end, tok_line);
            continue;
        }
        // Raw string literal.
        if (c == 'R' && i + 1 < n && src[i + 1] == '"') {
            std::size_t d = i + 2;
            std::string delim;
            while (d < n && src[d] != '(' && d - i < 20) delim.push_back(src[d++]);
            if (d < n && src[d] == '(') {
                std::string closer = ")" + delim + "\"";
                std::size_t end = src.find(closer, d + 1);
                end = (end == std::string_view::npos) ? n : end + closer.size();
                int tok_line = line;
                advance_lines(i, end);
                push(TokenKind::String, i, end, tok_line);
                i = end;
                continue;
            }
        }
        if (c == '"' || c == '\'') {
            std::size_t begin = i;
            int tok_line = line;
            char quote = c;
            ++i;
            while (i < n && src[i] != quote) {
                if (src[i] == '\\' && i + 1 < n) ++i;
                if (src[i] == '\n') ++line;
                ++i;
            }
            if (i < n) ++i;
            push(quote == '"' ? TokenKind::String : TokenKind::CharLit, begin, i, tok_line);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t begin = i;
            while (i < n && (is_ident_char(src[i]) || src[i] == '.' ||
                             ((src[i] == '+' || src[i] == '-') && i > begin &&
                              (src[i - 1] == 'e' || src[i - 1] == 'E' || src[i - 1] == 'p' ||
                               src[i - 1] == 'P'))))
                ++i;
            push(TokenKind::Number, begin, i, line);
            continue;
        }
        if (is_ident_start(c)) {
            std::size_t begin = i;
            while (i < n && is_ident_char(src[i])) ++i;
            push(TokenKind::Identifier, begin, i, line);
            continue;
        }
        // Punctuation; fuse the multi-character operators the parser cares about.
        static constexpr std::array<std::string_view, 10> two_char = {
            "::", "->", "&&", "||", "<<", ">>", "==", "!=", "<=", ">=",
        };
        std::size_t len = 1;
        if (i + 1 < n) {
            std::string_view pair = src.substr(i, 2);
            for (auto op : two_char)
                if (pair == op) len = 2;
        }
        push(TokenKind::Punct, i, i + len, line);
        i += len;
    }
    return out;
}

std::string normalize_ws(std::string_view s) {
    std::string out;
    bool in_space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(c);
    }
    return out;
}

namespace {

// Joins token texts into readable type text: "std::vector<int>&".
std::string join_type_tokens(std::string_view src, const std::vector<Token>& toks,
                             std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t k = begin; k < end; ++k) {
        std::string_view t = token_text(src, toks[k]);
        bool glue = t == "::" || t == "<" || t == ">" || t == ">>" || t == "*" || t == "&" ||
                    t == "&&" || t == "[" || t == "]" || t == "," ||
                    (!out.empty() && (out.back() == ':' || out.back() == '<' || out.back() == '[')) ;
        if (!out.empty() && !glue) out.push_back(' ');
        out.append(t);
    }
    return out;
}

}  // namespace

std::vector<std::string> parse_parameter_types(std::string_view params_text) {
    std::vector<std::string> result;
    std::vector<Token> toks;
    for (const Token& t : lex(params_text))
        if (t.kind != TokenKind::Comment && t.kind != TokenKind::Preprocessor) toks.push_back(t);
    if (toks.empty()) return result;

    std::vector<std::pair<std::size_t, std::size_t>> pieces;
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t k = 0; k < toks.size(); ++k) {
        std::string_view t = token_text(params_text, toks[k]);
        if (t == "(" || t == "[" || t == "{" || t == "<") ++depth;
        else if (t == ")" || t == "]" || t == "}" || t == ">") --depth;
        else if (t == ">>") depth -= 2;
        else if (t == "," && depth == 0) {
            pieces.emplace_back(start, k);
            start = k + 1;
        }
    }
    pieces.emplace_back(start, toks.size());

    for (auto [b, e] : pieces) {
        // Strip default argument.
        for (std::size_t k = b; k < e; ++k) {
            if (token_text(params_text, toks[k]) == "=") {
                e = k;
                break;
            }
        }
        if (e <= b) continue;
        std::string_view first = token_text(params_text, toks[b]);
        if (e - b == 1 && first == "void") continue;
        // Drop the trailing parameter name when one is present.
        std::size_t type_end = e;
        // `T name[N]` form: drop the identifier right before the first bracket.
        std::size_t bracket = e;
        for (std::size_t k = b; k < e; ++k) {
            if (token_text(params_text, toks[k]) == "[") {
                bracket = k;
                break;
            }
        }
        std::string text;
        if (bracket < e && bracket > b && toks[bracket - 1].kind == TokenKind::Identifier &&
            bracket - 1 > b) {
            text = join_type_tokens(params_text, toks, b, bracket - 1) +
                   join_type_tokens(params_text, toks, bracket, e);
        } else {
            if (type_end - b >= 2 && toks[type_end - 1].kind == TokenKind::Identifier &&
                token_text(params_text, toks[type_end - 2]) != "::")
                --type_end;
            text = join_type_tokens(params_text, toks, b, type_end);
        }
        if (!text.empty()) result.push_back(text);
    }
    return result;
}

namespace {

struct Scope {
    enum Kind { Namespace, Record, Skip } kind;
    std::string name;           // namespace or record name
    std::size_t record_index;   // into FileSyntax::records when kind == Record
};

class StructureParser {
  public:
    StructureParser(std::string_view src, FileSyntax& out) : src_(src), out_(out) {
        for (const Token& t : lex(src)) {
            if (t.kind == TokenKind::Comment) {
                comments_.push_back(t);
            } else if (t.kind == TokenKind::Preprocessor) {
                preproc_.push_back(t);
            } else {
                toks_.push_back(t);
            }
        }
    }

    void run() {
        collect_includes();
        collect_comment_blocks();
        walk();
    }

  private:
    std::string_view src_;
    FileSyntax& out_;
    std::vector<Token> toks_;     // significant tokens only
    std::vector<Token> comments_;
    std::vector<Token> preproc_;
    std::vector<Scope> scopes_;
    std::size_t stmt_ = 0;  // index of the first token of the current statement

    std::string_view text(std::size_t k) const { return token_text(src_, toks_[k]); }

    Scope::Kind scope_kind() const {
        return scopes_.empty() ? Scope::Namespace : scopes_.back().kind;
    }

    std::vector<std::string> namespace_chain() const {
        std::vector<std::string> out;
        for (const Scope& s : scopes_)
            if (s.kind == Scope::Namespace && !s.name.empty()) out.push_back(s.name);
        return out;
    }

    ClassInfo* current_record() {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
            if (it->kind == Scope::Record) return &out_.records[it->record_index];
        return nullptr;
    }

    bool in_record_scope() const {
        return !scopes_.empty() && scopes_.back().kind == Scope::Record;
    }

    void collect_includes() {
        for (const Token& t : preproc_) {
            std::string_view body = token_text(src_, t);
            std::size_t h = body.find_first_not_of("# \t");
            if (h == std::string_view::npos || !starts_with(body.substr(h), "include")) continue;
            std::size_t open = body.find_first_of("<\"", h);
            if (open == std::string_view::npos) continue;
            bool angled = body[open] == '<';
            char closer = angled ? '>' : '"';
            std::size_t close = body.find(closer, open + 1);
            if (close == std::string_view::npos) continue;
            IncludeDirective inc;
            inc.target = std::string(body.substr(open + 1, close - open - 1));
            inc.angled = angled;
            inc.line = t.line;
            inc.raw = angled ? "#include <" + inc.target + ">" : "#include \"" + inc.target + "\"";
            out_.includes.push_back(std::move(inc));
        }
    }

    void collect_comment_blocks() {
        CommentBlock block;
        bool open = false;
        int prev_end_line = -10;
        for (const Token& t : comments_) {
            // Standalone means only whitespace precedes the comment on its line.
            std::size_t ls = t.begin == 0 ? 0 : src_.rfind('\n', t.begin - 1);
            ls = (ls == std::string_view::npos) ? 0 : ls + 1;
            bool leading = true;
            for (std::size_t k = ls; k < t.begin; ++k)
                if (!std::isspace(static_cast<unsigned char>(src_[k]))) leading = false;
            if (!leading) continue;
            int end_line = t.line;
            for (std::size_t k = t.begin; k < t.end; ++k)
                if (src_[k] == '\n') ++end_line;
            if (open && t.line == prev_end_line + 1) {
                block.end = t.end;
                block.last_line = end_line;
            } else {
                if (open) flush(block);
                block = CommentBlock{};
                block.begin = t.begin;
                block.end = t.end;
                block.first_line = t.line;
                block.last_line = end_line;
                open = true;
            }
            prev_end_line = end_line;
        }
        if (open) flush(block);
    }

    void flush(CommentBlock& block) {
        block.text = std::string(src_.substr(block.begin, block.end - block.begin));
        out_.comments.push_back(block);
    }

    std::size_t find_matching(std::size_t open, std::string_view o, std::string_view c) const {
        int depth = 0;
        for (std::size_t k = open; k < toks_.size(); ++k) {
            std::string_view t = text(k);
            if (t == o) ++depth;
            else if (t == c) {
                --depth;
                if (depth == 0) return k;
            }
        }
        return toks_.size();
    }

    // Skips a balanced template argument/parameter list starting at '<'.
    std::size_t skip_angles(std::size_t open) const {
        int depth = 0;
        for (std::size_t k = open; k < toks_.size(); ++k) {
            std::string_view t = text(k);
            if (t == "<") ++depth;
            else if (t == ">") {
                if (--depth == 0) return k;
            } else if (t == ">>") {
                depth -= 2;
                if (depth <= 0) return k;
            } else if (t == ";" || t == "{") {
                return k;  // malformed; bail
            }
        }
        return toks_.size();
    }

    void walk() {
        std::size_t i = 0;
        stmt_ = 0;
        while (i < toks_.size()) {
            std::string_view t = text(i);
            Scope::Kind kind = scope_kind();

            if (t == "template" && i + 1 < toks_.size() && text(i + 1) == "<") {
                i = skip_angles(i + 1) + 1;
                continue;
            }
            if (t == "using") {
                while (i < toks_.size() && text(i) != ";") ++i;
                ++i;
                stmt_ = i;
                continue;
            }
            if (t == "namespace" && kind != Scope::Skip) {
                i = handle_namespace(i);
                continue;
            }
            if (t == "extern" && i + 2 < toks_.size() &&
                toks_[i + 1].kind == TokenKind::String && text(i + 2) == "{") {
                scopes_.push_back(Scope{Scope::Namespace, "", 0});
                i += 3;
                stmt_ = i;
                continue;
            }
            if ((t == "class" || t == "struct" || t == "union" || t == "enum") &&
                kind != Scope::Skip) {
                std::size_t next = handle_record(i);
                if (next != i) {
                    i = next;
                    continue;
                }
            }
            if (t == "{") {
                scopes_.push_back(Scope{Scope::Skip, "", 0});
                ++i;
                stmt_ = i;
                continue;
            }
            if (t == "}") {
                if (!scopes_.empty()) {
                    if (scopes_.back().kind == Scope::Record) {
                        ClassInfo& rec = out_.records[scopes_.back().record_index];
                        rec.end_line = toks_[i].line;
                        rec.end_offset = toks_[i].end;
                    }
                    scopes_.pop_back();
                }
                ++i;
                stmt_ = i;
                continue;
            }
            if (t == ";") {
                maybe_record_field(i);
                ++i;
                stmt_ = i;
                continue;
            }
            if (t == ":" && in_record_scope() && i == stmt_ + 1 &&
                (text(stmt_) == "public" || text(stmt_) == "private" ||
                 text(stmt_) == "protected")) {
                ++i;
                stmt_ = i;
                continue;
            }
            if (t == "(" && kind != Scope::Skip) {
                std::size_t next = try_function(i);
                if (next != i) {
                    i = next;
                    stmt_ = i;
                    continue;
                }
                // Not a declaration; skip the parenthesized group wholesale.
                i = find_matching(i, "(", ")") + 1;
                continue;
            }
            ++i;
        }
    }

    std::size_t handle_namespace(std::size_t i) {
        std::size_t k = i + 1;
        std::string name;
        while (k < toks_.size() &&
               (toks_[k].kind == TokenKind::Identifier || text(k) == "::")) {
            name += text(k);
            ++k;
        }
        if (k < toks_.size() && text(k) == "=") {  // namespace alias
            while (k < toks_.size() && text(k) != ";") ++k;
            stmt_ = k + 1;
            return k + 1;
        }
        if (k < toks_.size() && text(k) == "{") {
            NamespaceDecl decl;
            decl.name = name;
            decl.line = toks_[i].line;
            decl.text = normalize_ws(src_.substr(toks_[i].begin, toks_[k - (name.empty() ? 0 : 1)].end - toks_[i].begin));
            if (name.empty()) decl.text = "namespace";
            out_.namespaces.push_back(decl);
            scopes_.push_back(Scope{Scope::Namespace, name, 0});
            stmt_ = k + 1;
            return k + 1;
        }
        stmt_ = k;
        return k;
    }

    // Returns the next token index, or `i` unchanged when this is not a
    // record declaration we handle (e.g. `enum` used as an elaborated type).
    std::size_t handle_record(std::size_t i) {
        std::string_view kw = text(i);
        std::size_t k = i + 1;
        RecordKind rkind = kw == "struct" ? RecordKind::Struct
                         : kw == "enum"   ? RecordKind::Enum
                                          : RecordKind::Class;
        if (kw == "enum" && k < toks_.size() &&
            (text(k) == "class" || text(k) == "struct"))
            ++k;
        std::string name;
        if (k < toks_.size() && toks_[k].kind == TokenKind::Identifier) {
            name = text(k);
            ++k;
        }
        // Skip template argument list on the name, base clause, enum base.
        while (k < toks_.size() && text(k) != "{" && text(k) != ";") {
            if (text(k) == "<") {
                k = skip_angles(k) + 1;
                continue;
            }
            if (text(k) == "(" || text(k) == "=") return i;  // elaborated use, not a declaration
            ++k;
        }
        if (k >= toks_.size() || text(k) == ";") return i;  // forward declaration
        ClassInfo rec;
        rec.kind = rkind;
        rec.name = name;
        rec.namespaces = namespace_chain();
        rec.decl_line = toks_[i].line;
        rec.decl_begin = toks_[i].begin;
        out_.records.push_back(rec);
        std::size_t rec_index = out_.records.size() - 1;
        if (rkind == RecordKind::Enum) {
            // Enum bodies hold no members we model; skip to the closing brace.
            std::size_t close = find_matching(k, "{", "}");
            out_.records[rec_index].end_line = toks_[close < toks_.size() ? close : k].line;
            out_.records[rec_index].end_offset =
                close < toks_.size() ? toks_[close].end : toks_[k].end;
            stmt_ = close + 1;
            return close + 1;
        }
        scopes_.push_back(Scope{Scope::Record, name, rec_index});
        stmt_ = k + 1;
        return k + 1;
    }

    void maybe_record_field(std::size_t semi) {
        if (!in_record_scope() || semi <= stmt_) return;
        std::string_view first = text(stmt_);
        if (first == "friend" || first == "typedef" || first == "public" ||
            first == "private" || first == "protected" || first == "static_assert")
            return;
        std::string decl = normalize_ws(
            src_.substr(toks_[stmt_].begin, toks_[semi].end - toks_[stmt_].begin));
        out_.records[scopes_.back().record_index].field_decls.push_back(std::move(decl));
    }

    // Attempts to parse a function declaration/definition whose parameter
    // list opens at token `open`. Returns the index to resume at, or `open`
    // unchanged on failure.
    std::size_t try_function(std::size_t open) {
        if (open == 0 || open <= stmt_) return open;
        std::size_t j = open - 1;
        std::string name;
        std::size_t name_start = j;

        if (toks_[j].kind == TokenKind::Identifier) {
            name = std::string(text(j));
            if (name == "operator") return open;  // handled at the call-operator parens
            if (kControlKeywords.count(text(j))) return open;
            if (j > stmt_ && text(j - 1) == "~") {
                name = "~" + name;
                name_start = j - 1;
            }
        } else if (toks_[j].kind == TokenKind::Punct) {
            // operator overloads: `operator==`, `operator()`, `operator[]`.
            std::size_t k = j;
            while (k > stmt_ && toks_[k].kind == TokenKind::Punct) --k;
            if (toks_[k].kind == TokenKind::Identifier && text(k) == "operator") {
                name = "operator";
                for (std::size_t p = k + 1; p <= j; ++p) name += text(p);
                name_start = k;
            } else {
                return open;
            }
        } else {
            return open;
        }

        // Qualified name: `Class::name`, `ns::Class::name`, `Class<T>::name`.
        std::vector<std::string> qualifiers;
        std::size_t k = name_start;
        while (k >= stmt_ + 2 && text(k - 1) == "::") {
            std::size_t q = k - 2;
            if (toks_[q].kind == TokenKind::Identifier) {
                qualifiers.insert(qualifiers.begin(), std::string(text(q)));
                k = q;
            } else if (text(q) == ">" || text(q) == ">>") {
                int depth = 0;
                std::size_t p = q;
                while (p > stmt_) {
                    std::string_view pt = text(p);
                    if (pt == ">") ++depth;
                    else if (pt == ">>") depth += 2;
                    else if (pt == "<") --depth;
                    if (depth == 0) break;
                    --p;
                }
                if (p <= stmt_ || p == 0 || toks_[p - 1].kind != TokenKind::Identifier) break;
                qualifiers.insert(qualifiers.begin(), std::string(text(p - 1)));
                k = p - 1;
            } else {
                break;
            }
            if (k < stmt_) break;
        }

        // Reject initializers and member accesses.
        for (std::size_t p = stmt_; p < k; ++p)
            if (text(p) == "=" || text(p) == "." || text(p) == "->") return open;
        if (k > stmt_ && (text(k - 1) == "." || text(k - 1) == "->")) return open;

        std::size_t close = find_matching(open, "(", ")");
        if (close >= toks_.size()) return open;

        // Scan post-parameter qualifiers.
        std::size_t q = close + 1;
        bool is_const = false;
        while (q < toks_.size()) {
            std::string_view qt = text(q);
            if (qt == "const") {
                is_const = true;
                ++q;
            } else if (qt == "volatile" || qt == "override" || qt == "final" ||
                       qt == "&" || qt == "&&" || qt == "mutable") {
                ++q;
            } else if (qt == "noexcept" || qt == "throw") {
                ++q;
                if (q < toks_.size() && text(q) == "(") q = find_matching(q, "(", ")") + 1;
            } else if (qt == "[") {
                q = find_matching(q, "[", "]") + 1;
            } else if (qt == "->") {
                ++q;
                int angle = 0;
                while (q < toks_.size()) {
                    std::string_view tt = text(q);
                    if (tt == "<") ++angle;
                    else if (tt == ">") --angle;
                    else if (tt == ">>") angle -= 2;
                    else if (angle <= 0 && (tt == "{" || tt == ";" || tt == "=" || tt == ":"))
                        break;
                    else if (tt == "(") {
                        q = find_matching(q, "(", ")");
                    }
                    ++q;
                }
            } else {
                break;
            }
        }
        if (q >= toks_.size()) return open;

        std::size_t sig_end_tok = q;  // first token past the signature
        std::string_view decide = text(q);
        bool is_definition = false;
        std::size_t end_tok = q;

        if (decide == "{") {
            is_definition = true;
            end_tok = find_matching(q, "{", "}");
        } else if (decide == ";") {
            end_tok = q;
        } else if (decide == "=") {
            if (q + 2 < toks_.size() &&
                (text(q + 1) == "default" || text(q + 1) == "delete" || text(q + 1) == "0") &&
                text(q + 2) == ";") {
                end_tok = q + 2;
            } else {
                return open;
            }
        } else if (decide == ":") {
            // Constructor member-initializer list.
            std::size_t p = q + 1;
            while (p < toks_.size()) {
                while (p < toks_.size() && (toks_[p].kind == TokenKind::Identifier ||
                                            text(p) == "::" || text(p) == "<" ||
                                            text(p) == ">" || text(p) == ","))
                    ++p;
                if (p >= toks_.size()) return open;
                if (text(p) == "(") {
                    p = find_matching(p, "(", ")") + 1;
                    if (p < toks_.size() && text(p) == ",") {
                        ++p;
                        continue;
                    }
                } else if (text(p) == "{") {
                    // Either a brace initializer or the body; a body is not
                    // followed by ',' after its matching brace.
                    std::size_t close_b = find_matching(p, "{", "}");
                    if (close_b + 1 < toks_.size() && text(close_b + 1) == ",") {
                        p = close_b + 2;
                        continue;
                    }
                    break;  // `p` opens the body
                } else {
                    return open;
                }
                if (p < toks_.size() && text(p) == "{") break;
            }
            if (p >= toks_.size() || text(p) != "{") return open;
            is_definition = true;
            q = p;
            end_tok = find_matching(q, "{", "}");
        } else {
            return open;
        }
        if (end_tok >= toks_.size()) return open;

        std::string return_type =
            k > stmt_ ? join_type_tokens(src_, toks_, stmt_, k) : std::string();
        // Declarations at namespace scope without a return type are almost
        // always macro invocations; keep them only when qualified.
        if (!is_definition && return_type.empty() && qualifiers.empty() && !in_record_scope())
            return open;

        FunctionInfo fn;
        fn.name = name;
        if (!qualifiers.empty())
            fn.class_name = qualifiers.back();
        else if (const ClassInfo* rec = current_record())
            fn.class_name = rec->name;
        fn.namespaces = namespace_chain();
        fn.return_type = return_type;
        fn.param_types = parse_parameter_types(
            src_.substr(toks_[open].end, toks_[close].begin - toks_[open].end));
        fn.signature = normalize_ws(
            src_.substr(toks_[stmt_].begin, toks_[sig_end_tok - 1].end - toks_[stmt_].begin));
        (void)is_const;
        fn.is_definition = is_definition;
        fn.decl_line = toks_[stmt_].line;
        fn.decl_begin = toks_[stmt_].begin;
        if (is_definition) {
            fn.body_open_line = toks_[q].line;
            fn.body_open_offset = toks_[q].begin;
        }
        fn.end_line = toks_[end_tok].line;
        fn.end_offset = toks_[end_tok].end;
        out_.functions.push_back(std::move(fn));
        return end_tok + 1;
    }
};

}  // namespace

FileSyntax LexerBackend::parse(std::string_view source) const {
    FileSyntax out;
    StructureParser parser(source, out);
    parser.run();
    return out;
}

const SyntaxBackend& default_backend() {
    static LexerBackend backend;
    return backend;
}

}  // namespace citywalk::syntax
