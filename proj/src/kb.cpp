#include "citywalk/kb.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>

#include <nlohmann/json.hpp>

namespace citywalk {

namespace {

void warn(std::vector<Warning>* warnings, const fs::path& p, const std::string& msg) {
    if (warnings) warnings->push_back({p.string(), msg});
}

bool looks_binary(const std::string& text) {
    return text.find('\0') != std::string::npos;
}

int heading_level(const std::string& line) {
    int level = 0;
    while (level < static_cast<int>(line.size()) && line[level] == '#') ++level;
    if (level == 0 || level > 6) return 0;
    if (static_cast<int>(line.size()) > level && line[level] != ' ') return 0;
    return level;
}

}  // namespace

std::vector<DocChunk> chunk_documents(const std::vector<fs::path>& doc_files,
                                      std::vector<Warning>* warnings,
                                      std::size_t paragraph_floor) {
    std::vector<DocChunk> out;
    for (const fs::path& file : doc_files) {
        auto content = read_file(file);
        if (!content || looks_binary(*content)) {
            warn(warnings, file, "undecodable document skipped");
            continue;
        }
        std::size_t ordinal = 0;
        auto emit = [&](std::vector<std::string> heading_path, std::string text) {
            text = trim(text);
            if (text.empty()) return;
            DocChunk chunk;
            chunk.id = "doc:" + file.filename().string() + ":" + std::to_string(ordinal++);
            chunk.source = file;
            chunk.heading_path = std::move(heading_path);
            chunk.text = std::move(text);
            out.push_back(std::move(chunk));
        };

        std::string ext = to_lower(file.extension().string());
        std::vector<std::string> lines = split_lines(*content);
        if (ext == ".md" || ext == ".markdown") {
            // Split at headings; heading_path records the title chain.
            std::vector<std::pair<int, std::string>> stack;  // (level, title)
            std::string body;
            auto path_of = [&] {
                std::vector<std::string> path;
                for (auto& [lvl, title] : stack) path.push_back(title);
                return path;
            };
            for (const std::string& line : lines) {
                int level = heading_level(line);
                if (level > 0) {
                    emit(path_of(), body);
                    body.clear();
                    while (!stack.empty() && stack.back().first >= level) stack.pop_back();
                    stack.emplace_back(level, trim(line.substr(level)));
                } else {
                    body += line;
                    body += '\n';
                }
            }
            emit(path_of(), body);
        } else {
            // Plain text: blank-line paragraph groups merged forward to the
            // size floor.
            std::string group;
            std::string paragraph;
            auto close_paragraph = [&] {
                if (trim(paragraph).empty()) {
                    paragraph.clear();
                    return;
                }
                if (!group.empty()) group += "\n\n";
                group += trim(paragraph);
                paragraph.clear();
                if (group.size() >= paragraph_floor) {
                    emit({}, group);
                    group.clear();
                }
            };
            for (const std::string& line : lines) {
                if (trim(line).empty())
                    close_paragraph();
                else {
                    paragraph += line;
                    paragraph += '\n';
                }
            }
            close_paragraph();
            emit({}, group);
        }
    }
    return out;
}

std::vector<CodeChunk> chunk_source(const std::vector<fs::path>& source_files,
                                    const std::vector<fs::path>& header_files,
                                    std::vector<Warning>* warnings,
                                    const syntax::SyntaxBackend& backend) {
    std::vector<CodeChunk> out;
    auto chunk_file = [&](const fs::path& file) {
        auto content = read_file(file);
        if (!content || looks_binary(*content)) {
            warn(warnings, file, "unreadable source skipped");
            return;
        }
        syntax::FileSyntax parsed = backend.parse(*content);
        if (!parsed.parse_ok) {
            warn(warnings, file, "parse failure: " + parsed.diagnostic);
            return;
        }
        std::size_t ordinal = 0;
        for (const auto& fn : parsed.functions) {
            if (!fn.is_definition) continue;
            CodeChunk chunk;
            chunk.id = "code:" + file.filename().string() + ":" + std::to_string(ordinal++);
            chunk.source = file;
            chunk.kind = CodeChunkKind::Method;
            chunk.name = fn.name;
            chunk.param_types = fn.param_types;
            chunk.text = content->substr(fn.decl_begin, fn.end_offset - fn.decl_begin);
            out.push_back(std::move(chunk));
        }
        for (const auto& comment : parsed.comments) {
            CodeChunk chunk;
            chunk.id = "code:" + file.filename().string() + ":" + std::to_string(ordinal++);
            chunk.source = file;
            chunk.kind = CodeChunkKind::Comment;
            chunk.text = comment.text;
            out.push_back(std::move(chunk));
        }
    };
    for (const fs::path& f : source_files) chunk_file(f);
    for (const fs::path& f : header_files) chunk_file(f);
    return out;
}

std::vector<std::vector<float>> HashingEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
        std::vector<float> vec(dim_, 0.0f);
        std::string token;
        auto flush = [&] {
            if (token.empty()) return;
            // FNV-1a over the lowercased token.
            std::uint64_t h = 1469598103934665603ull;
            for (char c : token) {
                h ^= static_cast<unsigned char>(std::tolower(static_cast<unsigned char>(c)));
                h *= 1099511628211ull;
            }
            float sign = (h & 1u) ? 1.0f : -1.0f;
            vec[(h >> 1) % dim_] += sign;
            token.clear();
        };
        for (char c : text) {
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
                token.push_back(c);
            else
                flush();
        }
        flush();
        out.push_back(std::move(vec));
    }
    return out;
}

namespace {

void l2_normalize(std::vector<float>& v) {
    double norm = 0.0;
    for (float x : v) norm += static_cast<double>(x) * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return;
    for (float& x : v) x = static_cast<float>(x / norm);
}

}  // namespace

void embed_chunks(std::vector<DocChunk>& chunks, EmbeddingProvider& provider) {
    if (chunks.empty()) return;
    std::vector<std::string> texts;
    texts.reserve(chunks.size());
    for (const auto& c : chunks) texts.push_back(c.text);

    std::vector<std::vector<float>> vectors;
    int attempts = 0;
    for (;;) {
        try {
            vectors = provider.embed(texts);
            break;
        } catch (const std::exception&) {
            if (++attempts >= 3) throw;
        }
    }
    if (vectors.size() != chunks.size())
        throw std::runtime_error("embedding provider returned " +
                                 std::to_string(vectors.size()) + " vectors for " +
                                 std::to_string(chunks.size()) + " chunks");
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (vectors[i].size() != provider.dimension())
            throw std::runtime_error("embedding dimension mismatch");
        chunks[i].vector = std::move(vectors[i]);
        l2_normalize(chunks[i].vector);
    }
}

std::vector<RetrievalResult> retrieve_docs(const std::string& query, const DocStore& kb,
                                           EmbeddingProvider& provider, int k) {
    std::vector<RetrievalResult> out;
    if (kb.chunks.empty() || k < 1) return out;
    auto vectors = provider.embed({query});
    if (vectors.size() != 1 || vectors[0].size() != kb.dimension) return out;
    std::vector<float> q = std::move(vectors[0]);
    l2_normalize(q);

    std::vector<std::pair<double, const DocChunk*>> scored;
    for (const DocChunk& chunk : kb.chunks) {
        if (chunk.vector.size() != kb.dimension) continue;
        double dot = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i)
            dot += static_cast<double>(q[i]) * chunk.vector[i];
        dot = std::clamp(dot, -1.0, 1.0);
        scored.emplace_back(dot, &chunk);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second->id < b.second->id;  // ties: lower id first
    });
    for (std::size_t i = 0; i < scored.size() && i < static_cast<std::size_t>(k); ++i)
        out.push_back({scored[i].second->id, scored[i].first, scored[i].second->text});
    return out;
}

namespace {

enum class ParamClass { Floating, Integral, StringLike, Unknown };

ParamClass classify_param(const std::string& type) {
    std::string t = to_lower(type);
    if (t.find("double") != std::string::npos || t.find("float") != std::string::npos)
        return ParamClass::Floating;
    if (t.find("string") != std::string::npos || t.find("char*") != std::string::npos ||
        t.find("char *") != std::string::npos || t.find("string_view") != std::string::npos)
        return ParamClass::StringLike;
    if (t.find("int") != std::string::npos || t.find("long") != std::string::npos ||
        t.find("short") != std::string::npos || t.find("size_t") != std::string::npos ||
        t.find("unsigned") != std::string::npos)
        return ParamClass::Integral;
    return ParamClass::Unknown;
}

// Splits a call argument list at top-level commas.
std::vector<std::string> split_arguments(std::string_view args) {
    std::vector<std::string> out;
    int depth = 0;
    std::string current;
    for (const syntax::Token& t : syntax::lex(args)) {
        std::string_view text = syntax::token_text(args, t);
        if (text == "(" || text == "[" || text == "{") ++depth;
        if (text == ")" || text == "]" || text == "}") --depth;
        if (text == "," && depth == 0) {
            out.push_back(trim(current));
            current.clear();
            continue;
        }
        if (!current.empty()) current += ' ';
        current += text;
    }
    if (!trim(current).empty() || !out.empty()) out.push_back(trim(current));
    if (out.size() == 1 && out[0].empty()) out.clear();
    return out;
}

// A literal cue may only veto a candidate; unknowns always pass.
bool argument_compatible(const std::string& arg, const std::string& param_type) {
    ParamClass pc = classify_param(param_type);
    auto toks = syntax::lex(arg);
    if (toks.size() != 1) return true;  // expression or variable: unknown type
    const syntax::Token& t = toks[0];
    std::string_view text = syntax::token_text(arg, t);
    if (t.kind == syntax::TokenKind::Number) {
        bool is_float = text.find('.') != std::string_view::npos ||
                        text.find('e') != std::string_view::npos ||
                        text.find('E') != std::string_view::npos ||
                        text.find('f') != std::string_view::npos ||
                        text.find('F') != std::string_view::npos;
        if (!is_float && pc == ParamClass::Floating) return false;  // f(1) vs f(double)
        if (pc == ParamClass::StringLike) return false;
        return true;
    }
    if (t.kind == syntax::TokenKind::String || t.kind == syntax::TokenKind::CharLit)
        return pc == ParamClass::StringLike || pc == ParamClass::Unknown;
    return true;
}

}  // namespace

std::vector<RetrievalResult> retrieve_code_examples(const FocalMethod& focal,
                                                    const CodeStore& kb) {
    std::vector<RetrievalResult> out;
    if (focal.name.empty()) return out;

    std::string escaped;
    for (char c : focal.name) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') escaped += '\\';
        escaped += c;
    }
    // Word-boundary name followed by a parenthesized argument list.
    std::regex pattern("\\b" + escaped + "\\s*\\(([^)]*)\\)");

    for (const CodeChunk& chunk : kb.chunks) {
        // Never return the focal definition itself.
        if (chunk.kind == CodeChunkKind::Method && chunk.source == focal.file &&
            chunk.name == focal.name && chunk.param_types == focal.param_types)
            continue;

        bool verified = false;
        auto begin = std::sregex_iterator(chunk.text.begin(), chunk.text.end(), pattern);
        for (auto it = begin; it != std::sregex_iterator(); ++it) {
            std::string args = (*it)[1].str();
            std::vector<std::string> arguments = split_arguments(args);
            if (arguments.size() != focal.param_types.size()) continue;
            bool ok = true;
            for (std::size_t i = 0; i < arguments.size(); ++i)
                if (!argument_compatible(arguments[i], focal.param_types[i])) ok = false;
            if (ok) {
                verified = true;
                break;
            }
        }
        if (verified) out.push_back({chunk.id, 1.0, chunk.text});
    }
    std::sort(out.begin(), out.end(),
              [](const RetrievalResult& a, const RetrievalResult& b) {
                  return a.chunk_id < b.chunk_id;
              });
    return out;
}

std::string build_query_statement(const FocalMethod& focal) {
    if (focal.class_name.empty())
        return "What is the functionality and intended behavior of method " + focal.name + "?";
    return "What is the functionality and intended behavior of method " + focal.name +
           " in class " + focal.class_name + "?";
}

KnowledgeBase build_knowledge_base(const RepoIndex& index, EmbeddingProvider& provider,
                                   const syntax::SyntaxBackend& backend) {
    KnowledgeBase kb;
    kb.docs.dimension = provider.dimension();
    kb.docs.chunks = chunk_documents(index.doc_files, &kb.warnings);
    embed_chunks(kb.docs.chunks, provider);
    kb.code.chunks = chunk_source(index.source_files, index.header_files, &kb.warnings, backend);
    return kb;
}

void save_index(const KnowledgeBase& kb, const fs::path& path) {
    nlohmann::json j;
    j["schema"] = "citywalk-kb";
    j["version"] = 1;
    j["dimension"] = kb.docs.dimension;
    auto& docs = j["docs"] = nlohmann::json::array();
    for (const auto& c : kb.docs.chunks)
        docs.push_back({{"id", c.id},
                        {"source", c.source.string()},
                        {"heading_path", c.heading_path},
                        {"text", c.text},
                        {"vector", c.vector}});
    auto& code = j["code"] = nlohmann::json::array();
    for (const auto& c : kb.code.chunks)
        code.push_back({{"id", c.id},
                        {"source", c.source.string()},
                        {"kind", c.kind == CodeChunkKind::Method ? "method" : "comment"},
                        {"name", c.name},
                        {"param_types", c.param_types},
                        {"text", c.text}});
    write_file(path, j.dump(2));
}

std::optional<KnowledgeBase> load_index(const fs::path& path, std::size_t expected_dimension) {
    auto content = read_file(path);
    if (!content) return std::nullopt;
    nlohmann::json j = nlohmann::json::parse(*content, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    if (j.value("schema", "") != "citywalk-kb" || j.value("version", 0) != 1) return std::nullopt;
    if (j.value("dimension", std::size_t{0}) != expected_dimension) return std::nullopt;

    KnowledgeBase kb;
    kb.docs.dimension = expected_dimension;
    for (const auto& e : j.value("docs", nlohmann::json::array())) {
        DocChunk c;
        c.id = e.value("id", "");
        c.source = e.value("source", "");
        c.heading_path = e.value("heading_path", std::vector<std::string>{});
        c.text = e.value("text", "");
        c.vector = e.value("vector", std::vector<float>{});
        if (c.vector.size() != expected_dimension) return std::nullopt;
        kb.docs.chunks.push_back(std::move(c));
    }
    for (const auto& e : j.value("code", nlohmann::json::array())) {
        CodeChunk c;
        c.id = e.value("id", "");
        c.source = e.value("source", "");
        c.kind = e.value("kind", "method") == "comment" ? CodeChunkKind::Comment
                                                        : CodeChunkKind::Method;
        c.name = e.value("name", "");
        c.param_types = e.value("param_types", std::vector<std::string>{});
        c.text = e.value("text", "");
        kb.code.chunks.push_back(std::move(c));
    }
    return kb;
}

}  // namespace citywalk
