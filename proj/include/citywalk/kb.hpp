#pragma once

#include <optional>
#include <string>
#include <vector>

#include "citywalk/repo_model.hpp"

namespace citywalk {

struct DocChunk {
    std::string id;
    fs::path source;
    std::vector<std::string> heading_path;  // markdown title chain, may be empty
    std::string text;
    std::vector<float> vector;  // unit-norm once embedded
};

enum class CodeChunkKind { Method, Comment };

struct CodeChunk {
    std::string id;
    fs::path source;
    CodeChunkKind kind = CodeChunkKind::Method;
    std::string name;                      // method name; empty for comments
    std::vector<std::string> param_types;  // methods only
    std::string text;                      // byte-exact slice
};

struct RetrievalResult {
    std::string chunk_id;
    double score = 0.0;  // cosine for docs, 1.0 for exact code matches
    std::string snippet;
};

class EmbeddingProvider {
  public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) = 0;
    virtual std::size_t dimension() const = 0;
};

// Deterministic local embedder: signed token hashing into `dim` buckets.
// Identical texts always map to identical vectors.
class HashingEmbedder final : public EmbeddingProvider {
  public:
    explicit HashingEmbedder(std::size_t dim = 64) : dim_(dim) {}
    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override;
    std::size_t dimension() const override { return dim_; }

  private:
    std::size_t dim_;
};

struct DocStore {
    std::size_t dimension = 0;
    std::vector<DocChunk> chunks;
};

struct CodeStore {
    std::vector<CodeChunk> chunks;
};

struct KnowledgeBase {
    DocStore docs;
    CodeStore code;
    std::vector<Warning> warnings;
};

inline constexpr std::size_t kParagraphFloor = 200;  // chars, merged forward

std::vector<DocChunk> chunk_documents(const std::vector<fs::path>& doc_files,
                                      std::vector<Warning>* warnings = nullptr,
                                      std::size_t paragraph_floor = kParagraphFloor);

std::vector<CodeChunk> chunk_source(
    const std::vector<fs::path>& source_files, const std::vector<fs::path>& header_files,
    std::vector<Warning>* warnings = nullptr,
    const syntax::SyntaxBackend& backend = syntax::default_backend());

// Embeds every chunk and L2-normalizes on store. Retries transient provider
// failures (3 attempts) before rethrowing.
void embed_chunks(std::vector<DocChunk>& chunks, EmbeddingProvider& provider);

std::vector<RetrievalResult> retrieve_docs(const std::string& query, const DocStore& kb,
                                           EmbeddingProvider& provider, int k = 2);

std::vector<RetrievalResult> retrieve_code_examples(const FocalMethod& focal,
                                                    const CodeStore& kb);

std::string build_query_statement(const FocalMethod& focal);

KnowledgeBase build_knowledge_base(
    const RepoIndex& index, EmbeddingProvider& provider,
    const syntax::SyntaxBackend& backend = syntax::default_backend());

void save_index(const KnowledgeBase& kb, const fs::path& path);
// Fails (nullopt) on schema/version/dimension mismatch or unreadable file.
std::optional<KnowledgeBase> load_index(const fs::path& path, std::size_t expected_dimension);

}  // namespace citywalk
