#pragma once

#include <string>

#include "citywalk/kb.hpp"
#include "citywalk/llm.hpp"

namespace citywalk {

// OpenAI-style chat-completions client. Network faults surface as
// TransportError (retryable); malformed response bodies are not retried.
class HttpChatProvider final : public LLMProvider {
  public:
    HttpChatProvider(std::string endpoint, std::string model, std::string api_key);
    LLMResponse complete(const LLMRequest& request) override;
    std::string id() const override { return "http:" + model_; }

  private:
    std::string endpoint_;
    std::string model_;
    std::string api_key_;
};

// OpenAI-style embeddings client.
class HttpEmbeddingProvider final : public EmbeddingProvider {
  public:
    HttpEmbeddingProvider(std::string endpoint, std::string model, std::string api_key,
                          std::size_t dimension);
    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override;
    std::size_t dimension() const override { return dimension_; }

  private:
    std::string endpoint_;
    std::string model_;
    std::string api_key_;
    std::size_t dimension_;
};

}  // namespace citywalk
