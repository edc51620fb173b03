// The only translation unit that includes the HTTP client library.
#include "citywalk/http_providers.hpp"

#include <nlohmann/json.hpp>

#define CPPHTTPLIB_NO_EXCEPTIONS
#include "httplib.h"

namespace citywalk {

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Endpoint split_endpoint(const std::string& endpoint) {
    std::size_t scheme = endpoint.find("://");
    std::size_t path_start =
        endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

nlohmann::json post_json(const std::string& endpoint, const std::string& api_key,
                         const nlohmann::json& body) {
    Endpoint ep = split_endpoint(endpoint);
    httplib::Client client(ep.origin);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
    auto result = client.Post(ep.path, headers, body.dump(), "application/json");
    if (!result)
        throw TransportError("HTTP request to " + endpoint + " failed: " +
                             httplib::to_string(result.error()));
    if (result->status < 200 || result->status >= 300)
        throw TransportError("HTTP " + std::to_string(result->status) + " from " + endpoint);
    nlohmann::json parsed = nlohmann::json::parse(result->body, nullptr, false);
    if (parsed.is_discarded())
        throw std::runtime_error("provider returned a non-JSON body");
    return parsed;
}

}  // namespace

HttpChatProvider::HttpChatProvider(std::string endpoint, std::string model,
                                   std::string api_key)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), api_key_(std::move(api_key)) {}

LLMResponse HttpChatProvider::complete(const LLMRequest& request) {
    nlohmann::json body;
    body["model"] = model_;
    body["temperature"] = request.temperature;
    body["n"] = request.choice_count;
    body["max_tokens"] = request.max_output_tokens;
    auto& messages = body["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages)
        messages.push_back({{"role", m.role}, {"content", m.content}});

    nlohmann::json parsed = post_json(endpoint_, api_key_, body);
    LLMResponse response;
    try {
        response.text = parsed.at("choices").at(0).at("message").at("content")
                            .get<std::string>();
        if (parsed.contains("usage")) {
            response.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
            response.completion_tokens = parsed["usage"].value("completion_tokens", 0);
        }
        response.provider_metadata = parsed.value("model", model_);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("unexpected chat response shape: ") + e.what());
    }
    return response;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string endpoint, std::string model,
                                             std::string api_key, std::size_t dimension)
    : endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      api_key_(std::move(api_key)),
      dimension_(dimension) {}

std::vector<std::vector<float>> HttpEmbeddingProvider::embed(
    const std::vector<std::string>& texts) {
    nlohmann::json body;
    body["model"] = model_;
    body["input"] = texts;

    nlohmann::json parsed = post_json(endpoint_, api_key_, body);
    std::vector<std::vector<float>> out;
    try {
        for (const auto& item : parsed.at("data"))
            out.push_back(item.at("embedding").get<std::vector<float>>());
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("unexpected embedding response shape: ") +
                                 e.what());
    }
    return out;
}

}  // namespace citywalk
