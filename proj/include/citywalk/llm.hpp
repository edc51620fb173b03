#pragma once

#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "citywalk/util.hpp"

namespace citywalk {

struct LLMMessage {
    std::string role;  // "system" | "user"
    std::string content;
};

struct LLMRequest {
    std::string provider_id;
    std::vector<LLMMessage> messages;
    // Decoding invariants: greedy, single choice, bounded output.
    double temperature = 0.0;
    int choice_count = 1;
    int max_output_tokens = 4096;
};

struct LLMResponse {
    std::string text;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    std::string provider_metadata;
};

// Transient transport problem; the retry wrapper retries these only.
struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class LLMProvider {
  public:
    virtual ~LLMProvider() = default;
    // Must be safe for concurrent use.
    virtual LLMResponse complete(const LLMRequest& request) = 0;
    virtual std::string id() const = 0;
};

// 3 attempts with exponential backoff on TransportError; anything else
// propagates immediately. The sleep hook is injectable for tests.
class RetryingProvider final : public LLMProvider {
  public:
    RetryingProvider(LLMProvider& inner, int attempts = 3,
                     std::function<void(int ms)> sleep_fn = {});
    LLMResponse complete(const LLMRequest& request) override;
    std::string id() const override { return inner_.id(); }

  private:
    LLMProvider& inner_;
    int attempts_;
    std::function<void(int)> sleep_fn_;
};

// Deterministic test double: the first entry whose `match` substring appears
// in the request's last message wins. Entries with an exhausted `uses` budget
// are skipped, which lets scripts give different answers to repeated
// identical prompts. No entry matching -> TransportError.
class ScriptedMockProvider final : public LLMProvider {
  public:
    struct Entry {
        std::string match;     // substring looked up in the last message
        std::string response;  // verbatim response text
        int uses = -1;         // -1: unlimited
    };

    explicit ScriptedMockProvider(std::vector<Entry> script);
    // JSON: {"schema":"citywalk-mock-script","version":1,
    //        "entries":[{"match":..., "response":..., "uses":...}]}
    static ScriptedMockProvider from_file(const fs::path& path);
    static std::vector<Entry> script_from_file(const fs::path& path);

    LLMResponse complete(const LLMRequest& request) override;
    std::string id() const override { return "scripted-mock"; }

    std::vector<LLMRequest> calls() const;

  private:
    mutable std::mutex mu_;
    std::vector<Entry> script_;
    std::vector<LLMRequest> calls_;
};

// Appends one JSON transcript file per recorded exchange under `dir`.
class TranscriptRecorder {
  public:
    explicit TranscriptRecorder(fs::path dir) : dir_(std::move(dir)) {}
    void record(const std::string& focal_id, const std::string& step,
                const LLMRequest& request, const LLMResponse& response);

  private:
    std::mutex mu_;
    fs::path dir_;
    int sequence_ = 0;
};

}  // namespace citywalk
