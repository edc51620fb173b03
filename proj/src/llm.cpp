#include "citywalk/llm.hpp"

#include <chrono>
#include <thread>

#include <nlohmann/json.hpp>

#include "citywalk/repo_model.hpp"

namespace citywalk {

RetryingProvider::RetryingProvider(LLMProvider& inner, int attempts,
                                   std::function<void(int)> sleep_fn)
    : inner_(inner), attempts_(attempts), sleep_fn_(std::move(sleep_fn)) {
    if (!sleep_fn_)
        sleep_fn_ = [](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
}

LLMResponse RetryingProvider::complete(const LLMRequest& request) {
    int backoff_ms = 100;
    for (int attempt = 1;; ++attempt) {
        try {
            return inner_.complete(request);
        } catch (const TransportError&) {
            if (attempt >= attempts_) throw;
            sleep_fn_(backoff_ms);
            backoff_ms *= 2;
        }
    }
}

ScriptedMockProvider::ScriptedMockProvider(std::vector<Entry> script)
    : script_(std::move(script)) {}

ScriptedMockProvider ScriptedMockProvider::from_file(const fs::path& path) {
    return ScriptedMockProvider(script_from_file(path));
}

std::vector<ScriptedMockProvider::Entry> ScriptedMockProvider::script_from_file(
    const fs::path& path) {
    auto text = read_file(path);
    if (!text)
        throw FatalError(FatalError::Kind::Config,
                         "cannot read mock script: " + path.string());
    nlohmann::json j = nlohmann::json::parse(*text, nullptr, false);
    if (j.is_discarded() || j.value("schema", "") != "citywalk-mock-script" ||
        j.value("version", 0) != 1)
        throw FatalError(FatalError::Kind::Config,
                         "invalid mock script: " + path.string());
    std::vector<Entry> entries;
    for (const auto& e : j.at("entries")) {
        Entry entry;
        entry.match = e.at("match").get<std::string>();
        entry.response = e.at("response").get<std::string>();
        entry.uses = e.value("uses", -1);
        entries.push_back(std::move(entry));
    }
    return entries;
}

LLMResponse ScriptedMockProvider::complete(const LLMRequest& request) {
    std::lock_guard<std::mutex> lock(mu_);
    calls_.push_back(request);
    const std::string& prompt =
        request.messages.empty() ? std::string{} : request.messages.back().content;
    for (Entry& e : script_) {
        if (e.uses == 0) continue;
        if (prompt.find(e.match) == std::string::npos) continue;
        if (e.uses > 0) --e.uses;
        LLMResponse resp;
        resp.text = e.response;
        resp.prompt_tokens = static_cast<int>(prompt.size() / 4);
        resp.completion_tokens = static_cast<int>(e.response.size() / 4);
        resp.provider_metadata = "scripted-mock";
        return resp;
    }
    throw TransportError("scripted mock has no entry matching the prompt");
}

std::vector<LLMRequest> ScriptedMockProvider::calls() const {
    std::lock_guard<std::mutex> lock(mu_);
    return calls_;
}

void TranscriptRecorder::record(const std::string& focal_id, const std::string& step,
                                const LLMRequest& request, const LLMResponse& response) {
    nlohmann::json j;
    j["focal_id"] = focal_id;
    j["step"] = step;
    j["request"]["provider_id"] = request.provider_id;
    j["request"]["temperature"] = request.temperature;
    j["request"]["choice_count"] = request.choice_count;
    j["request"]["max_output_tokens"] = request.max_output_tokens;
    auto& msgs = j["request"]["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages)
        msgs.push_back({{"role", m.role}, {"content", m.content}});
    j["response"]["text"] = response.text;
    j["response"]["prompt_tokens"] = response.prompt_tokens;
    j["response"]["completion_tokens"] = response.completion_tokens;

    std::lock_guard<std::mutex> lock(mu_);
    fs::create_directories(dir_ / focal_id);
    fs::path file =
        dir_ / focal_id / (std::to_string(sequence_++) + "_" + slugify(step) + ".json");
    write_file(file, j.dump(2) + "\n");
}

}  // namespace citywalk
