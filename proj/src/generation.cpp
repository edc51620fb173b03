#include "citywalk/generation.hpp"

#include <algorithm>
#include <sstream>

namespace citywalk {

namespace {

constexpr const char* kTaskDefinition =
    "You are a professional C++ test engineer. Your task is to produce a high-quality "
    "unit test case for the focal method of a C++ project repository, using the "
    "contextual information supplied below.";

std::string step_instructions_for(PromptStep step, const PromptExtras& extras) {
    switch (step) {
        case PromptStep::Understand:
            return "Step 1 - Program Understanding: Read the focal method and its "
                   "context, summarize the intended functionality of the method, and "
                   "list the core dependent ingredients (types, methods, and fields it "
                   "relies on).";
        case PromptStep::Generate: {
            std::string out =
                "Step 2 - Test Generation: Using the focal method, its configuration "
                "and cross-file dependencies, the intention context, and the intent "
                "summary, write a complete, self-contained C++ unit test file that "
                "exercises the focal method.";
            if (!extras.guidelines.empty()) {
                out += "\n\nSolution guidelines:";
                for (const Guideline& g : extras.guidelines) {
                    out += "\n- [" + g.id + "]";
                    if (g.active) out += " (ACTIVE)";
                    out += " " + g.text;
                }
            }
            return out;
        }
        case PromptStep::Refine: {
            std::string out =
                "Step 3 - Knowledge-Driven Refinement: Review the test file below "
                "against the language-specific solution guidelines and output a "
                "corrected version of the whole file.\n\nSolution guidelines:";
            for (const Guideline& g : extras.guidelines) {
                out += "\n- [" + g.id + "]";
                if (g.active) out += " (ACTIVE)";
                out += " " + g.text;
            }
            return out;
        }
        case PromptStep::Fix:
            return "Fix - Compilation Repair: The test file below failed to compile. "
                   "Use the compiler diagnostics to correct the file and output the "
                   "complete fixed file.";
    }
    return {};
}

std::string output_format_for(PromptStep step) {
    if (step == PromptStep::Understand)
        return "Respond with exactly two labeled sections:\n"
               "INTENT: <one-paragraph summary of the method's intended behavior>\n"
               "INGREDIENTS: <comma-separated keywords naming the dependent "
               "types, methods, and fields>";
    return "Respond with a single fenced C++ code block containing the complete "
           "test file and nothing else.";
}

std::string render_bundle(const PromptBundle& b) {
    std::string out;
    out += "### Task Definition\n" + b.task_definition + "\n\n";
    out += "### Step Instructions\n" + b.step_instructions + "\n\n";
    out += "### Contextual Information\n";
    for (const auto& [title, body] : b.contextual_sections)
        out += "#### " + title + "\n" + body + "\n\n";
    out += "### Output Format\n" + b.output_format + "\n";
    return out;
}

LLMResponse call_provider(LLMProvider& provider, const PromptBundle& bundle,
                          const std::string& focal_id, const std::string& step_name,
                          TranscriptRecorder* transcripts) {
    LLMRequest request;
    request.provider_id = provider.id();
    request.messages.push_back({"user", bundle.rendered});
    LLMResponse response = provider.complete(request);
    if (transcripts) transcripts->record(focal_id, step_name, request, response);
    return response;
}

}  // namespace

int estimate_tokens(std::string_view text) {
    return static_cast<int>(text.size() / 4);
}

PromptBundle assemble_prompt(PromptStep step, const PromptSections& sections,
                             const PromptExtras& extras, int token_budget) {
    PromptBundle b;
    b.task_definition = kTaskDefinition;
    b.step_instructions = step_instructions_for(step, extras);
    b.output_format = output_format_for(step);

    auto add = [&](const char* title, const std::string& body) {
        if (!body.empty()) b.contextual_sections.emplace_back(title, body);
    };
    add("Focal Context", sections.focal_context);
    add("Configuration Dependencies", sections.config_deps);
    add("Cross-File Dependencies", sections.cross_file_deps);
    if (!sections.intention_contexts.empty()) {
        std::string joined;
        for (const auto& c : sections.intention_contexts) {
            if (!joined.empty()) joined += "\n---\n";
            joined += c;
        }
        b.contextual_sections.emplace_back("Intention Contexts", joined);
    }
    add("Intent Summary", sections.intent_summary);
    add("Dependent Ingredients", sections.ingredients);
    if (step == PromptStep::Refine || step == PromptStep::Fix)
        add("Current Test File", extras.prior_source);
    if (step == PromptStep::Fix) add("Compiler Diagnostics", extras.diagnostics);

    b.rendered = render_bundle(b);
    b.token_estimate = estimate_tokens(b.rendered);

    // Budget guard: drop sections in reverse priority, never the focal
    // context and never the step-specific payload sections.
    static const char* kDropOrder[] = {"Intention Contexts", "Dependent Ingredients",
                                       "Intent Summary", "Cross-File Dependencies",
                                       "Configuration Dependencies"};
    for (const char* victim : kDropOrder) {
        if (b.token_estimate <= token_budget) break;
        auto it = std::find_if(b.contextual_sections.begin(), b.contextual_sections.end(),
                               [&](const auto& s) { return s.first == victim; });
        if (it == b.contextual_sections.end()) continue;
        b.contextual_sections.erase(it);
        b.truncated_sections.push_back(victim);
        b.rendered = render_bundle(b);
        b.token_estimate = estimate_tokens(b.rendered);
    }
    if (b.token_estimate > token_budget)
        throw PerMethodError("focal context alone exceeds the prompt token budget (" +
                             std::to_string(b.token_estimate) + " > " +
                             std::to_string(token_budget) + ")");
    return b;
}

IntentSummary parse_intent_response(const std::string& text) {
    IntentSummary out;
    std::size_t intent_pos = text.find("INTENT:");
    std::size_t ingredients_pos = text.find("INGREDIENTS:");
    if (intent_pos == std::string::npos) {
        out.intent = trim(text);
        out.structured = false;
        return out;
    }
    std::size_t intent_start = intent_pos + 7;
    std::size_t intent_end =
        ingredients_pos == std::string::npos ? text.size() : ingredients_pos;
    out.intent = trim(text.substr(intent_start, intent_end - intent_start));
    if (ingredients_pos != std::string::npos) {
        std::string rest = text.substr(ingredients_pos + 12);
        std::string item;
        for (char c : rest) {
            if (c == ',' || c == '\n') {
                std::string t = trim(item);
                if (!t.empty()) out.ingredients.push_back(std::move(t));
                item.clear();
                if (c == '\n') break;  // the label owns a single line
            } else {
                item.push_back(c);
            }
        }
        std::string t = trim(item);
        if (!t.empty()) out.ingredients.push_back(std::move(t));
    }
    return out;
}

std::optional<std::string> extract_first_code_block(const std::string& text,
                                                    int* extra_blocks) {
    if (extra_blocks) *extra_blocks = 0;
    std::optional<std::string> first;
    std::size_t pos = 0;
    while (true) {
        std::size_t open = text.find("```", pos);
        if (open == std::string::npos) break;
        std::size_t body_start = text.find('\n', open);
        if (body_start == std::string::npos) break;
        ++body_start;
        std::size_t close = text.find("```", body_start);
        if (close == std::string::npos) break;
        std::string body = text.substr(body_start, close - body_start);
        if (!first)
            first = std::move(body);
        else if (extra_blocks)
            ++*extra_blocks;
        pos = close + 3;
    }
    return first;
}

IntentSummary run_step1_understanding(const FocalMethod& focal, const PromptSections& sections,
                                      LLMProvider& provider, TranscriptRecorder* transcripts,
                                      int token_budget) {
    PromptBundle bundle =
        assemble_prompt(PromptStep::Understand, sections, {}, token_budget);
    LLMResponse response =
        call_provider(provider, bundle, focal.id, "step1_understand", transcripts);
    if (trim(response.text).empty())
        throw PerMethodError("empty response to the understanding prompt");
    return parse_intent_response(response.text);
}

GeneratedTestFile run_step2_generate(const FocalMethod& focal, const PromptSections& sections,
                                     const IntentSummary& intent,
                                     const std::vector<Guideline>& guidelines,
                                     LLMProvider& provider, TranscriptRecorder* transcripts,
                                     int token_budget) {
    PromptSections enriched = sections;
    enriched.intent_summary = intent.intent;
    std::string joined;
    for (const auto& ing : intent.ingredients) {
        if (!joined.empty()) joined += ", ";
        joined += ing;
    }
    enriched.ingredients = joined;

    PromptExtras extras;
    extras.guidelines = guidelines;
    PromptBundle bundle =
        assemble_prompt(PromptStep::Generate, enriched, extras, token_budget);
    LLMResponse response =
        call_provider(provider, bundle, focal.id, "step2_generate", transcripts);

    int extra = 0;
    auto block = extract_first_code_block(response.text, &extra);
    if (!block) throw PerMethodError("generation response carries no fenced code block");

    GeneratedTestFile tc;
    tc.focal_id = focal.id;
    tc.source = *block;
    tc.stage = TestStage::Initial;
    tc.lineage.push_back("step2_generate");
    if (extra > 0)
        tc.notes.push_back("generation response carried " + std::to_string(extra) +
                           " extra code block(s); first taken");
    return tc;
}

GeneratedTestFile run_step3_refine(GeneratedTestFile tc,
                                   const std::vector<Guideline>& guidelines,
                                   LLMProvider& provider, TranscriptRecorder* transcripts,
                                   int token_budget) {
    if (tc.stage != TestStage::Initial)
        throw PerMethodError("refinement requires an initial-stage test file");
    tc.lineage.push_back("step3_refine");
    tc.stage = TestStage::Refined;

    if (guidelines.empty()) {
        tc.notes.push_back("refinement skipped: empty guideline list");
        return tc;
    }

    PromptExtras extras;
    extras.guidelines = guidelines;
    extras.prior_source = tc.source;
    PromptBundle bundle = assemble_prompt(PromptStep::Refine, {}, extras, token_budget);

    try {
        LLMResponse response =
            call_provider(provider, bundle, tc.focal_id, "step3_refine", transcripts);
        auto block = extract_first_code_block(response.text);
        if (block)
            tc.source = *block;
        else
            tc.notes.push_back("refinement response carried no code block; initial kept");
    } catch (const std::exception& e) {
        tc.notes.push_back(std::string("refinement provider failure; initial kept: ") +
                           e.what());
    }
    return tc;
}

std::string render_focal_context(const StructuredFocalContext& ctx) {
    std::ostringstream out;
    out << "Focal method: " << ctx.focal.signature_text() << "\n";
    out << "Defined in: " << ctx.focal.file.string() << " (lines " << ctx.focal.line_start
        << "-" << ctx.focal.line_end << ")\n";
    auto list = [&](const char* label, const std::vector<std::string>& items) {
        if (items.empty()) return;
        out << label << ":\n";
        for (const auto& i : items) out << "  " << i << "\n";
    };
    list("Standard imports", ctx.std_imports);
    list("Third-party imports", ctx.third_party_imports);
    list("Project imports", ctx.user_imports);
    list("Namespaces", ctx.namespaces);
    list("Sibling method signatures", ctx.sibling_signatures);
    list("Class fields", ctx.class_fields);
    out << "Focal method body:\n" << ctx.focal.body;
    return out.str();
}

std::string render_config_deps(const ConfigDependencies& deps) {
    std::ostringstream out;
    out << "Third-party libraries:";
    if (deps.libraries.empty()) out << " (none)";
    out << "\n";
    for (const auto& lib : deps.libraries) {
        out << "  " << lib.name;
        if (lib.version) out << " " << *lib.version;
        out << "\n";
    }
    out << "C++ standard: " << (deps.cxx_standard ? *deps.cxx_standard : "(unspecified)")
        << "\n";
    out << "gtest available: " << (deps.gtest_available ? "yes" : "no") << "\n";
    return out.str();
}

std::string render_cross_file_deps(const CrossFileDependencies& deps) {
    if (deps.entries.empty()) return {};
    std::ostringstream out;
    for (const auto& e : deps.entries)
        out << "// from " << e.declaring_file.string() << " (layer " << e.layer << ")\n"
            << e.declaration_text << "\n";
    return out.str();
}

}  // namespace citywalk
