#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace citywalk {

namespace fs = std::filesystem;

// A non-fatal problem encountered while processing a file.
struct Warning {
    std::string where;
    std::string message;
};

std::optional<std::string> read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view contents);

// Byte-exact slice covering 1-based inclusive lines [first, last] of `text`,
// including the trailing newline of `last` when present. Used both when
// extracting method bodies and when checking slice fidelity, so the two
// always agree.
std::string slice_lines(std::string_view text, int first, int last);

// 1-based line number of byte offset `pos`.
int line_of_offset(std::string_view text, std::size_t pos);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

// Shell-style glob match supporting '*' and '?'.
bool glob_match(std::string_view pattern, std::string_view text);

// Stable identifier slug: keeps [A-Za-z0-9_], maps everything else to '_'.
std::string slugify(std::string_view s);

}  // namespace citywalk
