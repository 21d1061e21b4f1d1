#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vforge {

std::uint64_t fnv1a64(std::string_view data);
std::string to_hex64(std::uint64_t value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Splits on '\n'; a trailing newline does not produce an empty final element.
std::vector<std::string> split_lines(std::string_view text);
std::string join_lines(const std::vector<std::string>& lines);

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

/// True when `word` occurs in `text` delimited by non-identifier characters.
bool contains_word(std::string_view text, std::string_view word);

/// "0.2" for tenths, otherwise a shortest-ish %g rendering.
std::string format_temperature(double t);

/// 100*success/total rounded half-up to two decimals, e.g. "54.55".
std::string format_percent(long long success, long long total);

}  // namespace vforge
