#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace repairkit {

/// Splits on '\n'. A trailing newline does not produce an empty last line;
/// "\r\n" endings are normalized.
std::vector<std::string> split_lines(std::string_view text);

/// Joins with '\n', no trailing newline.
std::string join_lines(const std::vector<std::string> &lines);

std::string_view trim(std::string_view s);
std::string_view rtrim(std::string_view s);

/// Leading whitespace of a line.
std::string_view indentation(std::string_view line);

bool is_blank(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix);
std::string to_lower(std::string_view s);

std::string read_file(const std::filesystem::path &path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path &path, std::string_view data);

std::string sha256_hex(std::string_view data);

/// 64-bit FNV-1a. Stable across platforms; used for seeding and bucketing.
std::uint64_t fnv1a64(std::string_view data);
std::uint32_t fnv1a32(std::string_view data);

} // namespace repairkit
