#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace sdc::io {

// Flat key-value document: one `key = value` pair per line, '#' comments
// and blank lines allowed. Duplicate or malformed lines are rejected with
// the line number and key in the message.
std::vector<std::pair<std::string, std::string>> parse_flat_config(const std::string& text,
                                                                   const std::string& source);

std::vector<std::pair<std::string, std::string>> load_config_file(const std::filesystem::path& path);

// Shortest round-trippable decimal with 12 significant digits.
std::string format_double(double v);

// Write-then-rename so readers never observe a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace sdc::io
