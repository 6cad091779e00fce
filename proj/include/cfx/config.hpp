#pragma once

#include <map>
#include <string>

namespace cfx {

/// Flat configuration text: one `key = value` per line, '#' starts a
/// comment, blank lines ignored, later keys override earlier ones.
/// Keys are trimmed; values are trimmed and may not span lines.
std::map<std::string, std::string> parse_key_values(const std::string& text);
std::map<std::string, std::string> read_key_values(const std::string& path);

}  // namespace cfx
