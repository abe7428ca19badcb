#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rationlog {

std::vector<std::string> split_whitespace(std::string_view text);
std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");
std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

// Lowercased whitespace tokens; the tokenization shared by all text metrics
// and length accounting.
std::vector<std::string> metric_tokens(std::string_view text);

// Replaces every invalid UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits by fnv1a_hex.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace rationlog
