#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the primitives, the matcher and the prompt builders.
namespace proviq::text {

std::string lower(std::string_view s);
std::string trim(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

/// Lowercase, trim, then strip trailing punctuation (".!?,;:").
std::string normalize_answer(std::string_view s);

/// Lowercase, replace ASCII punctuation with spaces, split on whitespace.
std::vector<std::string> tokenize(std::string_view s);

/// tokenize() joined with single spaces.
std::string canonical_phrase(std::string_view s);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace proviq::text
