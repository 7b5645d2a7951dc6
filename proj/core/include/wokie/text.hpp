#pragma once

#include <string>
#include <string_view>

namespace wokie::text {

/// Decodes UTF-8 into Unicode scalar values. Malformed sequences become U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

bool is_space(char32_t c);

/// Removes leading and trailing Unicode whitespace.
std::string trim(std::string_view s);

/// Collapses internal whitespace runs to a single space (after trimming).
std::string collapse_whitespace(std::string_view s);

/// Removes one or more matching outer quote pairs ("...", '...', curly and
/// angle quotation marks), re-trimming between rounds.
std::string strip_quotes(std::string_view s);

/// Unicode canonical composition (NFC).
std::string nfc(std::string_view s);

/// Unicode case folding (locale independent).
std::string casefold(std::string_view s);

/// trim + NFC: the canonical surface form used for candidate grouping.
std::string canonical(std::string_view s);

/// trim + NFC + casefold: the case-insensitive match key used when comparing
/// LLM output against candidates.
std::string match_key(std::string_view s);

/// Number of whitespace-separated tokens.
std::size_t word_count(std::string_view s);

}  // namespace wokie::text
