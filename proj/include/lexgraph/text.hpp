#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexgraph {

/// Lowercases ASCII letters; bytes outside ASCII pass through unchanged.
std::string asciiLower(std::string_view s);

/// Splits text into maximal runs of letters and digits, lowercased.
/// Multibyte UTF-8 sequences count as letters. Input is expected to be
/// NFC-normalized; no normalization is performed here. This tokenizer is
/// shared by every scoring path so corpus statistics stay consistent.
std::vector<std::string> tokenize(std::string_view text);

/// Term -> occurrence count over a token list.
std::unordered_map<std::string, int> termFrequencies(const std::vector<std::string>& tokens);

/// Fixed suffix-stripping stemmer. Deliberately small; its exact behavior
/// is pinned by golden tests, not by any linguistic standard.
/// Stages, applied in order, each at most once:
///   plural:  -sses -> -ss, -ies -> -y, -s (len > 3, not -ss) dropped
///   verbal:  -ing / -ed dropped when at least 3 chars remain
///   deriv.:  -ly (len >= 5), -ness / -ment (len >= 8) dropped
///   final:   trailing -e dropped when at least 3 chars remain
std::string stem(std::string_view token);

/// Canonical legal-code form: alphanumeric segments uppercased and joined
/// by '-', designator tokens (ART, ARTICLE, SEC, ...) dropped, segments
/// starting with a letter placed before numeric segments (stable within
/// each class). Idempotent; empty or designator-only input yields "".
///
///   "art. 1382, CC"  -> "CC-1382"
///   "CC-1382"        -> "CC-1382"
///   "cc 1382-2"      -> "CC-1382-2"
std::string normalizeCode(std::string_view raw);

} // namespace lexgraph
