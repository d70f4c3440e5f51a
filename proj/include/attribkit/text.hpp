#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace attribkit::text {

/// Lowercases ASCII letters, leaves other bytes untouched.
std::string to_lower(std::string_view s);

/// Splits on any non-alphanumeric byte after ASCII lowercasing.
/// No stemming, no stopword removal.
std::vector<std::string> tokenize(std::string_view s);

/// Tokens as written (original case kept), split on non-alphanumerics.
std::vector<std::string> tokenize_cased(std::string_view s);

/// Unique tokens in first-occurrence order.
std::vector<std::string> unique_tokens(const std::vector<std::string>& tokens);

std::unordered_set<std::string> token_set(std::string_view s);

/// Small fixed English stopword list shared by the critic heuristics and
/// the scripted negative generator.
bool is_stopword(const std::string& lowercased_token);

/// A content token is a non-stopword token.
std::vector<std::string> content_tokens(std::string_view s);

/// Collapses all whitespace runs to single spaces and trims the ends.
std::string normalize_whitespace(std::string_view s);

/// 64-bit FNV-1a. Stable across platforms and processes; used wherever a
/// deterministic hash feeds an RNG seed or a manifest digest.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Combines pieces into one seed: h = fnv(p1) then fnv(p2, h) ...
std::uint64_t fnv1a_combine(std::initializer_list<std::string_view> pieces,
                            std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string fnv1a_hex(std::string_view bytes);

bool starts_with_upper(const std::string& token);

}  // namespace attribkit::text
