#include "attribkit/text.hpp"

#include <array>
#include <cctype>

namespace attribkit::text {

namespace {

bool is_alnum_byte(unsigned char c) { return std::isalnum(c) != 0; }

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words = {
        "a",     "an",    "the",   "is",    "are",   "was",    "were",  "be",
        "been",  "being", "to",    "of",    "in",    "on",     "at",    "and",
        "or",    "not",   "no",    "it",    "its",   "this",   "that",  "these",
        "those", "with",  "as",    "by",    "for",   "from",   "will",  "would",
        "can",   "could", "you",   "your",  "we",    "our",    "they",  "their",
        "he",    "she",   "his",   "her",   "i",     "my",     "me",    "us",
        "them",  "what",  "which", "who",   "when",  "where",  "why",   "how",
        "all",   "each",  "both",  "some",  "any",   "do",     "does",  "did",
        "have",  "has",   "had",   "but",   "if",    "than",   "then",  "so",
        "too",   "there", "here",  "about", "into",  "over",   "after", "before",
        "such",  "more",  "most",  "other", "only",  "own",    "same",  "also",
    };
    return words;
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : s) {
        if (is_alnum_byte(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::vector<std::string> tokenize_cased(std::string_view s) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : s) {
        if (is_alnum_byte(c)) {
            cur.push_back(static_cast<char>(c));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::vector<std::string> unique_tokens(const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& t : tokens) {
        if (seen.insert(t).second) out.push_back(t);
    }
    return out;
}

std::unordered_set<std::string> token_set(std::string_view s) {
    auto tokens = tokenize(s);
    return {tokens.begin(), tokens.end()};
}

bool is_stopword(const std::string& lowercased_token) {
    return stopwords().count(lowercased_token) > 0;
}

std::vector<std::string> content_tokens(std::string_view s) {
    std::vector<std::string> out;
    for (auto& t : tokenize(s)) {
        if (!is_stopword(t)) out.push_back(std::move(t));
    }
    return out;
}

std::string normalize_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out.push_back(' ');
            in_space = false;
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a_combine(std::initializer_list<std::string_view> pieces, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (auto p : pieces) {
        h = fnv1a(p, h);
        // separator byte so ("ab","c") != ("a","bc")
        h ^= 0x1f;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a_hex(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

bool starts_with_upper(const std::string& token) {
    return !token.empty() && std::isupper(static_cast<unsigned char>(token[0])) != 0;
}

}  // namespace attribkit::text
