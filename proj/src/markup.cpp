#include "attribkit/markup.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "attribkit/text.hpp"

namespace attribkit::markup {

namespace {

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

// Lowercased tokens whose trailing period does not end a sentence.
const std::unordered_set<std::string>& abbreviations() {
    static const std::unordered_set<std::string> abbrevs = {
        "e.g.", "i.e.", "etc.", "vs.",  "cf.",  "al.",   "dr.",  "mr.",
        "mrs.", "ms.",  "ms.",  "prof.", "st.",  "no.",  "fig.", "u.s.",
        "u.k.", "a.m.", "p.m.", "inc.",  "jr.",  "sr.",
    };
    return abbrevs;
}

// Token ending at position i (inclusive), leading punctuation stripped.
std::string token_ending_at(const std::string& s, std::size_t i) {
    std::size_t begin = i;
    while (begin > 0 && s[begin - 1] != ' ') --begin;
    while (begin <= i && std::isalnum(static_cast<unsigned char>(s[begin])) == 0) ++begin;
    if (begin > i) return {};
    return text::to_lower(std::string_view(s).substr(begin, i - begin + 1));
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

// Drops spaces that precede punctuation, e.g. "ago ." left behind by
// marker removal.
std::string collapse_space_before_punct(const std::string& s) {
    static const std::string puncts = ".,!?;:";
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == ' ' && i + 1 < s.size() && puncts.find(s[i + 1]) != std::string::npos) {
            continue;
        }
        out.push_back(s[i]);
    }
    return out;
}

}  // namespace

std::vector<std::string> segment_statements(const std::string& input) {
    const std::string s = text::normalize_whitespace(input);
    std::vector<std::string> segments;
    if (s.empty()) return segments;

    std::size_t begin = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!is_terminal(s[i])) continue;
        const bool at_end = i + 1 == s.size();
        if (!at_end && s[i + 1] != ' ') continue;
        if (s[i] == '.' && abbreviations().count(token_ending_at(s, i)) > 0) continue;
        segments.push_back(s.substr(begin, i - begin + 1));
        begin = at_end ? s.size() : i + 2;  // skip the separating space
    }
    if (begin < s.size()) segments.push_back(s.substr(begin));
    return segments;
}

ParseResult parse_answer(const std::string& input) {
    ParseResult result;
    const auto segments = segment_statements(input);
    for (const auto& segment : segments) {
        Statement stmt;
        std::string stripped;
        stripped.reserve(segment.size());
        std::unordered_set<int> seen;
        std::size_t i = 0;
        while (i < segment.size()) {
            if (segment[i] == '[') {
                const std::size_t close = segment.find(']', i);
                if (close != std::string::npos) {
                    const std::string_view body =
                        std::string_view(segment).substr(i + 1, close - i - 1);
                    if (all_digits(body) && body.size() <= 9) {
                        const int index = std::stoi(std::string(body));
                        if (index >= 1) {
                            if (seen.insert(index).second) stmt.citations.push_back(index);
                            i = close + 1;
                            continue;
                        }
                    }
                    result.warnings.push_back(
                        {static_cast<int>(result.answer.statements.size()),
                         segment.substr(i, close - i + 1)});
                    stripped.append(segment, i, close - i + 1);
                    i = close + 1;
                    continue;
                }
            }
            stripped.push_back(segment[i]);
            ++i;
        }
        stmt.text = collapse_space_before_punct(text::normalize_whitespace(stripped));
        if (!stmt.text.empty()) result.answer.statements.push_back(std::move(stmt));
    }
    return result;
}

std::string serialize_answer(const AttributedAnswer& answer) {
    std::string out;
    for (const auto& stmt : answer.statements) {
        if (!out.empty()) out.push_back(' ');
        if (stmt.citations.empty()) {
            out += stmt.text;
            continue;
        }
        std::string markers;
        for (int c : stmt.citations) markers += "[" + std::to_string(c) + "]";

        // insertion point: before the trailing run of terminal punctuation
        std::size_t p = stmt.text.size();
        while (p > 0 && is_terminal(stmt.text[p - 1])) --p;
        if (p == stmt.text.size()) {
            out += stmt.text + " " + markers;
        } else {
            out += stmt.text.substr(0, p) + " " + markers + stmt.text.substr(p);
        }
    }
    return out;
}

AttributedAnswer refine_citations(const AttributedAnswer& answer) {
    AttributedAnswer refined = answer;
    std::vector<int> buffer;
    for (auto it = refined.statements.rbegin(); it != refined.statements.rend(); ++it) {
        if (!it->citations.empty()) {
            buffer = it->citations;
        } else {
            it->citations = buffer;
        }
    }
    return refined;
}

}  // namespace attribkit::markup
