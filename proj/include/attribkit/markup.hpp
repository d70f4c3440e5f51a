#pragma once

#include <string>
#include <vector>

namespace attribkit::markup {

/// One sentence of an answer plus the citations attached to it.
/// `citations` are 1-based indices into the answer's context documents,
/// kept in first-occurrence order without duplicates. `text` carries no
/// citation markers.
struct Statement {
    std::string text;
    std::vector<int> citations;

    bool operator==(const Statement&) const = default;
};

/// An ordered list of statements. Serializing and re-parsing a valid
/// answer reproduces the same statement list; validity requires every
/// statement except possibly the last to end in sentence-final
/// punctuation.
struct AttributedAnswer {
    std::vector<Statement> statements;

    bool operator==(const AttributedAnswer&) const = default;
};

struct ParseWarning {
    int statement_index = 0;  // 0-based
    std::string marker;       // the bracket group left in the text
};

struct ParseResult {
    AttributedAnswer answer;
    std::vector<ParseWarning> warnings;
};

/// Splits text into sentences on `.`, `!`, `?` followed by whitespace or
/// end of input. A fixed abbreviation list ("e.g.", "i.e.", "Dr.", ...)
/// guards against false splits; a period directly followed by a
/// non-space character (as in "4.6") never splits. Whitespace runs are
/// collapsed, so joining the segments with single spaces reproduces the
/// whitespace-normalized input. Empty input gives an empty list.
std::vector<std::string> segment_statements(const std::string& input);

/// Parses bracket-annotated answer text into statements. Numeric `[k]`
/// markers anywhere in a sentence are extracted (deduplicated, order
/// kept) into that statement's citation set and removed from the text.
/// Non-numeric bracket groups stay in the text verbatim and produce a
/// warning record.
ParseResult parse_answer(const std::string& input);

/// Renders statements back to bracket-annotated text: citations are
/// printed as `[k1][k2]` immediately before the sentence-final
/// punctuation mark (or appended when the text has none), statements
/// joined by single spaces.
std::string serialize_answer(const AttributedAnswer& answer);

/// Backward citation propagation: walking from the last statement to the
/// first with a buffer of the most recently seen citation set, uncited
/// statements receive a copy of the buffer. Statement order and texts are
/// unchanged; the operation is idempotent.
AttributedAnswer refine_citations(const AttributedAnswer& answer);

}  // namespace attribkit::markup
