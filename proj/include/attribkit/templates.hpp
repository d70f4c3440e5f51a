#pragma once

#include <optional>
#include <string>
#include <vector>

#include "attribkit/corpus.hpp"

namespace attribkit::templates {

enum class Kind {
    post_training,  // full-answer instruction with citation rules
    positive,       // continue with a grounded next sentence
    fabrication,    // negative: ignore the evidence
    synthesis,      // negative: intermingle entities across evidence
    omission,       // negative: drop key points from the good sentence
};

const char* kind_name(Kind kind);

struct Fields {
    std::optional<std::string> question;  // the request in continuation templates
    std::vector<corpus::Document> docs;
    std::optional<std::string> past_statements;    // "" renders as the empty marker
    std::optional<std::string> positive_statement;
};

/// Instantiates the prompt template for `kind`. Output is byte-stable:
/// blocks are separated by single blank lines, document blocks render as
/// `Document [i](Title: ...): ...`, and an empty unfinished response
/// renders as `empty_marker`. A missing required field raises an error
/// naming the placeholder.
std::string render_template(Kind kind, const Fields& fields,
                            const std::string& empty_marker = "None");

}  // namespace attribkit::templates
