#include "attribkit/templates.hpp"

#include <stdexcept>

namespace attribkit::templates {

namespace {

constexpr const char* kPostTrainingHeader =
    "Write an accurate, engaging, and concise answer for the given question using only the "
    "provided documents (some of which might be irrelevant) and cite them properly. Use an "
    "unbiased and journalistic tone. Always cite for any factual claim. When citing several "
    "search results, use [1][2][3]. Cite at least one document and at most three documents in "
    "each sentence. If multiple documents support the sentence, only cite a minimum sufficient "
    "subset of the documents.";

constexpr const char* kTaskHigh =
    "Task: Your job is to write a high quality response with requirements as follows:";
constexpr const char* kTaskLow =
    "Task: Your job is to write a low quality response with requirements as follows:";

constexpr const char* kGeneralContinue =
    "General: Given Request, incomplete response and evidence, continue write a single "
    "sentence as the next sentence of the unfinished response. If text in unfinished response "
    "is \"None\", you should start the response(the first sentence).";

constexpr const char* kGeneralOmission =
    "General: Given Request, unfinished response and next sentence, omit some important "
    "points from the next sentence(good) and convert it into a worse response. Your converted "
    "worse response should be consistent with the unfinished response.";

constexpr const char* kDetailPositive =
    "Detail: You should always use the facts from the evidences to propuse your response. "
    "Your response is correct and comprehensive, fully supported by the evidence we provided. "
    "**Don't use any evidence that can be directly retrieved from the evidences we "
    "provided**. No hallucinations, no factual errors, no logic errors.";

constexpr const char* kDetailFabrication =
    "Detail: You will always ignore the evidence. On one hand, you won't follow the evidence "
    "we provided, your response should be irrelevant to the evidence we provided. On the "
    "other hand, your response should be relevant to the unfinished response.";

constexpr const char* kDetailSynthesis =
    "Detail: You should first, identify the relationships and entities in evidence; second, "
    "continue writing the next sentence of the response span with regard to the evidence. In "
    "your response, the relationships and entities should be mistakenly intermingled(you are "
    "making negative samples, we need low-quality data).";

constexpr const char* kOmissionExamples =
    "Request: List the ingredients needed to make a peanut butter and jelly sandwich\n"
    "\n"
    "Unfinished response:\n"
    "\n"
    "Raw sentence(good): To make a peanut butter and jelly sandwich, you will need peanut "
    "butter, jelly or jam of your choice, and bread.\n"
    "\n"
    "Worse sentence(bad, omit the evidence): To make a peanut butter and jelly sandwich, you "
    "will need peanut butter and bread.\n"
    "\n"
    "Request: What are the three features of a cloud-based Database-as-a-Service (DBaaS)?\n"
    "\n"
    "Unfinished response: The three main features of a cloud-based DBaaS are scalability, "
    "cost efficiency, and backups. Scalability allows you to increase or decrease the "
    "resources used by the DBaaS with ease.\n"
    "\n"
    "Raw sentence(good): Cost efficiency is another important feature of a cloud-based DBaaS, "
    "as it allows you to pay for only the resources you need and eliminates the need for "
    "upfront hardware investments.\n"
    "\n"
    "Worse sentence(bad, omit the evidence): Cost efficiency is another important feature of "
    "a cloud-based DBaaS, as it allows you to pay for only the resources you need.";

const std::string& require(const std::optional<std::string>& field, const char* placeholder) {
    if (!field.has_value()) {
        throw std::invalid_argument(std::string("render_template: missing placeholder {{") +
                                    placeholder + "}}");
    }
    return *field;
}

std::string doc_blocks(const std::vector<corpus::Document>& docs) {
    if (docs.empty()) {
        throw std::invalid_argument("render_template: missing placeholder {{title 1}}");
    }
    std::string out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i > 0) out += "\n\n";
        out += "Document [" + std::to_string(i + 1) + "](Title: " + docs[i].title +
               "): " + docs[i].text;
    }
    return out;
}

std::string unfinished(const Fields& fields, const std::string& empty_marker) {
    const std::string& past = require(fields.past_statements, "past statements");
    return past.empty() ? empty_marker : past;
}

}  // namespace

const char* kind_name(Kind kind) {
    switch (kind) {
        case Kind::post_training: return "post_training";
        case Kind::positive: return "positive";
        case Kind::fabrication: return "fabrication";
        case Kind::synthesis: return "synthesis";
        case Kind::omission: return "omission";
    }
    return "unknown";
}

std::string render_template(Kind kind, const Fields& fields, const std::string& empty_marker) {
    const std::string& question = require(fields.question, "question");

    switch (kind) {
        case Kind::post_training:
            return std::string(kPostTrainingHeader) + "\n\nQuestion: " + question + "\n\n" +
                   doc_blocks(fields.docs) + "\n\nAnswer:";

        case Kind::positive:
            return std::string(kTaskHigh) + "\n" + kGeneralContinue + "\n" + kDetailPositive +
                   "\n\nRequest: " + question + "\n\nEvidence:\n\n" + doc_blocks(fields.docs) +
                   "\n\nUnfinished response: " + unfinished(fields, empty_marker) +
                   "\n\nNext sentence(good):";

        case Kind::fabrication:
            return std::string(kTaskLow) + "\n" + kGeneralContinue + "\n" + kDetailFabrication +
                   "\n\nRequest: " + question + "\n\nEvidence:\n\n" + doc_blocks(fields.docs) +
                   "\n\nUnfinished response: " + unfinished(fields, empty_marker) +
                   "\n\nRaw sentence(good): " + require(fields.positive_statement, "positive statement") +
                   "\n\nWorse sentence(bad, ignore the evidence):";

        case Kind::synthesis:
            return std::string(kTaskLow) + "\n" + kGeneralContinue + "\n" + kDetailSynthesis +
                   "\n\nRequest: " + question + "\n\nEvidence:\n\n" + doc_blocks(fields.docs) +
                   "\n\nUnfinished response: " + unfinished(fields, empty_marker) +
                   "\n\nRaw sentence(good): " + require(fields.positive_statement, "positive statement") +
                   "\n\nWorse sentence(bad, entities in evidences mistakenly intermingled):";

        case Kind::omission:
            return std::string(kTaskLow) + "\n\n" + kGeneralOmission + "\n\n" + kOmissionExamples +
                   "\n\nRequest: " + question +
                   "\n\nUnfinished response: " + unfinished(fields, empty_marker) +
                   "\n\nRaw sentence(good): " + require(fields.positive_statement, "positive statement") +
                   "\n\nWorse sentence(bad, omit the evidence):";
    }
    throw std::invalid_argument("render_template: unknown kind");
}

}  // namespace attribkit::templates
