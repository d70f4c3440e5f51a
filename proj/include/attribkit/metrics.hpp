#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "attribkit/corpus.hpp"
#include "attribkit/markup.hpp"

namespace attribkit::metrics {

/// Deterministic judge of whether a premise text supports a hypothesis.
/// Implementations must be stable under repeated calls and safe for
/// concurrent use.
class EntailmentOracle {
public:
    virtual ~EntailmentOracle() = default;
    virtual bool entails(const std::string& premise, const std::string& hypothesis) const = 0;
};

/// Default lexical oracle: entails iff the fraction of the hypothesis's
/// content tokens present in the premise reaches the threshold.
class LexicalEntailment : public EntailmentOracle {
public:
    explicit LexicalEntailment(double threshold = 0.7) : threshold_(threshold) {}
    bool entails(const std::string& premise, const std::string& hypothesis) const override;
    double coverage(const std::string& premise, const std::string& hypothesis) const;

private:
    double threshold_;
};

/// Premise for entailment checks over a citation set: cited documents in
/// citation order, each block `title\ntext` with text truncated to
/// 2,048 characters, blocks joined by single newlines.
std::string build_premise(const std::vector<int>& citations,
                          const std::vector<corpus::Document>& docs);

inline constexpr std::size_t kPremiseDocCharBudget = 2048;

/// Fraction of statements whose (non-empty) citation set, concatenated,
/// entails the statement. Dangling citation indices raise an error
/// naming the statement and index.
double citation_recall(const markup::AttributedAnswer& answer,
                       const std::vector<corpus::Document>& docs, const EntailmentOracle& oracle);

/// A citation is precise iff the full set entails the statement AND
/// (the citation alone entails it OR the set minus the citation does
/// not). Fraction over all citations; 0 when no citations exist.
double citation_precision(const markup::AttributedAnswer& answer,
                          const std::vector<corpus::Document>& docs,
                          const EntailmentOracle& oracle);

/// Harmonic mean; 0 when both inputs are 0.
double citation_f1(double recall, double precision);

/// Fraction of gold alias groups with at least one alias appearing as a
/// case-normalized exact substring of the answer text.
double em_recall(const std::string& answer_text,
                 const std::vector<std::vector<std::string>>& gold_short_answers);

/// Fraction of claims entailed by the answer text.
double claim_recall(const std::string& answer_text, const std::vector<std::string>& claims,
                    const EntailmentOracle& oracle);

struct EvalExample {
    std::string question;
    std::vector<corpus::Document> docs;
    std::string answer;  // bracket markup
    std::optional<std::vector<std::vector<std::string>>> gold_short_answers;
    std::optional<std::vector<std::string>> claims;
};

EvalExample eval_example_from_json(const nlohmann::json& j);

struct ExampleScores {
    double citation_recall = 0.0;
    double citation_precision = 0.0;
    double citation_f1 = 0.0;
    std::optional<double> em_recall;
    std::optional<double> claim_recall;
    int statements = 0;
    int citations = 0;
};

/// Corpus-level report. Recall and precision average per-example values;
/// F1 is the harmonic mean of those averages. EM-R and claim recall
/// average over the examples that provide gold answers or claims.
struct MetricReport {
    double citation_recall = 0.0;
    double citation_precision = 0.0;
    double citation_f1 = 0.0;
    double em_recall = 0.0;
    double claim_recall = 0.0;
    int em_examples = 0;
    int claim_examples = 0;
    std::vector<ExampleScores> examples;

    nlohmann::json to_json() const;
    std::string to_csv() const;
};

struct EvalOptions {
    bool refine = false;  // apply backward citation propagation before scoring
    int workers = 1;
};

MetricReport evaluate(const std::vector<EvalExample>& examples, const EntailmentOracle& oracle,
                      const EvalOptions& options = {});

}  // namespace attribkit::metrics
