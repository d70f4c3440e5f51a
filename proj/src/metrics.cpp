#include "attribkit/metrics.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "attribkit/parallel.hpp"
#include "attribkit/text.hpp"

namespace attribkit::metrics {

bool LexicalEntailment::entails(const std::string& premise, const std::string& hypothesis) const {
    return coverage(premise, hypothesis) >= threshold_;
}

double LexicalEntailment::coverage(const std::string& premise,
                                   const std::string& hypothesis) const {
    const auto hypothesis_tokens = text::unique_tokens(text::content_tokens(hypothesis));
    if (hypothesis_tokens.empty()) return 0.0;
    const auto premise_tokens = text::token_set(premise);
    std::size_t covered = 0;
    for (const auto& t : hypothesis_tokens) {
        if (premise_tokens.count(t) > 0) ++covered;
    }
    return static_cast<double>(covered) / static_cast<double>(hypothesis_tokens.size());
}

std::string build_premise(const std::vector<int>& citations,
                          const std::vector<corpus::Document>& docs) {
    std::string premise;
    for (std::size_t i = 0; i < citations.size(); ++i) {
        const auto& doc = docs[static_cast<std::size_t>(citations[i] - 1)];
        if (i > 0) premise.push_back('\n');
        premise += doc.title;
        premise.push_back('\n');
        premise += doc.text.size() > kPremiseDocCharBudget
                       ? doc.text.substr(0, kPremiseDocCharBudget)
                       : doc.text;
    }
    return premise;
}

namespace {

void check_citations(const markup::AttributedAnswer& answer,
                     const std::vector<corpus::Document>& docs) {
    for (std::size_t i = 0; i < answer.statements.size(); ++i) {
        for (int c : answer.statements[i].citations) {
            if (c < 1 || static_cast<std::size_t>(c) > docs.size()) {
                throw std::invalid_argument("citation [" + std::to_string(c) + "] in statement " +
                                            std::to_string(i + 1) + " resolves to no document");
            }
        }
    }
}

}  // namespace

double citation_recall(const markup::AttributedAnswer& answer,
                       const std::vector<corpus::Document>& docs, const EntailmentOracle& oracle) {
    check_citations(answer, docs);
    if (answer.statements.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& stmt : answer.statements) {
        if (stmt.citations.empty()) continue;
        if (oracle.entails(build_premise(stmt.citations, docs), stmt.text)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(answer.statements.size());
}

double citation_precision(const markup::AttributedAnswer& answer,
                          const std::vector<corpus::Document>& docs,
                          const EntailmentOracle& oracle) {
    check_citations(answer, docs);
    std::size_t total = 0;
    std::size_t precise = 0;
    for (const auto& stmt : answer.statements) {
        if (stmt.citations.empty()) continue;
        const bool full_entails = oracle.entails(build_premise(stmt.citations, docs), stmt.text);
        for (std::size_t ci = 0; ci < stmt.citations.size(); ++ci) {
            ++total;
            if (!full_entails) continue;
            const std::vector<int> alone{stmt.citations[ci]};
            if (oracle.entails(build_premise(alone, docs), stmt.text)) {
                ++precise;
                continue;
            }
            std::vector<int> rest;
            for (std::size_t cj = 0; cj < stmt.citations.size(); ++cj) {
                if (cj != ci) rest.push_back(stmt.citations[cj]);
            }
            if (rest.empty() || !oracle.entails(build_premise(rest, docs), stmt.text)) ++precise;
        }
    }
    if (total == 0) return 0.0;
    return static_cast<double>(precise) / static_cast<double>(total);
}

double citation_f1(double recall, double precision) {
    if (recall + precision == 0.0) return 0.0;
    return 2.0 * recall * precision / (recall + precision);
}

double em_recall(const std::string& answer_text,
                 const std::vector<std::vector<std::string>>& gold_short_answers) {
    if (gold_short_answers.empty()) {
        throw std::invalid_argument("em_recall: empty gold answer list");
    }
    const std::string haystack = text::to_lower(answer_text);
    std::size_t matched = 0;
    for (const auto& group : gold_short_answers) {
        for (const auto& alias : group) {
            if (!alias.empty() && haystack.find(text::to_lower(alias)) != std::string::npos) {
                ++matched;
                break;
            }
        }
    }
    return static_cast<double>(matched) / static_cast<double>(gold_short_answers.size());
}

double claim_recall(const std::string& answer_text, const std::vector<std::string>& claims,
                    const EntailmentOracle& oracle) {
    if (claims.empty()) throw std::invalid_argument("claim_recall: empty claim list");
    std::size_t entailed = 0;
    for (const auto& claim : claims) {
        if (oracle.entails(answer_text, claim)) ++entailed;
    }
    return static_cast<double>(entailed) / static_cast<double>(claims.size());
}

EvalExample eval_example_from_json(const nlohmann::json& j) {
    EvalExample ex;
    ex.question = j.at("question").get<std::string>();
    for (const auto& d : j.at("docs")) ex.docs.push_back(corpus::document_from_json(d));
    ex.answer = j.at("answer").get<std::string>();
    if (j.contains("gold_short_answers")) {
        ex.gold_short_answers = j["gold_short_answers"].get<std::vector<std::vector<std::string>>>();
    }
    if (j.contains("claims")) ex.claims = j["claims"].get<std::vector<std::string>>();
    return ex;
}

MetricReport evaluate(const std::vector<EvalExample>& examples, const EntailmentOracle& oracle,
                      const EvalOptions& options) {
    auto score_one = [&](std::size_t i) -> ExampleScores {
        const EvalExample& ex = examples[i];
        auto answer = markup::parse_answer(ex.answer).answer;
        if (options.refine) answer = markup::refine_citations(answer);

        ExampleScores scores;
        scores.statements = static_cast<int>(answer.statements.size());
        for (const auto& s : answer.statements) {
            scores.citations += static_cast<int>(s.citations.size());
        }
        scores.citation_recall = citation_recall(answer, ex.docs, oracle);
        scores.citation_precision = citation_precision(answer, ex.docs, oracle);
        scores.citation_f1 = citation_f1(scores.citation_recall, scores.citation_precision);
        if (ex.gold_short_answers.has_value() && !ex.gold_short_answers->empty()) {
            scores.em_recall = em_recall(ex.answer, *ex.gold_short_answers);
        }
        if (ex.claims.has_value() && !ex.claims->empty()) {
            scores.claim_recall = claim_recall(ex.answer, *ex.claims, oracle);
        }
        return scores;
    };

    MetricReport report;
    report.examples =
        parallel::ordered_map<ExampleScores>(examples.size(), options.workers, score_one);

    double recall_sum = 0.0;
    double precision_sum = 0.0;
    double em_sum = 0.0;
    double claim_sum = 0.0;
    for (const auto& s : report.examples) {
        recall_sum += s.citation_recall;
        precision_sum += s.citation_precision;
        if (s.em_recall.has_value()) {
            em_sum += *s.em_recall;
            ++report.em_examples;
        }
        if (s.claim_recall.has_value()) {
            claim_sum += *s.claim_recall;
            ++report.claim_examples;
        }
    }
    const auto n = static_cast<double>(report.examples.size());
    if (n > 0) {
        report.citation_recall = recall_sum / n;
        report.citation_precision = precision_sum / n;
    }
    report.citation_f1 = citation_f1(report.citation_recall, report.citation_precision);
    if (report.em_examples > 0) report.em_recall = em_sum / report.em_examples;
    if (report.claim_examples > 0) report.claim_recall = claim_sum / report.claim_examples;
    return report;
}

nlohmann::json MetricReport::to_json() const {
    nlohmann::json per_example = nlohmann::json::array();
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& s = examples[i];
        nlohmann::json row = {{"example", i + 1},
                              {"citation_recall", s.citation_recall},
                              {"citation_precision", s.citation_precision},
                              {"citation_f1", s.citation_f1},
                              {"statements", s.statements},
                              {"citations", s.citations}};
        if (s.em_recall.has_value()) row["em_recall"] = *s.em_recall;
        if (s.claim_recall.has_value()) row["claim_recall"] = *s.claim_recall;
        per_example.push_back(row);
    }
    return {{"citation_recall", citation_recall},
            {"citation_precision", citation_precision},
            {"citation_f1", citation_f1},
            {"em_recall", em_recall},
            {"claim_recall", claim_recall},
            {"em_examples", em_examples},
            {"claim_examples", claim_examples},
            {"examples", per_example}};
}

std::string MetricReport::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "example,citation_recall,citation_precision,citation_f1,em_recall,claim_recall\n";
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& s = examples[i];
        out << (i + 1) << ',' << s.citation_recall << ',' << s.citation_precision << ','
            << s.citation_f1 << ',';
        if (s.em_recall.has_value()) out << *s.em_recall;
        out << ',';
        if (s.claim_recall.has_value()) out << *s.claim_recall;
        out << '\n';
    }
    out << "mean," << citation_recall << ',' << citation_precision << ',' << citation_f1 << ','
        << em_recall << ',' << claim_recall << '\n';
    return out.str();
}

}  // namespace attribkit::metrics
