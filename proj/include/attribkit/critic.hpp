#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "attribkit/corpus.hpp"

namespace attribkit::critic {

struct Judgment {
    int label = 0;       // 1 iff score >= the critic's threshold
    double score = 0.0;  // in [0, 1]
};

/// Relevance and support verdicts for one (query, docs, answer) triple.
/// `relevant` is keyed by doc id; `supported` by (statement index, doc id).
struct CritiqueLabels {
    std::map<std::string, Judgment> relevant;
    std::map<std::pair<int, std::string>, Judgment> supported;
};

/// Judgments must be deterministic functions of their inputs so the
/// synthesis pipeline stays reproducible. Implementations are stateless;
/// the pipeline may call them concurrently.
class Critic {
public:
    virtual ~Critic() = default;

    /// Is the document useful for answering the query?
    virtual Judgment judge_relevance(const std::string& query,
                                     const corpus::Document& doc) const = 0;

    /// Is the statement grounded in the document, given the query?
    virtual Judgment judge_support(const std::string& query, const corpus::Document& doc,
                                   const std::string& statement) const = 0;
};

/// Token-overlap heuristic critic.
///   relevance: |tokens(q) ∩ tokens(d)| / |tokens(q)|, label 1 iff >= relevance_threshold
///   support:   fraction of the statement's content tokens present in the
///              document, label 1 iff >= support_threshold
/// Document tokens cover title+text.
class OverlapCritic : public Critic {
public:
    OverlapCritic(double relevance_threshold = 0.35, double support_threshold = 0.6)
        : relevance_threshold_(relevance_threshold), support_threshold_(support_threshold) {}

    Judgment judge_relevance(const std::string& query,
                             const corpus::Document& doc) const override;
    Judgment judge_support(const std::string& query, const corpus::Document& doc,
                           const std::string& statement) const override;

    double relevance_threshold() const { return relevance_threshold_; }
    double support_threshold() const { return support_threshold_; }

private:
    double relevance_threshold_;
    double support_threshold_;
};

struct IrrelevantSelection {
    std::vector<corpus::Document> docs;
    std::vector<double> scores;  // relevance scores aligned with docs
    bool fallback_by_rank = false;
};

/// Picks the 10 least relevant of the candidates (ascending relevance
/// score, ties by ascending doc id). When every candidate is labeled
/// relevant, falls back to the last 10 by retrieval rank. `ranked_docs`
/// must be in retrieval order and hold at least 10 entries.
IrrelevantSelection select_irrelevant_detailed(const Critic& critic, const std::string& query,
                                               const std::vector<corpus::Document>& ranked_docs);

std::vector<corpus::Document> select_irrelevant(const Critic& critic, const std::string& query,
                                                const std::vector<corpus::Document>& ranked_docs);

inline constexpr int kIrrelevantPoolSize = 10;

}  // namespace attribkit::critic
