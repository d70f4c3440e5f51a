#include "attribkit/critic.hpp"

#include <algorithm>
#include <stdexcept>

#include "attribkit/text.hpp"

namespace attribkit::critic {

Judgment OverlapCritic::judge_relevance(const std::string& query,
                                        const corpus::Document& doc) const {
    const auto query_tokens = text::unique_tokens(text::tokenize(query));
    if (query_tokens.empty()) return {0, 0.0};
    const auto doc_tokens = text::token_set(doc.title + " " + doc.text);
    std::size_t hits = 0;
    for (const auto& t : query_tokens) {
        if (doc_tokens.count(t) > 0) ++hits;
    }
    const double score = static_cast<double>(hits) / static_cast<double>(query_tokens.size());
    return {score >= relevance_threshold_ ? 1 : 0, score};
}

Judgment OverlapCritic::judge_support(const std::string& /*query*/, const corpus::Document& doc,
                                      const std::string& statement) const {
    auto stmt_tokens = text::content_tokens(statement);
    stmt_tokens = text::unique_tokens(stmt_tokens);
    if (stmt_tokens.empty()) return {0, 0.0};
    const auto doc_tokens = text::token_set(doc.title + " " + doc.text);
    std::size_t covered = 0;
    for (const auto& t : stmt_tokens) {
        if (doc_tokens.count(t) > 0) ++covered;
    }
    const double score = static_cast<double>(covered) / static_cast<double>(stmt_tokens.size());
    return {score >= support_threshold_ ? 1 : 0, score};
}

IrrelevantSelection select_irrelevant_detailed(const Critic& critic, const std::string& query,
                                               const std::vector<corpus::Document>& ranked_docs) {
    const auto pool = static_cast<std::size_t>(kIrrelevantPoolSize);
    if (ranked_docs.size() < pool) {
        throw std::invalid_argument(
            "select_irrelevant: need at least " + std::to_string(pool) + " candidates, got " +
            std::to_string(ranked_docs.size()) + " (short by " +
            std::to_string(pool - ranked_docs.size()) + ")");
    }

    struct Scored {
        std::size_t pos;
        Judgment judgment;
    };
    std::vector<Scored> scored;
    scored.reserve(ranked_docs.size());
    bool any_irrelevant = false;
    for (std::size_t i = 0; i < ranked_docs.size(); ++i) {
        auto j = critic.judge_relevance(query, ranked_docs[i]);
        if (j.label == 0) any_irrelevant = true;
        scored.push_back({i, j});
    }

    IrrelevantSelection out;
    out.docs.reserve(pool);
    out.scores.reserve(pool);
    if (!any_irrelevant) {
        // everything looks relevant: take the tail of the ranking
        out.fallback_by_rank = true;
        for (std::size_t i = ranked_docs.size() - pool; i < ranked_docs.size(); ++i) {
            out.docs.push_back(ranked_docs[i]);
            out.scores.push_back(scored[i].judgment.score);
        }
        return out;
    }

    std::sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
        if (a.judgment.score != b.judgment.score) return a.judgment.score < b.judgment.score;
        return ranked_docs[a.pos].id < ranked_docs[b.pos].id;
    });
    for (std::size_t i = 0; i < pool; ++i) {
        out.docs.push_back(ranked_docs[scored[i].pos]);
        out.scores.push_back(scored[i].judgment.score);
    }
    return out;
}

std::vector<corpus::Document> select_irrelevant(const Critic& critic, const std::string& query,
                                                const std::vector<corpus::Document>& ranked_docs) {
    return select_irrelevant_detailed(critic, query, ranked_docs).docs;
}

}  // namespace attribkit::critic
