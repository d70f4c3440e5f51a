#pragma once

// Shared test-only machinery: the finite-difference gradient oracle,
// brute-force scorers, stub critics/oracles and synthetic task builders.
// Everything here is independent of the library code paths it checks.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "attribkit/corpus.hpp"
#include "attribkit/critic.hpp"
#include "attribkit/losses.hpp"
#include "attribkit/metrics.hpp"
#include "attribkit/policy.hpp"
#include "attribkit/text.hpp"

namespace testutil {

// ---------------------------------------------------------------------
// finite differences
// ---------------------------------------------------------------------

/// Central-difference gradient of fn() w.r.t. params, step eps.
inline std::vector<double> finite_difference_gradient(const std::function<double()>& fn,
                                                      std::vector<double>& params,
                                                      double eps = 1e-5) {
    std::vector<double> grad(params.size(), 0.0);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + eps;
        const double up = fn();
        params[i] = saved - eps;
        const double down = fn();
        params[i] = saved;
        grad[i] = (up - down) / (2.0 * eps);
    }
    return grad;
}

/// Norm-based relative error between two gradients:
/// ||a - b|| / (||a|| + ||b||), 0 when both vanish.
inline double gradient_relative_error(const std::vector<double>& a,
                                      const std::vector<double>& b) {
    double diff = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    diff = std::sqrt(diff);
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na + nb < 1e-12) return 0.0;
    return diff / (na + nb);
}

// ---------------------------------------------------------------------
// random policies and batches
// ---------------------------------------------------------------------

inline void randomize_params(attribkit::po::Policy& policy, std::uint64_t seed,
                             double scale = 0.8) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, scale);
    for (auto& p : policy.params()) p = dist(rng);
}

inline std::vector<int> random_tokens(std::mt19937_64& rng, int vocab, std::size_t length) {
    std::vector<int> tokens(length);
    for (auto& t : tokens) t = static_cast<int>(rng() % static_cast<std::uint64_t>(vocab));
    return tokens;
}

inline std::vector<std::size_t> random_boundaries(std::mt19937_64& rng, std::size_t length,
                                                  std::size_t statements) {
    // choose statements-1 interior cut points
    std::vector<std::size_t> cuts;
    if (statements > length) statements = length;
    while (cuts.size() + 1 < statements) {
        const std::size_t c = 1 + rng() % (length - 1);
        bool fresh = true;
        for (auto x : cuts) fresh = fresh && x != c;
        if (fresh) cuts.push_back(c);
    }
    cuts.push_back(length);
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

inline attribkit::po::PreferenceBatch random_batch(std::mt19937_64& rng, int vocab, int contexts,
                                                   std::size_t size, bool aligned_statements) {
    attribkit::po::PreferenceBatch batch;
    for (std::size_t i = 0; i < size; ++i) {
        attribkit::po::PreferenceExample ex;
        ex.context = static_cast<int>(rng() % static_cast<std::uint64_t>(contexts));
        const std::size_t lw = 3 + rng() % 6;
        const std::size_t ll = 3 + rng() % 6;
        ex.chosen = random_tokens(rng, vocab, lw);
        ex.rejected = random_tokens(rng, vocab, ll);
        const std::size_t statements = 1 + rng() % 3;
        ex.chosen_boundaries = random_boundaries(rng, lw, statements);
        ex.rejected_boundaries = random_boundaries(rng, ll, statements);
        if (!aligned_statements) {
            ex.rejected_boundaries = random_boundaries(rng, ll, 1 + statements % 3);
        }
        batch.push_back(std::move(ex));
    }
    return batch;
}

// ---------------------------------------------------------------------
// deterministic toy preference task (teacher walks vs corrupted copies)
// ---------------------------------------------------------------------

struct ToyTask {
    attribkit::po::PreferenceBatch pairs;
    std::vector<attribkit::po::SftExample> sft_buffer;
    int vocab = 0;
    int contexts = 0;
};

/// Each context follows a fixed affine next-token rule; chosen sequences
/// follow the rule from a random start, rejected copies corrupt two
/// positions. Statement boundaries split each sequence in three.
inline ToyTask build_toy_preference_task(int vocab, int contexts, std::size_t n_pairs,
                                         std::size_t length, std::uint64_t seed) {
    ToyTask task;
    task.vocab = vocab;
    task.contexts = contexts;
    std::mt19937_64 rng(seed);

    std::vector<int> mult(static_cast<std::size_t>(contexts));
    std::vector<int> add(static_cast<std::size_t>(contexts));
    for (int c = 0; c < contexts; ++c) {
        mult[static_cast<std::size_t>(c)] = 2 * static_cast<int>(rng() % 4) + 1;  // odd
        add[static_cast<std::size_t>(c)] = static_cast<int>(rng() % vocab);
    }
    auto teacher_next = [&](int context, int prev) {
        return (mult[static_cast<std::size_t>(context)] * prev +
                add[static_cast<std::size_t>(context)]) %
               vocab;
    };

    for (std::size_t i = 0; i < n_pairs; ++i) {
        attribkit::po::PreferenceExample ex;
        ex.context = static_cast<int>(rng() % static_cast<std::uint64_t>(contexts));
        std::vector<int> walk;
        walk.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(vocab)));
        while (walk.size() < length) walk.push_back(teacher_next(ex.context, walk.back()));

        ex.chosen = walk;
        ex.rejected = walk;
        const std::size_t p1 = 1 + rng() % (length / 2 - 1);
        const std::size_t p2 = length / 2 + rng() % (length / 2 - 1);
        ex.rejected[p1] = (ex.rejected[p1] + 1 + static_cast<int>(rng() % 3)) % vocab;
        ex.rejected[p2] = (ex.rejected[p2] + 1 + static_cast<int>(rng() % 3)) % vocab;

        const std::size_t third = length / 3;
        ex.chosen_boundaries = {third, 2 * third, length};
        ex.rejected_boundaries = ex.chosen_boundaries;
        task.pairs.push_back(std::move(ex));

        attribkit::po::SftExample sft;
        sft.context = ex.context;
        sft.tokens = walk;
        task.sft_buffer.push_back(std::move(sft));
    }
    return task;
}

/// Brute-force bigram maximum-likelihood fit to the chosen sequences,
/// used to validate that the toy task is solvable above an accuracy
/// threshold independently of the training loop.
inline std::unique_ptr<attribkit::po::Policy> bigram_mle_policy(
    const attribkit::po::PreferenceBatch& train_pairs, int vocab, int contexts,
    double smoothing = 0.1) {
    auto policy = attribkit::po::make_tabular_policy(vocab, contexts);
    std::vector<double> counts(policy->params().size(), 0.0);
    const auto row = [&](int context, int prev) {
        return (static_cast<std::size_t>(context) * static_cast<std::size_t>(vocab + 1) +
                static_cast<std::size_t>(prev)) *
               static_cast<std::size_t>(vocab);
    };
    for (const auto& ex : train_pairs) {
        int prev = vocab;  // begin-of-sequence
        for (int t : ex.chosen) {
            counts[row(ex.context, prev) + static_cast<std::size_t>(t)] += 1.0;
            prev = t;
        }
    }
    auto& theta = policy->params();
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = std::log(counts[i] + smoothing);
    return policy;
}

// ---------------------------------------------------------------------
// stub critics and oracles
// ---------------------------------------------------------------------

/// Critic with fixed per-doc relevance and per-(statement, doc) support
/// verdicts; anything unlisted falls back to irrelevant/unsupported.
class TableCritic : public attribkit::critic::Critic {
public:
    std::map<std::string, attribkit::critic::Judgment> relevance;
    std::map<std::string, attribkit::critic::Judgment> support;  // key: statement-text \x1f doc-id

    attribkit::critic::Judgment judge_relevance(const std::string&,
                                                const attribkit::corpus::Document& doc) const override {
        auto it = relevance.find(doc.id);
        return it == relevance.end() ? attribkit::critic::Judgment{0, 0.0} : it->second;
    }
    attribkit::critic::Judgment judge_support(const std::string&,
                                              const attribkit::corpus::Document& doc,
                                              const std::string& statement) const override {
        auto it = support.find(statement + '\x1f' + doc.id);
        return it == support.end() ? attribkit::critic::Judgment{0, 0.0} : it->second;
    }
};

/// Wraps a critic and counts calls.
class CountingCritic : public attribkit::critic::Critic {
public:
    explicit CountingCritic(const attribkit::critic::Critic& inner) : inner_(inner) {}
    mutable std::atomic<int> relevance_calls{0};
    mutable std::atomic<int> support_calls{0};

    attribkit::critic::Judgment judge_relevance(const std::string& q,
                                                const attribkit::corpus::Document& d) const override {
        ++relevance_calls;
        return inner_.judge_relevance(q, d);
    }
    attribkit::critic::Judgment judge_support(const std::string& q,
                                              const attribkit::corpus::Document& d,
                                              const std::string& s) const override {
        ++support_calls;
        return inner_.judge_support(q, d, s);
    }

private:
    const attribkit::critic::Critic& inner_;
};

/// Entails iff the hypothesis appears verbatim (case-normalized) in the premise.
class SubstringOracle : public attribkit::metrics::EntailmentOracle {
public:
    bool entails(const std::string& premise, const std::string& hypothesis) const override {
        return attribkit::text::to_lower(premise).find(attribkit::text::to_lower(hypothesis)) !=
               std::string::npos;
    }
};

/// Scripted verdicts keyed by (premise, hypothesis) lookup order.
class TableOracle : public attribkit::metrics::EntailmentOracle {
public:
    std::map<std::string, bool> verdicts;  // key: hypothesis
    bool default_verdict = false;

    bool entails(const std::string&, const std::string& hypothesis) const override {
        auto it = verdicts.find(hypothesis);
        return it == verdicts.end() ? default_verdict : it->second;
    }
};

// ---------------------------------------------------------------------
// brute-force BM25 (mirrors the spec formula, not the index code)
// ---------------------------------------------------------------------

inline double brute_force_bm25(const attribkit::corpus::Corpus& corpus, std::size_t doc_index,
                               const std::string& query, double k1 = 1.2, double b = 0.75) {
    namespace text = attribkit::text;
    const auto n = static_cast<double>(corpus.size());
    // average length over title+text tokens
    double total_len = 0.0;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        total_len += static_cast<double>(
            text::tokenize(corpus.at(d).title + " " + corpus.at(d).text).size());
    }
    const double avgdl = total_len / n;

    const auto doc_tokens =
        text::tokenize(corpus.at(doc_index).title + " " + corpus.at(doc_index).text);
    const auto dl = static_cast<double>(doc_tokens.size());

    double score = 0.0;
    for (const auto& term : text::unique_tokens(text::tokenize(query))) {
        int tf = 0;
        for (const auto& t : doc_tokens) {
            if (t == term) ++tf;
        }
        if (tf == 0) continue;
        int df = 0;
        for (std::size_t d = 0; d < corpus.size(); ++d) {
            const auto tokens = text::tokenize(corpus.at(d).title + " " + corpus.at(d).text);
            bool found = false;
            for (const auto& t : tokens) found = found || t == term;
            if (found) ++df;
        }
        const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
        const double tfd = static_cast<double>(tf);
        score += idf * tfd * (k1 + 1.0) / (tfd + k1 * (1.0 - b + b * dl / avgdl));
    }
    return score;
}

}  // namespace testutil
