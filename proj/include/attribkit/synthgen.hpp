#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "attribkit/corpus.hpp"
#include "attribkit/critic.hpp"
#include "attribkit/markup.hpp"
#include "attribkit/templates.hpp"

namespace attribkit::synth {

struct Query {
    std::string qid;
    std::string query;
};

enum class ErrorType {
    fabrication,
    mistaken_synthesis,
    unintentional_omission,
    irrelevant_but_supported,
};

const char* error_type_name(ErrorType e);
ErrorType error_type_from_name(const std::string& name);

/// One labeled sampling result: query, its top-k context documents, the
/// generated answer, and per-document relevance plus per-(statement,
/// cited doc) support verdicts. Every citation index in the answer
/// resolves into `docs`.
struct InitRecord {
    std::string qid;
    std::string query;
    std::vector<corpus::Document> docs;
    markup::AttributedAnswer answer;
    critic::CritiqueLabels labels;
};

struct SkipRecord {
    std::string qid;
    std::string reason;
};

struct SampleResult {
    std::vector<InitRecord> records;
    std::vector<SkipRecord> skips;
};

/// A prefix whose final statement has a non-empty citation set wholly
/// labeled relevant. The final statement is the synthesis target; the
/// statements before it form the conditioning context.
struct PrefixCandidate {
    std::string qid;
    std::string query;
    std::vector<corpus::Document> docs;
    std::vector<markup::Statement> prefix;  // S_{:i}; back() is the target
    int statement_index = 0;                // 0-based position of the target
    critic::CritiqueLabels labels;
};

struct PreferencePair {
    std::string qid;
    std::string query;
    std::vector<corpus::Document> context_docs;  // exactly the InitRecord's top-k
    std::vector<markup::Statement> prefix;       // statements before the target
    markup::Statement chosen;
    markup::Statement rejected;
    ErrorType error_type = ErrorType::fabrication;
    int statement_index = 0;
    int pair_index = 0;
    nlohmann::json provenance;
};

nlohmann::json pair_to_json(const PreferencePair& pair);
PreferencePair pair_from_json(const nlohmann::json& j);

/// Statement generator behind the synthesis pipeline. Implementations
/// must be deterministic given the seed; the scripted default keeps the
/// whole pipeline LLM-free, while the rendered instruction strings let
/// model-backed implementations plug in.
class Generator {
public:
    virtual ~Generator() = default;
    virtual std::string id() const = 0;

    /// Full bracket-annotated answer for (instruction, query, docs).
    virtual std::string generate_answer(const std::string& instruction, const std::string& query,
                                        const std::vector<corpus::Document>& docs,
                                        std::uint64_t seed) const = 0;

    /// One continuation statement. Citations in the result are 1-based
    /// indices into `docs`; the pipeline remaps them to the pair context.
    /// `positive` carries the raw good sentence for negative kinds.
    virtual markup::Statement generate_statement(
        templates::Kind kind, const std::string& query,
        const std::vector<markup::Statement>& prefix, const std::vector<corpus::Document>& docs,
        const std::optional<markup::Statement>& positive, std::uint64_t seed) const = 0;
};

/// Deterministic text perturbations standing in for model-written
/// negatives:
///   fabrication            — one content token replaced by a coined token
///                            absent from every provided document
///   mistaken_synthesis     — an entity-like token swapped for one from a
///                            different document's vocabulary
///   unintentional_omission — final comma clause dropped (or the last 30%
///                            of tokens when there is no clause)
/// Same seed and inputs give the same output. Omission on a single-token
/// statement raises "too-short".
markup::Statement scripted_negative(ErrorType kind, const markup::Statement& positive,
                                    const std::vector<corpus::Document>& docs,
                                    std::uint64_t rng_seed);

/// Default generator: extracts leading sentences from the given documents
/// and derives negatives with scripted_negative. An infeasible negative
/// kind (no swappable entity, too-short statement) raises
/// invalid_argument; the pipeline then falls back to fabrication and
/// labels the pair accordingly.
class ScriptedGenerator : public Generator {
public:
    std::string id() const override { return "scripted-v1"; }

    std::string generate_answer(const std::string& instruction, const std::string& query,
                                const std::vector<corpus::Document>& docs,
                                std::uint64_t seed) const override;

    markup::Statement generate_statement(templates::Kind kind, const std::string& query,
                                         const std::vector<markup::Statement>& prefix,
                                         const std::vector<corpus::Document>& docs,
                                         const std::optional<markup::Statement>& positive,
                                         std::uint64_t seed) const override;
};

struct SynthesisConfig {
    int top_k = 5;    // context documents per query
    int top_m = 100;  // candidate pool for irrelevant-document mining
    std::uint64_t seed = 0;
    int workers = 1;
};

/// Per-query seed for a pipeline unit; independent of scheduling.
std::uint64_t unit_seed(std::uint64_t global_seed, const std::string& qid, int statement_index);

/// Sampling and labeling: retrieve top-k documents per query, judge their
/// relevance, generate an answer, and judge support for every
/// (statement, cited document) pair. Queries with no retrievable
/// documents or a failing generator are skipped with a reason.
SampleResult sample_and_label(const std::vector<Query>& queries, const corpus::Retriever& retriever,
                              const corpus::Corpus& corpus, const critic::Critic& critic,
                              const Generator& generator, const SynthesisConfig& config);

/// Emits one candidate per statement whose citation set is non-empty and
/// entirely labeled relevant; the candidate's prefix runs from the first
/// statement through that one.
std::vector<PrefixCandidate> select_relevant_prefixes(const std::vector<InitRecord>& records,
                                                      const critic::Critic& critic);

struct SynthesisResult {
    std::vector<PreferencePair> pairs;              // sorted (qid, statement, pair)
    std::vector<nlohmann::json> provenance;         // one record per candidate
    int fully_supported = 0;                        // F
    int unsupported = 0;                            // U
    int discarded = 0;

    nlohmann::json summary() const;
};

/// Pair synthesis over the selected candidates. A fully supported target
/// statement yields two pairs (an error-instruction negative and an
/// irrelevant-but-supported negative); an unsupported target yields one.
/// The citation set is first expanded with up to three additional
/// supporting context documents. Output is deterministic for a fixed seed
/// and independent of the worker count.
SynthesisResult synthesize_pairs(const std::vector<PrefixCandidate>& candidates,
                                 const corpus::Retriever& retriever,
                                 const corpus::Corpus& corpus, const critic::Critic& critic,
                                 const Generator& generator, const SynthesisConfig& config);

}  // namespace attribkit::synth
