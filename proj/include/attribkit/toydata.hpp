#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "attribkit/corpus.hpp"
#include "attribkit/metrics.hpp"
#include "attribkit/synthgen.hpp"

namespace attribkit::toydata {

/// 50 short encyclopedia-style documents over ten topics. Deterministic;
/// used by the demo fixtures and the test corpora.
corpus::Corpus toy_corpus();

/// 20 queries aligned with the corpus topics.
std::vector<synth::Query> toy_queries();

/// Raw post-training records, a few of which violate each ingestion drop
/// rule (empty reference, "None" reference, duplicate context, missing
/// references) plus one with comma-grouped citations to normalize.
std::vector<std::string> toy_posttrain_lines();

/// 20 evaluation examples mixing cited, uncited, padded and ungrounded
/// statements, with gold short answers and sub-claims on alternating
/// examples.
std::vector<metrics::EvalExample> toy_eval_examples();

nlohmann::json eval_example_to_json(const metrics::EvalExample& example);

/// Writes corpus_toy.jsonl, queries_toy.jsonl, posttrain_raw.jsonl and
/// eval_toy.jsonl into dir.
void write_fixtures(const std::filesystem::path& dir);

}  // namespace attribkit::toydata
