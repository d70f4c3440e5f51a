#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "attribkit/losses.hpp"

namespace attribkit::config {

/// Resolved run settings. Precedence is CLI flag > config file > default;
/// the CLI applies flag overrides after load.
struct RunConfig {
    std::uint64_t seed = 0;
    int workers = 1;
    std::string out_dir = "out";

    // retrieval
    int retriever_k = 5;
    int retriever_m = 100;
    double bm25_k1 = 1.2;
    double bm25_b = 0.75;

    // critic thresholds
    double relevance_threshold = 0.35;
    double support_threshold = 0.6;

    // entailment oracle
    double entailment_threshold = 0.7;

    // generation
    std::string generator = "scripted";
    double decoding_temperature = 0.01;  // consumed by model-backed generators only
    std::string empty_marker = "None";

    // policy shape
    int vocab = 32;
    int contexts = 16;
    std::string parameterization = "tabular";

    po::LossConfig loss;

    // file paths (per-command)
    std::string corpus_path;
    std::string queries_path;
    std::string pairs_path;
    std::string sft_path;
    std::string input_path;
    std::string output_path;

    void validate() const;
    nlohmann::json to_json() const;
};

RunConfig from_json(const nlohmann::json& j);

/// Defaults overlaid with the optional config file.
RunConfig load_config(const std::optional<std::filesystem::path>& file);

std::string config_hash(const RunConfig& config);

}  // namespace attribkit::config
