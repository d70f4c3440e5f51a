#include "attribkit/config.hpp"

#include <fstream>

#include "attribkit/jsonl.hpp"
#include "attribkit/text.hpp"

namespace attribkit::config {

void RunConfig::validate() const {
    if (retriever_k < 1) throw std::invalid_argument("config: retriever.k must be >= 1");
    if (retriever_m < 10) throw std::invalid_argument("config: retriever.m must be >= 10");
    if (relevance_threshold < 0.0 || relevance_threshold > 1.0 || support_threshold < 0.0 ||
        support_threshold > 1.0 || entailment_threshold < 0.0 || entailment_threshold > 1.0) {
        throw std::invalid_argument("config: thresholds must be in [0, 1]");
    }
    if (vocab < 2 || vocab > 64) throw std::invalid_argument("config: vocab must be in [2, 64]");
    if (contexts < 1 || contexts > 32) {
        throw std::invalid_argument("config: contexts must be in [1, 32]");
    }
    po::parameterization_from_name(parameterization);
    loss.validate();
}

nlohmann::json RunConfig::to_json() const {
    return {
        {"seed", seed},
        {"workers", workers},
        {"out_dir", out_dir},
        {"retriever",
         {{"k", retriever_k}, {"m", retriever_m}, {"bm25_k1", bm25_k1}, {"bm25_b", bm25_b}}},
        {"critic",
         {{"relevance_threshold", relevance_threshold},
          {"support_threshold", support_threshold}}},
        {"entailment", {{"threshold", entailment_threshold}}},
        {"generator",
         {{"id", generator},
          {"decoding_temperature", decoding_temperature},
          {"empty_marker", empty_marker}}},
        {"policy",
         {{"vocab", vocab}, {"contexts", contexts}, {"parameterization", parameterization}}},
        {"loss",
         {{"method", po::method_name(loss.method)},
          {"beta", loss.beta},
          {"slic_margin", loss.slic_margin},
          {"kto_lambda_desirable", loss.kto_lambda_desirable},
          {"kto_lambda_undesirable", loss.kto_lambda_undesirable},
          {"replay_interval", loss.replay_interval},
          {"learning_rate", loss.learning_rate},
          {"steps", loss.steps},
          {"batch_size", loss.batch_size},
          {"holdout_fraction", loss.holdout_fraction}}},
        {"paths",
         {{"corpus", corpus_path},
          {"queries", queries_path},
          {"pairs", pairs_path},
          {"sft", sft_path},
          {"input", input_path},
          {"output", output_path}}},
    };
}

RunConfig from_json(const nlohmann::json& j) {
    RunConfig c;
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.out_dir = j.value("out_dir", c.out_dir);
    if (j.contains("retriever")) {
        const auto& r = j["retriever"];
        c.retriever_k = r.value("k", c.retriever_k);
        c.retriever_m = r.value("m", c.retriever_m);
        c.bm25_k1 = r.value("bm25_k1", c.bm25_k1);
        c.bm25_b = r.value("bm25_b", c.bm25_b);
    }
    if (j.contains("critic")) {
        const auto& r = j["critic"];
        c.relevance_threshold = r.value("relevance_threshold", c.relevance_threshold);
        c.support_threshold = r.value("support_threshold", c.support_threshold);
    }
    if (j.contains("entailment")) {
        c.entailment_threshold = j["entailment"].value("threshold", c.entailment_threshold);
    }
    if (j.contains("generator")) {
        const auto& g = j["generator"];
        c.generator = g.value("id", c.generator);
        c.decoding_temperature = g.value("decoding_temperature", c.decoding_temperature);
        c.empty_marker = g.value("empty_marker", c.empty_marker);
    }
    if (j.contains("policy")) {
        const auto& p = j["policy"];
        c.vocab = p.value("vocab", c.vocab);
        c.contexts = p.value("contexts", c.contexts);
        c.parameterization = p.value("parameterization", c.parameterization);
    }
    if (j.contains("loss")) {
        const auto& l = j["loss"];
        c.loss.method = po::method_from_name(l.value("method", po::method_name(c.loss.method)));
        c.loss.beta = l.value("beta", c.loss.beta);
        c.loss.slic_margin = l.value("slic_margin", c.loss.slic_margin);
        c.loss.kto_lambda_desirable = l.value("kto_lambda_desirable", c.loss.kto_lambda_desirable);
        c.loss.kto_lambda_undesirable =
            l.value("kto_lambda_undesirable", c.loss.kto_lambda_undesirable);
        c.loss.replay_interval = l.value("replay_interval", c.loss.replay_interval);
        c.loss.learning_rate = l.value("learning_rate", c.loss.learning_rate);
        c.loss.steps = l.value("steps", c.loss.steps);
        c.loss.batch_size = l.value("batch_size", c.loss.batch_size);
        c.loss.holdout_fraction = l.value("holdout_fraction", c.loss.holdout_fraction);
    }
    if (j.contains("paths")) {
        const auto& p = j["paths"];
        c.corpus_path = p.value("corpus", c.corpus_path);
        c.queries_path = p.value("queries", c.queries_path);
        c.pairs_path = p.value("pairs", c.pairs_path);
        c.sft_path = p.value("sft", c.sft_path);
        c.input_path = p.value("input", c.input_path);
        c.output_path = p.value("output", c.output_path);
    }
    return c;
}

RunConfig load_config(const std::optional<std::filesystem::path>& file) {
    if (!file.has_value()) return RunConfig{};
    std::ifstream in(*file);
    if (!in) throw jsonl::InputError("cannot open config " + file->string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw jsonl::InputError(file->string() + ": malformed config JSON");
    try {
        return from_json(j);
    } catch (const std::exception& e) {
        throw jsonl::InputError(file->string() + ": " + e.what());
    }
}

std::string config_hash(const RunConfig& config) {
    return text::fnv1a_hex(config.to_json().dump());
}

}  // namespace attribkit::config
