#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "attribkit/config.hpp"
#include "attribkit/corpus.hpp"
#include "attribkit/critic.hpp"
#include "attribkit/jsonl.hpp"
#include "attribkit/markup.hpp"
#include "attribkit/metrics.hpp"
#include "attribkit/policy.hpp"
#include "attribkit/synthgen.hpp"
#include "attribkit/text.hpp"
#include "attribkit/train.hpp"

namespace fs = std::filesystem;
using namespace attribkit;

namespace {

constexpr const char* kVersion = "0.1.0";

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw jsonl::InputError(std::string("missing required path: ") + what);
    if (!fs::exists(path)) {
        throw jsonl::InputError(std::string(what) + " not found: " + path);
    }
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void write_manifest(const config::RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    nlohmann::json input_hashes = nlohmann::json::object();
    for (const auto& path : inputs) {
        input_hashes[path] = "fnv64:" + text::fnv1a_hex(jsonl::read_file(path));
    }
    nlohmann::json manifest = {{"command", command},
                               {"version", kVersion},
                               {"config", cfg.to_json()},
                               {"config_hash", "fnv64:" + config::config_hash(cfg)},
                               {"inputs", input_hashes},
                               {"outputs", outputs}};
    write_json_file(fs::path(cfg.out_dir) / ("manifest_" + command + ".json"), manifest);
}

std::vector<synth::Query> load_queries(const fs::path& path) {
    std::vector<synth::Query> queries;
    jsonl::for_each_record(path, [&](int line, const nlohmann::json& record) {
        if (!record.is_object() || !record.contains("query") || !record["query"].is_string()) {
            throw jsonl::InputError(path.string() + ":" + std::to_string(line) +
                                    ": expected {\"qid\", \"query\"}");
        }
        std::string qid = record.value("qid", "");
        if (qid.empty()) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "q%04d", line);
            qid = buf;
        }
        queries.push_back({qid, record["query"].get<std::string>()});
    });
    return queries;
}

int cmd_ingest(const config::RunConfig& cfg) {
    require_file(cfg.input_path, "--input");
    fs::create_directories(cfg.out_dir);
    const auto result = corpus::normalize_training_file(cfg.input_path);

    const fs::path out_path = cfg.output_path.empty()
                                  ? fs::path(cfg.out_dir) / "normalized.jsonl"
                                  : fs::path(cfg.output_path);
    std::string body;
    for (const auto& line : result.lines) body += line + "\n";
    jsonl::write_file(out_path, body);

    nlohmann::json drops = nlohmann::json::array();
    for (const auto& d : result.drops) drops.push_back({{"line", d.line}, {"reason", d.reason}});
    const nlohmann::json report = {{"total", result.lines.size() + result.drops.size()},
                                   {"kept", result.lines.size()},
                                   {"dropped", drops}};
    const fs::path report_path = fs::path(cfg.out_dir) / "ingest_report.json";
    write_json_file(report_path, report);

    write_manifest(cfg, "ingest", {cfg.input_path}, {out_path.string(), report_path.string()});
    std::cerr << "ingest: kept " << result.lines.size() << ", dropped " << result.drops.size()
              << " -> " << out_path.string() << "\n";
    return 0;
}

int cmd_synth(const config::RunConfig& cfg) {
    require_file(cfg.corpus_path, "--corpus");
    require_file(cfg.queries_path, "--queries");
    fs::create_directories(cfg.out_dir);

    const auto corpus = corpus::load_corpus(cfg.corpus_path);
    const auto index = corpus::build_index(corpus, {cfg.bm25_k1, cfg.bm25_b});
    const auto queries = load_queries(cfg.queries_path);
    const critic::OverlapCritic critic(cfg.relevance_threshold, cfg.support_threshold);
    const synth::ScriptedGenerator generator;

    synth::SynthesisConfig synth_cfg;
    synth_cfg.top_k = cfg.retriever_k;
    synth_cfg.top_m = cfg.retriever_m;
    synth_cfg.seed = cfg.seed;
    synth_cfg.workers = cfg.workers;

    const auto sampled = synth::sample_and_label(queries, index, corpus, critic, generator,
                                                 synth_cfg);
    const auto candidates = synth::select_relevant_prefixes(sampled.records, critic);
    const auto result =
        synth::synthesize_pairs(candidates, index, corpus, critic, generator, synth_cfg);

    const fs::path pairs_path = fs::path(cfg.out_dir) / "pairs.jsonl";
    {
        std::string body;
        for (const auto& pair : result.pairs) body += synth::pair_to_json(pair).dump() + "\n";
        jsonl::write_file(pairs_path, body);
    }
    const fs::path prov_path = fs::path(cfg.out_dir) / "provenance.jsonl";
    {
        std::string body;
        for (const auto& skip : sampled.skips) {
            body += nlohmann::json{{"qid", skip.qid}, {"skipped", skip.reason}}.dump() + "\n";
        }
        for (const auto& record : result.provenance) body += record.dump() + "\n";
        body += result.summary().dump() + "\n";
        jsonl::write_file(prov_path, body);
    }

    write_manifest(cfg, "synth", {cfg.corpus_path, cfg.queries_path},
                   {pairs_path.string(), prov_path.string()});
    std::cerr << "synth: " << result.pairs.size() << " pairs from " << candidates.size()
              << " candidates (F=" << result.fully_supported << ", U=" << result.unsupported
              << ") -> " << pairs_path.string() << "\n";
    return 0;
}

int cmd_train(const config::RunConfig& cfg) {
    require_file(cfg.pairs_path, "--pairs");
    if (!cfg.sft_path.empty()) require_file(cfg.sft_path, "--sft");
    fs::create_directories(cfg.out_dir);

    po::PreferenceBatch batch;
    jsonl::for_each_record(cfg.pairs_path, [&](int, const nlohmann::json& record) {
        batch.push_back(
            po::encode_pair(synth::pair_from_json(record), cfg.vocab, cfg.contexts));
    });
    if (batch.empty()) throw jsonl::InputError(cfg.pairs_path + ": no pairs to train on");

    std::vector<po::SftExample> sft_buffer;
    if (!cfg.sft_path.empty()) {
        jsonl::for_each_record(cfg.sft_path, [&](int line, const nlohmann::json& record) {
            if (!record.contains("question") || !record.contains("answer")) {
                throw jsonl::InputError(cfg.sft_path + ":" + std::to_string(line) +
                                        ": expected {question, docs, answer}");
            }
            sft_buffer.push_back(po::encode_sft_record(record["question"].get<std::string>(),
                                                       record["answer"].get<std::string>(),
                                                       cfg.vocab, cfg.contexts));
        });
    }

    auto loss_cfg = cfg.loss;
    loss_cfg.seed = cfg.seed;
    std::unique_ptr<po::Policy> init;
    if (po::parameterization_from_name(cfg.parameterization) == po::Parameterization::tabular) {
        init = po::make_tabular_policy(cfg.vocab, cfg.contexts);
    } else {
        init = po::make_feedforward_policy(cfg.vocab, cfg.contexts, 8, 16, cfg.seed);
    }

    const auto result = po::train(loss_cfg, batch, sft_buffer, *init);

    const fs::path ckpt_path = fs::path(cfg.out_dir) / "policy.json";
    po::save_policy(*result.policy, cfg.seed, ckpt_path);
    const fs::path history_path = fs::path(cfg.out_dir) / "history.csv";
    po::write_history_csv(history_path, result.history);

    std::vector<std::string> inputs = {cfg.pairs_path};
    if (!cfg.sft_path.empty()) inputs.push_back(cfg.sft_path);
    write_manifest(cfg, "train", inputs, {ckpt_path.string(), history_path.string()});

    const auto& last = result.history.back();
    std::cerr << "train: " << result.history.size() << " steps, final loss " << last.loss
              << ", margin " << last.margin << ", holdout accuracy " << last.holdout_accuracy
              << " -> " << ckpt_path.string() << "\n";
    return 0;
}

int cmd_eval(const config::RunConfig& cfg, bool refine) {
    require_file(cfg.input_path, "--input");
    fs::create_directories(cfg.out_dir);

    std::vector<metrics::EvalExample> examples;
    jsonl::for_each_record(cfg.input_path, [&](int line, const nlohmann::json& record) {
        try {
            examples.push_back(metrics::eval_example_from_json(record));
        } catch (const std::exception& e) {
            throw jsonl::InputError(cfg.input_path + ":" + std::to_string(line) + ": " + e.what());
        }
    });

    const metrics::LexicalEntailment oracle(cfg.entailment_threshold);
    metrics::EvalOptions options;
    options.refine = refine;
    options.workers = cfg.workers;
    const auto report = metrics::evaluate(examples, oracle, options);

    const fs::path json_path = fs::path(cfg.out_dir) / "report.json";
    write_json_file(json_path, report.to_json());
    const fs::path csv_path = fs::path(cfg.out_dir) / "report.csv";
    jsonl::write_file(csv_path, report.to_csv());

    write_manifest(cfg, "eval", {cfg.input_path}, {json_path.string(), csv_path.string()});
    std::cerr << "eval: " << examples.size() << " examples, citation F1 " << report.citation_f1
              << " -> " << json_path.string() << "\n";
    return 0;
}

int cmd_refine(const config::RunConfig& cfg) {
    require_file(cfg.input_path, "--input");
    if (cfg.output_path.empty()) throw jsonl::InputError("missing required path: --output");
    if (const auto parent = fs::path(cfg.output_path).parent_path(); !parent.empty()) {
        fs::create_directories(parent);
    }
    fs::create_directories(cfg.out_dir);

    std::string body;
    jsonl::for_each_record(cfg.input_path, [&](int line, const nlohmann::json& record) {
        if (!record.is_object() || !record.contains("answer") || !record["answer"].is_string()) {
            throw jsonl::InputError(cfg.input_path + ":" + std::to_string(line) +
                                    ": expected an object with an \"answer\" string");
        }
        nlohmann::json out = record;
        const auto parsed = markup::parse_answer(record["answer"].get<std::string>());
        out["answer"] = markup::serialize_answer(markup::refine_citations(parsed.answer));
        body += out.dump() + "\n";
    });
    jsonl::write_file(cfg.output_path, body);

    write_manifest(cfg, "refine", {cfg.input_path}, {cfg.output_path});
    std::cerr << "refine: wrote " << cfg.output_path << "\n";
    return 0;
}

int cmd_inspect(const config::RunConfig& cfg, int limit) {
    require_file(cfg.input_path, "--input");
    int shown = 0;
    jsonl::for_each_record(cfg.input_path, [&](int line, const nlohmann::json& r) {
        if (shown >= limit) return;
        ++shown;
        std::cout << "--- record " << line;
        if (r.contains("chosen") && r.contains("rejected")) {
            std::cout << " (preference pair)\n";
            std::cout << "  query:      " << r.value("query", "") << "\n";
            std::cout << "  error type: " << r.value("error_type", "") << "\n";
            std::cout << "  chosen:     " << r["chosen"].value("text", "") << "\n";
            std::cout << "  rejected:   " << r["rejected"].value("text", "") << "\n";
        } else if (r.contains("question") && r.contains("answer")) {
            std::cout << " (question/answer)\n";
            std::cout << "  question: " << r.value("question", "") << "\n";
            std::cout << "  answer:   " << r.value("answer", "") << "\n";
            if (r.contains("docs")) std::cout << "  docs:     " << r["docs"].size() << "\n";
        } else if (r.contains("id") && r.contains("text")) {
            std::cout << " (document)\n";
            std::cout << "  id:    " << r.value("id", "") << "\n";
            std::cout << "  title: " << r.value("title", "") << "\n";
            std::cout << "  text:  " << r.value("text", "") << "\n";
        } else if (r.contains("query")) {
            std::cout << " (query)\n";
            std::cout << "  qid:   " << r.value("qid", "") << "\n";
            std::cout << "  query: " << r.value("query", "") << "\n";
        } else if (r.contains("summary")) {
            std::cout << " (provenance summary)\n  " << r.dump() << "\n";
        } else {
            std::cout << "\n  " << r.dump() << "\n";
        }
    });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"attribkit: citation-attribution preference toolkit"};
    app.require_subcommand(1);

    std::string config_file;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out_dir;
    auto* config_opt = app.add_option("--config", config_file, "JSON config file");
    auto* seed_opt = app.add_option("--seed", seed, "global RNG seed");
    auto* workers_opt = app.add_option("--workers", workers, "worker thread count");
    auto* out_dir_opt = app.add_option("--out-dir", out_dir, "output directory");

    std::string corpus_path;
    std::string queries_path;
    std::string pairs_path;
    std::string sft_path;
    std::string input_path;
    std::string output_path;
    bool refine_flag = false;
    int inspect_limit = 10;

    auto* ingest = app.add_subcommand("ingest", "normalize post-training records");
    auto* ingest_in = ingest->add_option("--input", input_path, "post-training JSONL");
    auto* ingest_out = ingest->add_option("--output", output_path, "normalized output path");

    auto* synth = app.add_subcommand("synth", "synthesize preference pairs");
    auto* synth_corpus = synth->add_option("--corpus", corpus_path, "corpus JSONL");
    auto* synth_queries = synth->add_option("--queries", queries_path, "queries JSONL");

    auto* train = app.add_subcommand("train", "train the policy on preference pairs");
    auto* train_pairs = train->add_option("--pairs", pairs_path, "pair JSONL");
    auto* train_sft = train->add_option("--sft", sft_path, "replay buffer JSONL");

    auto* eval = app.add_subcommand("eval", "score answers with attribution metrics");
    auto* eval_in = eval->add_option("--input", input_path, "evaluation JSONL");
    eval->add_flag("--refine", refine_flag, "refine citations before scoring");

    auto* refine = app.add_subcommand("refine", "propagate citations backward over answers");
    auto* refine_in = refine->add_option("--input", input_path, "answers JSONL");
    auto* refine_out = refine->add_option("--output", output_path, "refined output path");

    auto* inspect = app.add_subcommand("inspect", "pretty-print JSONL records");
    auto* inspect_in = inspect->add_option("--input", input_path, "any toolkit JSONL");
    inspect->add_option("--limit", inspect_limit, "records to show");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        auto cfg = config::load_config(
            config_opt->count() > 0 ? std::optional<fs::path>(config_file) : std::nullopt);
        if (seed_opt->count() > 0) cfg.seed = seed;
        if (workers_opt->count() > 0) cfg.workers = workers;
        if (out_dir_opt->count() > 0) cfg.out_dir = out_dir;
        if (synth_corpus->count() > 0) cfg.corpus_path = corpus_path;
        if (synth_queries->count() > 0) cfg.queries_path = queries_path;
        if (train_pairs->count() > 0) cfg.pairs_path = pairs_path;
        if (train_sft->count() > 0) cfg.sft_path = sft_path;
        if (ingest_in->count() > 0 || eval_in->count() > 0 || refine_in->count() > 0 ||
            inspect_in->count() > 0) {
            cfg.input_path = input_path;
        }
        if (ingest_out->count() > 0 || refine_out->count() > 0) cfg.output_path = output_path;
        cfg.validate();

        if (app.got_subcommand(ingest)) return cmd_ingest(cfg);
        if (app.got_subcommand(synth)) return cmd_synth(cfg);
        if (app.got_subcommand(train)) return cmd_train(cfg);
        if (app.got_subcommand(eval)) return cmd_eval(cfg, refine_flag);
        if (app.got_subcommand(refine)) return cmd_refine(cfg);
        if (app.got_subcommand(inspect)) return cmd_inspect(cfg, inspect_limit);
        return 2;
    } catch (const po::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const jsonl::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
