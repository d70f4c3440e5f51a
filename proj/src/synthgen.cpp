#include "attribkit/synthgen.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "attribkit/parallel.hpp"
#include "attribkit/text.hpp"

namespace attribkit::synth {

const char* error_type_name(ErrorType e) {
    switch (e) {
        case ErrorType::fabrication: return "fabrication";
        case ErrorType::mistaken_synthesis: return "mistaken_synthesis";
        case ErrorType::unintentional_omission: return "unintentional_omission";
        case ErrorType::irrelevant_but_supported: return "irrelevant_but_supported";
    }
    return "unknown";
}

ErrorType error_type_from_name(const std::string& name) {
    if (name == "fabrication") return ErrorType::fabrication;
    if (name == "mistaken_synthesis") return ErrorType::mistaken_synthesis;
    if (name == "unintentional_omission") return ErrorType::unintentional_omission;
    if (name == "irrelevant_but_supported") return ErrorType::irrelevant_but_supported;
    throw std::invalid_argument("unknown error type \"" + name + "\"");
}

namespace {

nlohmann::json statement_to_json(const markup::Statement& s) {
    return {{"text", s.text}, {"citations", s.citations}};
}

markup::Statement statement_from_json(const nlohmann::json& j) {
    markup::Statement s;
    s.text = j.at("text").get<std::string>();
    if (j.contains("citations")) s.citations = j["citations"].get<std::vector<int>>();
    return s;
}

// words split on whitespace, punctuation kept attached
std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> words;
    std::string cur;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) {
                words.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) words.push_back(cur);
    return words;
}

struct WordParts {
    std::string lead;   // leading punctuation
    std::string core;   // the token itself
    std::string trail;  // trailing punctuation
};

WordParts word_parts(const std::string& word) {
    std::size_t b = 0;
    std::size_t e = word.size();
    while (b < e && std::isalnum(static_cast<unsigned char>(word[b])) == 0) ++b;
    while (e > b && std::isalnum(static_cast<unsigned char>(word[e - 1])) == 0) --e;
    return {word.substr(0, b), word.substr(b, e - b), word.substr(e)};
}

bool entity_like(const std::string& core) {
    if (core.size() >= 2 && std::isupper(static_cast<unsigned char>(core[0])) != 0) return true;
    return core.size() == 4 &&
           std::all_of(core.begin(), core.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

std::unordered_set<std::string> doc_token_union(const std::vector<corpus::Document>& docs) {
    std::unordered_set<std::string> tokens;
    for (const auto& d : docs) {
        for (auto& t : text::tokenize(d.title + " " + d.text)) tokens.insert(std::move(t));
    }
    return tokens;
}

std::string coin_token(std::mt19937_64& rng, const std::unordered_set<std::string>& forbidden) {
    // "xq" prefix keeps coined tokens out of any natural-language corpus
    for (;;) {
        std::string token = "xq";
        for (int i = 0; i < 6; ++i) token.push_back(static_cast<char>('a' + rng() % 26));
        if (forbidden.count(token) == 0) return token;
    }
}

markup::Statement fabricate(const markup::Statement& positive,
                            const std::vector<corpus::Document>& docs, std::mt19937_64& rng) {
    auto words = split_words(positive.text);
    if (words.empty()) throw std::invalid_argument("scripted_negative: empty statement");

    std::vector<std::size_t> content_positions;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const auto parts = word_parts(words[i]);
        const auto lower = text::to_lower(parts.core);
        if (parts.core.size() >= 3 && !text::is_stopword(lower)) content_positions.push_back(i);
    }
    if (content_positions.empty()) {
        content_positions.push_back(words.size() - 1);
    }
    const std::size_t pos = content_positions[rng() % content_positions.size()];
    const auto parts = word_parts(words[pos]);
    const std::string coined = coin_token(rng, doc_token_union(docs));
    words[pos] = parts.lead + coined + parts.trail;

    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += words[i];
    }
    return {out, positive.citations};
}

markup::Statement intermingle(const markup::Statement& positive,
                              const std::vector<corpus::Document>& docs, std::mt19937_64& rng) {
    if (docs.size() < 2) {
        throw std::invalid_argument("scripted_negative: mistaken-synthesis needs two documents");
    }

    struct DocVocab {
        std::unordered_set<std::string> tokens;         // lowercased
        std::vector<std::string> entities;              // cased, first occurrence
    };
    std::vector<DocVocab> vocabs(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        std::unordered_set<std::string> seen;
        for (const auto& t : text::tokenize_cased(docs[d].title + " " + docs[d].text)) {
            vocabs[d].tokens.insert(text::to_lower(t));
            if (entity_like(t) && seen.insert(text::to_lower(t)).second) {
                vocabs[d].entities.push_back(t);
            }
        }
    }

    auto words = split_words(positive.text);
    std::vector<std::size_t> entity_positions;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (entity_like(word_parts(words[i]).core)) entity_positions.push_back(i);
    }
    if (entity_positions.empty()) {
        throw std::invalid_argument("scripted_negative: no entity-like token to swap");
    }

    const auto positive_lower = text::token_set(positive.text);
    const std::size_t rotate = rng() % entity_positions.size();
    for (std::size_t step = 0; step < entity_positions.size(); ++step) {
        const std::size_t pos = entity_positions[(step + rotate) % entity_positions.size()];
        const auto parts = word_parts(words[pos]);
        const auto lower = text::to_lower(parts.core);
        for (std::size_t a = 0; a < docs.size(); ++a) {
            if (vocabs[a].tokens.count(lower) == 0) continue;
            for (std::size_t off = 1; off < docs.size(); ++off) {
                const std::size_t b = (a + off) % docs.size();
                for (const auto& replacement : vocabs[b].entities) {
                    const auto repl_lower = text::to_lower(replacement);
                    if (repl_lower == lower) continue;
                    if (vocabs[a].tokens.count(repl_lower) > 0) continue;
                    if (positive_lower.count(repl_lower) > 0) continue;
                    words[pos] = parts.lead + replacement + parts.trail;
                    std::string out;
                    for (std::size_t i = 0; i < words.size(); ++i) {
                        if (i > 0) out.push_back(' ');
                        out += words[i];
                    }
                    return {out, positive.citations};
                }
            }
        }
    }
    throw std::invalid_argument("scripted_negative: no swappable entity");
}

markup::Statement omit(const markup::Statement& positive, std::mt19937_64& /*rng*/) {
    const std::string& full = positive.text;
    auto words = split_words(full);
    if (words.size() < 2) throw std::invalid_argument("scripted_negative: too-short");

    std::size_t term_begin = full.size();
    while (term_begin > 0 && (full[term_begin - 1] == '.' || full[term_begin - 1] == '!' ||
                              full[term_begin - 1] == '?')) {
        --term_begin;
    }
    const std::string terminal = full.substr(term_begin);
    const std::string body = full.substr(0, term_begin);

    const std::size_t comma = body.rfind(',');
    if (comma != std::string::npos &&
        body.find_first_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789") <
            comma) {
        return {body.substr(0, comma) + terminal, positive.citations};
    }

    auto body_words = split_words(body);
    const auto drop = std::max<std::size_t>(1, body_words.size() * 3 / 10);
    const auto keep = body_words.size() > drop ? body_words.size() - drop : 1;
    std::string out;
    for (std::size_t i = 0; i < keep; ++i) {
        if (i > 0) out.push_back(' ');
        out += body_words[i];
    }
    while (!out.empty() && (out.back() == ',' || out.back() == ';')) out.pop_back();
    return {out + terminal, positive.citations};
}

}  // namespace

markup::Statement scripted_negative(ErrorType kind, const markup::Statement& positive,
                                    const std::vector<corpus::Document>& docs,
                                    std::uint64_t rng_seed) {
    if (positive.text.empty()) throw std::invalid_argument("scripted_negative: empty statement");
    std::mt19937_64 rng(rng_seed);
    switch (kind) {
        case ErrorType::fabrication: return fabricate(positive, docs, rng);
        case ErrorType::mistaken_synthesis: return intermingle(positive, docs, rng);
        case ErrorType::unintentional_omission: return omit(positive, rng);
        case ErrorType::irrelevant_but_supported:
            throw std::invalid_argument(
                "scripted_negative: irrelevant_but_supported is generated from the "
                "irrelevant pool, not by perturbation");
    }
    throw std::invalid_argument("scripted_negative: unknown kind");
}

namespace {

// First sentence of a document, cleaned for bracket markup round-trips.
std::string first_sentence(const corpus::Document& doc) {
    auto segments = markup::segment_statements(doc.text);
    std::string s = segments.empty() ? doc.title : segments.front();
    std::string cleaned;
    cleaned.reserve(s.size());
    for (char c : s) {
        if (c != '[' && c != ']') cleaned.push_back(c);
    }
    cleaned = text::normalize_whitespace(cleaned);
    if (cleaned.empty()) cleaned = "Untitled passage";
    if (cleaned.back() != '.' && cleaned.back() != '!' && cleaned.back() != '?') {
        cleaned.push_back('.');
    }
    return cleaned;
}

markup::Statement mashup_statement(const corpus::Document& a, const corpus::Document& b,
                                   int cite) {
    const auto wa = split_words(first_sentence(a));
    const auto wb = split_words(first_sentence(b));
    std::string out;
    for (std::size_t i = 0; i < (wa.size() + 1) / 2; ++i) {
        if (!out.empty()) out.push_back(' ');
        out += wa[i];
    }
    for (std::size_t i = wb.size() / 2; i < wb.size(); ++i) {
        if (!out.empty()) out.push_back(' ');
        out += wb[i];
    }
    const auto parts = word_parts(out);
    if (!out.empty() && (out.back() == ',' || out.back() == ';')) out.pop_back();
    (void)parts;
    if (out.empty()) out = "Unknown.";
    if (out.back() != '.' && out.back() != '!' && out.back() != '?') out.push_back('.');
    return {out, {cite}};
}

}  // namespace

std::string ScriptedGenerator::generate_answer(const std::string& /*instruction*/,
                                               const std::string& /*query*/,
                                               const std::vector<corpus::Document>& docs,
                                               std::uint64_t seed) const {
    if (docs.empty()) throw std::invalid_argument("scripted generator: no documents");
    std::mt19937_64 rng(seed);
    const std::size_t n_statements = 2 + rng() % 2;

    markup::AttributedAnswer answer;
    for (std::size_t i = 0; i < n_statements; ++i) {
        const auto roll = rng() % 10;
        const auto j = rng() % docs.size();
        const auto j2 = docs.size() > 1 ? (j + 1 + rng() % (docs.size() - 1)) % docs.size() : j;
        const int cite = static_cast<int>(j) + 1;
        const int cite2 = static_cast<int>(j2) + 1;

        if (roll < 6 || docs.size() < 2) {
            answer.statements.push_back({first_sentence(docs[j]), {cite}});
        } else if (roll < 8) {
            answer.statements.push_back(mashup_statement(docs[j], docs[j2], cite));
        } else if (roll == 8) {
            answer.statements.push_back({first_sentence(docs[j]), {cite, cite2}});
        } else {
            answer.statements.push_back({first_sentence(docs[j]), {}});
        }
    }
    return markup::serialize_answer(answer);
}

markup::Statement ScriptedGenerator::generate_statement(
    templates::Kind kind, const std::string& /*query*/,
    const std::vector<markup::Statement>& /*prefix*/, const std::vector<corpus::Document>& docs,
    const std::optional<markup::Statement>& positive, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    switch (kind) {
        case templates::Kind::post_training:
        case templates::Kind::positive: {
            if (docs.empty()) throw std::invalid_argument("scripted generator: no documents");
            const auto j = rng() % docs.size();
            return {first_sentence(docs[j]), {static_cast<int>(j) + 1}};
        }
        case templates::Kind::fabrication:
        case templates::Kind::synthesis:
        case templates::Kind::omission: {
            if (!positive.has_value()) {
                throw std::invalid_argument("scripted generator: negative kinds need the positive");
            }
            const ErrorType et = kind == templates::Kind::fabrication
                                     ? ErrorType::fabrication
                                     : (kind == templates::Kind::synthesis
                                            ? ErrorType::mistaken_synthesis
                                            : ErrorType::unintentional_omission);
            return scripted_negative(et, *positive, docs, seed);
        }
    }
    throw std::invalid_argument("scripted generator: unknown kind");
}

std::uint64_t unit_seed(std::uint64_t global_seed, const std::string& qid, int statement_index) {
    return text::fnv1a_combine(
        {std::to_string(global_seed), qid, std::to_string(statement_index)});
}

namespace {

std::uint64_t sub_seed(std::uint64_t unit, const char* tag) {
    return text::fnv1a_combine({std::to_string(unit), tag});
}

std::vector<corpus::Document> resolve_docs(const corpus::Corpus& corpus,
                                           const std::vector<corpus::RetrievalResult>& results) {
    std::vector<corpus::Document> docs;
    docs.reserve(results.size());
    for (const auto& r : results) {
        const auto* doc = corpus.find(r.doc_id);
        if (doc == nullptr) throw std::runtime_error("retriever returned unknown id " + r.doc_id);
        docs.push_back(*doc);
    }
    return docs;
}

}  // namespace

SampleResult sample_and_label(const std::vector<Query>& queries, const corpus::Retriever& retriever,
                              const corpus::Corpus& corpus, const critic::Critic& critic,
                              const Generator& generator, const SynthesisConfig& config) {
    if (config.top_k < 1) throw std::invalid_argument("sample_and_label: top_k must be >= 1");

    struct Unit {
        std::optional<InitRecord> record;
        std::optional<SkipRecord> skip;
    };

    auto run_one = [&](std::size_t qi) -> Unit {
        const Query& q = queries[qi];
        std::vector<corpus::RetrievalResult> results;
        try {
            results = retriever.retrieve(q.query, config.top_k);
        } catch (const std::exception& e) {
            return {std::nullopt, SkipRecord{q.qid, std::string("retrieval: ") + e.what()}};
        }
        if (results.empty()) return {std::nullopt, SkipRecord{q.qid, "no-documents"}};

        InitRecord record;
        record.qid = q.qid;
        record.query = q.query;
        record.docs = resolve_docs(corpus, results);
        for (const auto& doc : record.docs) {
            record.labels.relevant[doc.id] = critic.judge_relevance(q.query, doc);
        }

        std::string answer_text;
        try {
            templates::Fields fields;
            fields.question = q.query;
            fields.docs = record.docs;
            const auto instruction =
                templates::render_template(templates::Kind::post_training, fields);
            answer_text = generator.generate_answer(instruction, q.query, record.docs,
                                                    unit_seed(config.seed, q.qid, -1));
        } catch (const std::exception& e) {
            return {std::nullopt, SkipRecord{q.qid, std::string("generator: ") + e.what()}};
        }

        record.answer = markup::parse_answer(answer_text).answer;
        if (record.answer.statements.empty()) {
            return {std::nullopt, SkipRecord{q.qid, "empty-answer"}};
        }
        for (const auto& stmt : record.answer.statements) {
            for (int c : stmt.citations) {
                if (c < 1 || static_cast<std::size_t>(c) > record.docs.size()) {
                    return {std::nullopt, SkipRecord{q.qid, "invalid-citation"}};
                }
            }
        }

        for (std::size_t i = 0; i < record.answer.statements.size(); ++i) {
            const auto& stmt = record.answer.statements[i];
            for (int c : stmt.citations) {
                const auto& doc = record.docs[static_cast<std::size_t>(c - 1)];
                record.labels.supported[{static_cast<int>(i), doc.id}] =
                    critic.judge_support(q.query, doc, stmt.text);
            }
        }
        return {std::move(record), std::nullopt};
    };

    auto units = parallel::ordered_map<Unit>(queries.size(), config.workers, run_one);

    SampleResult out;
    for (auto& unit : units) {
        if (unit.record.has_value()) out.records.push_back(std::move(*unit.record));
        if (unit.skip.has_value()) out.skips.push_back(std::move(*unit.skip));
    }
    return out;
}

std::vector<PrefixCandidate> select_relevant_prefixes(const std::vector<InitRecord>& records,
                                                      const critic::Critic& critic) {
    std::vector<PrefixCandidate> candidates;
    for (const auto& record : records) {
        for (std::size_t i = 0; i < record.answer.statements.size(); ++i) {
            const auto& stmt = record.answer.statements[i];
            if (stmt.citations.empty()) continue;  // no vacuous relevance
            bool all_relevant = true;
            for (int c : stmt.citations) {
                const auto& doc = record.docs[static_cast<std::size_t>(c - 1)];
                auto it = record.labels.relevant.find(doc.id);
                const critic::Judgment j = it != record.labels.relevant.end()
                                               ? it->second
                                               : critic.judge_relevance(record.query, doc);
                if (j.label != 1) {
                    all_relevant = false;
                    break;
                }
            }
            if (!all_relevant) continue;

            PrefixCandidate candidate;
            candidate.qid = record.qid;
            candidate.query = record.query;
            candidate.docs = record.docs;
            candidate.prefix.assign(record.answer.statements.begin(),
                                    record.answer.statements.begin() +
                                        static_cast<std::ptrdiff_t>(i + 1));
            candidate.statement_index = static_cast<int>(i);
            candidate.labels = record.labels;
            candidates.push_back(std::move(candidate));
        }
    }
    return candidates;
}

namespace {

struct CandidateOutput {
    std::vector<PreferencePair> pairs;
    nlohmann::json provenance;
    bool skipped = false;
    bool fully_supported = false;
    int discards = 0;
};

templates::Kind template_kind_for(ErrorType e) {
    switch (e) {
        case ErrorType::fabrication: return templates::Kind::fabrication;
        case ErrorType::mistaken_synthesis: return templates::Kind::synthesis;
        case ErrorType::unintentional_omission: return templates::Kind::omission;
        case ErrorType::irrelevant_but_supported: return templates::Kind::positive;
    }
    throw std::invalid_argument("unknown error type");
}

constexpr ErrorType kRoundRobin[3] = {ErrorType::fabrication, ErrorType::mistaken_synthesis,
                                      ErrorType::unintentional_omission};

}  // namespace

nlohmann::json SynthesisResult::summary() const {
    return {{"summary", true},
            {"candidates", fully_supported + unsupported},
            {"fully_supported", fully_supported},
            {"unsupported", unsupported},
            {"pairs_written", pairs.size()},
            {"discarded", discarded}};
}

SynthesisResult synthesize_pairs(const std::vector<PrefixCandidate>& candidates,
                                 const corpus::Retriever& retriever,
                                 const corpus::Corpus& corpus, const critic::Critic& critic,
                                 const Generator& generator, const SynthesisConfig& config) {
    auto run_one = [&](std::size_t ci) -> CandidateOutput {
        const PrefixCandidate& candidate = candidates[ci];
        const std::uint64_t useed = unit_seed(config.seed, candidate.qid, candidate.statement_index);
        CandidateOutput out;
        out.provenance = {{"qid", candidate.qid},
                          {"statement_index", candidate.statement_index},
                          {"generator", generator.id()},
                          {"unit_seed", useed}};

        const markup::Statement& target = candidate.prefix.back();
        const std::vector<markup::Statement> preceding(candidate.prefix.begin(),
                                                       candidate.prefix.end() - 1);

        // irrelevant pool from a wide retrieval
        critic::IrrelevantSelection irrelevant;
        try {
            const auto wide = retriever.retrieve(candidate.query, config.top_m);
            irrelevant = critic::select_irrelevant_detailed(critic, candidate.query,
                                                            resolve_docs(corpus, wide));
        } catch (const std::exception& e) {
            out.skipped = true;
            out.provenance["skipped"] = std::string("irrelevant-pool: ") + e.what();
            return out;
        }

        // fully supported: every cited document has support label 1
        bool fully = !target.citations.empty();
        nlohmann::json support_scores = nlohmann::json::object();
        for (int c : target.citations) {
            const auto& doc = candidate.docs[static_cast<std::size_t>(c - 1)];
            auto it = candidate.labels.supported.find({candidate.statement_index, doc.id});
            const critic::Judgment j = it != candidate.labels.supported.end()
                                           ? it->second
                                           : critic.judge_support(candidate.query, doc, target.text);
            support_scores[doc.id] = j.score;
            if (j.label != 1) fully = false;
        }
        out.fully_supported = fully;

        // expand the citation set with further supporting context documents
        // (fresh judgments, capped at 3, support-score order)
        std::vector<int> new_citations = target.citations;
        {
            struct Addition {
                int index;
                critic::Judgment judgment;
            };
            std::vector<Addition> additions;
            const std::set<int> cited(target.citations.begin(), target.citations.end());
            for (std::size_t d = 0; d < candidate.docs.size(); ++d) {
                const int index = static_cast<int>(d) + 1;
                if (cited.count(index) > 0) continue;
                const auto j = critic.judge_support(candidate.query, candidate.docs[d], target.text);
                if (j.label == 1) additions.push_back({index, j});
            }
            std::sort(additions.begin(), additions.end(), [&](const Addition& a, const Addition& b) {
                if (a.judgment.score != b.judgment.score) return a.judgment.score > b.judgment.score;
                return candidate.docs[static_cast<std::size_t>(a.index - 1)].id <
                       candidate.docs[static_cast<std::size_t>(b.index - 1)].id;
            });
            nlohmann::json expanded = nlohmann::json::array();
            for (std::size_t a = 0; a < additions.size() && a < 3; ++a) {
                new_citations.push_back(additions[a].index);
                expanded.push_back(
                    candidate.docs[static_cast<std::size_t>(additions[a].index - 1)].id);
            }
            out.provenance["expanded_citations"] = expanded;
        }

        auto docs_at = [&](const std::vector<int>& indices) {
            std::vector<corpus::Document> docs;
            docs.reserve(indices.size());
            for (int i : indices) docs.push_back(candidate.docs[static_cast<std::size_t>(i - 1)]);
            return docs;
        };

        // positive statement grounded in the expanded citation set
        markup::Statement chosen;
        try {
            const auto raw = generator.generate_statement(
                templates::Kind::positive, candidate.query, preceding, docs_at(new_citations),
                std::nullopt, sub_seed(useed, "positive"));
            chosen.text = raw.text;
            for (int local : raw.citations) {
                if (local < 1 || static_cast<std::size_t>(local) > new_citations.size()) continue;
                chosen.citations.push_back(new_citations[static_cast<std::size_t>(local - 1)]);
            }
        } catch (const std::exception& e) {
            out.skipped = true;
            out.provenance["skipped"] = std::string("positive-generator: ") + e.what();
            return out;
        }

        // negative generation with fallback to fabrication when a scripted
        // subtype is infeasible for this statement
        auto make_negative = [&](ErrorType wanted, const std::vector<corpus::Document>& docs,
                                 std::uint64_t seed) -> std::pair<markup::Statement, ErrorType> {
            try {
                return {generator.generate_statement(template_kind_for(wanted), candidate.query,
                                                     preceding, docs, chosen, seed),
                        wanted};
            } catch (const std::invalid_argument&) {
                if (wanted == ErrorType::fabrication) throw;
                return {generator.generate_statement(templates::Kind::fabrication, candidate.query,
                                                     preceding, docs, chosen, seed),
                        ErrorType::fabrication};
            }
        };

        auto emit_pair = [&](markup::Statement rejected, ErrorType et, int pair_index,
                             nlohmann::json pair_extra) {
            if (text::normalize_whitespace(chosen.text) ==
                text::normalize_whitespace(rejected.text)) {
                ++out.discards;
                out.provenance["discards"].push_back(
                    {{"pair_index", pair_index}, {"reason", "degenerate-pair"}});
                return;
            }
            PreferencePair pair;
            pair.qid = candidate.qid;
            pair.query = candidate.query;
            pair.context_docs = candidate.docs;
            pair.prefix = preceding;
            pair.chosen = chosen;
            pair.rejected = std::move(rejected);
            pair.error_type = et;
            pair.statement_index = candidate.statement_index;
            pair.pair_index = pair_index;
            pair.provenance = {{"qid", candidate.qid},
                               {"statement_index", candidate.statement_index},
                               {"pair_index", pair_index},
                               {"generator", generator.id()},
                               {"unit_seed", useed},
                               {"fully_supported", fully},
                               {"support_scores", support_scores}};
            for (auto& [key, value] : pair_extra.items()) pair.provenance[key] = value;
            out.pairs.push_back(std::move(pair));
        };

        const ErrorType subtype =
            kRoundRobin[static_cast<std::size_t>(candidate.statement_index) % 3];
        try {
            if (fully) {
                auto [neg_unsupported, actual] = make_negative(subtype, docs_at(new_citations),
                                                               sub_seed(useed, "negative"));
                emit_pair(std::move(neg_unsupported), actual, 0, nlohmann::json::object());

                auto neg_irrelevant = generator.generate_statement(
                    templates::Kind::positive, candidate.query, preceding, irrelevant.docs,
                    std::nullopt, sub_seed(useed, "irrelevant"));
                nlohmann::json sources = nlohmann::json::array();
                nlohmann::json source_scores = nlohmann::json::array();
                for (int local : neg_irrelevant.citations) {
                    if (local < 1 || static_cast<std::size_t>(local) > irrelevant.docs.size()) {
                        continue;
                    }
                    sources.push_back(irrelevant.docs[static_cast<std::size_t>(local - 1)].id);
                    source_scores.push_back(
                        irrelevant.scores[static_cast<std::size_t>(local - 1)]);
                }
                neg_irrelevant.citations.clear();  // sources live outside the pair context
                emit_pair(std::move(neg_irrelevant), ErrorType::irrelevant_but_supported, 1,
                          {{"negative_source_ids", sources},
                           {"negative_source_scores", source_scores},
                           {"irrelevant_fallback", irrelevant.fallback_by_rank}});
            } else {
                const std::set<int> in_new(new_citations.begin(), new_citations.end());
                std::vector<int> remainder;
                for (std::size_t d = 0; d < candidate.docs.size(); ++d) {
                    const int index = static_cast<int>(d) + 1;
                    if (in_new.count(index) == 0) remainder.push_back(index);
                }
                auto [negative, actual] =
                    make_negative(subtype, docs_at(remainder), sub_seed(useed, "negative"));
                emit_pair(std::move(negative), actual, 0, nlohmann::json::object());
            }
        } catch (const std::exception& e) {
            out.skipped = true;
            out.pairs.clear();
            out.discards = 0;
            out.provenance["skipped"] = std::string("negative-generator: ") + e.what();
            return out;
        }

        out.provenance["fully_supported"] = fully;
        out.provenance["support_scores"] = support_scores;
        out.provenance["target_citations"] = target.citations;
        out.provenance["pairs_emitted"] = out.pairs.size();
        nlohmann::json pool = nlohmann::json::array();
        for (std::size_t i = 0; i < irrelevant.docs.size(); ++i) {
            pool.push_back({{"id", irrelevant.docs[i].id}, {"score", irrelevant.scores[i]}});
        }
        out.provenance["irrelevant_pool"] = pool;
        out.provenance["irrelevant_fallback"] = irrelevant.fallback_by_rank;
        return out;
    };

    auto outputs = parallel::ordered_map<CandidateOutput>(candidates.size(), config.workers,
                                                          run_one);

    SynthesisResult result;
    for (auto& o : outputs) {
        result.provenance.push_back(std::move(o.provenance));
        if (o.skipped) continue;
        if (o.fully_supported) {
            ++result.fully_supported;
        } else {
            ++result.unsupported;
        }
        result.discarded += o.discards;
        for (auto& p : o.pairs) result.pairs.push_back(std::move(p));
    }

    std::sort(result.pairs.begin(), result.pairs.end(),
              [](const PreferencePair& a, const PreferencePair& b) {
                  if (a.qid != b.qid) return a.qid < b.qid;
                  if (a.statement_index != b.statement_index) {
                      return a.statement_index < b.statement_index;
                  }
                  return a.pair_index < b.pair_index;
              });
    return result;
}

nlohmann::json pair_to_json(const PreferencePair& pair) {
    nlohmann::json docs = nlohmann::json::array();
    for (const auto& d : pair.context_docs) docs.push_back(corpus::document_to_json(d));
    nlohmann::json prefix = nlohmann::json::array();
    for (const auto& s : pair.prefix) prefix.push_back(statement_to_json(s));
    return {{"query", pair.query},
            {"docs", docs},
            {"prefix", prefix},
            {"chosen", statement_to_json(pair.chosen)},
            {"rejected", statement_to_json(pair.rejected)},
            {"error_type", error_type_name(pair.error_type)},
            {"provenance", pair.provenance}};
}

PreferencePair pair_from_json(const nlohmann::json& j) {
    PreferencePair pair;
    pair.query = j.at("query").get<std::string>();
    for (const auto& d : j.at("docs")) pair.context_docs.push_back(corpus::document_from_json(d));
    for (const auto& s : j.at("prefix")) pair.prefix.push_back(statement_from_json(s));
    pair.chosen = statement_from_json(j.at("chosen"));
    pair.rejected = statement_from_json(j.at("rejected"));
    pair.error_type = error_type_from_name(j.at("error_type").get<std::string>());
    pair.provenance = j.value("provenance", nlohmann::json::object());
    pair.qid = pair.provenance.value("qid", "");
    pair.statement_index = pair.provenance.value("statement_index", 0);
    pair.pair_index = pair.provenance.value("pair_index", 0);
    return pair;
}

}  // namespace attribkit::synth
