#include "attribkit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include "attribkit/jsonl.hpp"
#include "attribkit/markup.hpp"
#include "attribkit/text.hpp"

namespace attribkit::corpus {

using jsonl::InputError;

Document document_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("id") || !j.contains("title") || !j.contains("text") ||
        !j["id"].is_string() || !j["title"].is_string() || !j["text"].is_string()) {
        throw InputError("document record must have string fields id, title, text");
    }
    return {j["id"].get<std::string>(), j["title"].get<std::string>(),
            j["text"].get<std::string>()};
}

nlohmann::json document_to_json(const Document& d) {
    return {{"id", d.id}, {"title", d.title}, {"text", d.text}};
}

void Corpus::add(Document doc) {
    if (by_id_.count(doc.id) > 0) {
        throw InputError("duplicate document id \"" + doc.id + "\"");
    }
    by_id_.emplace(doc.id, docs_.size());
    docs_.push_back(std::move(doc));
}

const Document* Corpus::find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &docs_[it->second];
}

Corpus load_corpus(const std::filesystem::path& path) {
    Corpus corpus;
    jsonl::for_each_record(path, [&](int line, const nlohmann::json& record) {
        Document doc;
        try {
            doc = document_from_json(record);
        } catch (const InputError& e) {
            throw InputError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
        if (doc.text.empty()) {
            throw InputError(path.string() + ":" + std::to_string(line) +
                             ": document \"" + doc.id + "\" has empty text");
        }
        corpus.add(std::move(doc));
    });
    return corpus;
}

Index build_index(const Corpus& corpus, Bm25Params params) {
    if (corpus.empty()) throw std::invalid_argument("build_index: empty corpus");
    Index index;
    index.corpus_ = std::make_shared<Corpus>(corpus);
    index.params_ = params;

    long total_length = 0;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        const auto& doc = corpus.at(d);
        auto tokens = text::tokenize(doc.title + " " + doc.text);
        index.doc_lengths_.push_back(static_cast<int>(tokens.size()));
        total_length += static_cast<long>(tokens.size());

        std::unordered_map<std::string, int> counts;
        for (auto& t : tokens) ++counts[t];
        for (auto& [term, tf] : counts) index.postings_[term].push_back({d, tf});
    }
    index.avg_doc_length_ =
        static_cast<double>(total_length) / static_cast<double>(corpus.size());
    // postings in ascending doc order for reproducible accumulation
    for (auto& [term, list] : index.postings_) {
        std::sort(list.begin(), list.end(),
                  [](const Index::Posting& a, const Index::Posting& b) {
                      return a.doc_index < b.doc_index;
                  });
    }
    return index;
}

int Index::term_frequency(const std::string& term, std::size_t doc_index) const {
    auto it = postings_.find(term);
    if (it == postings_.end()) return 0;
    for (const auto& p : it->second) {
        if (p.doc_index == doc_index) return p.tf;
    }
    return 0;
}

int Index::document_frequency(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : static_cast<int>(it->second.size());
}

std::vector<RetrievalResult> Index::retrieve(const std::string& query, int k) const {
    if (k < 1) throw std::invalid_argument("retrieve: k must be >= 1");
    const auto query_terms = text::unique_tokens(text::tokenize(query));
    if (query_terms.empty()) return {};

    const auto n = static_cast<double>(doc_count());
    std::vector<double> scores(doc_count(), 0.0);
    for (const auto& term : query_terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const auto df = static_cast<double>(it->second.size());
        const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
        for (const auto& posting : it->second) {
            const auto tf = static_cast<double>(posting.tf);
            const auto dl = static_cast<double>(doc_lengths_[posting.doc_index]);
            const double norm = 1.0 - params_.b + params_.b * dl / avg_doc_length_;
            scores[posting.doc_index] += idf * tf * (params_.k1 + 1.0) / (tf + params_.k1 * norm);
        }
    }

    std::vector<std::size_t> order(doc_count());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return corpus_->at(a).id < corpus_->at(b).id;
    });

    const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
    std::vector<RetrievalResult> results;
    results.reserve(take);
    for (std::size_t r = 0; r < take; ++r) {
        results.push_back({corpus_->at(order[r]).id, scores[order[r]], static_cast<int>(r) + 1});
    }
    return results;
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// "[1, 2]" -> "[1][2]" and "[1] [2]" -> "[1][2]"
std::string normalize_brackets(const std::string& answer) {
    static const std::regex comma_group(R"(\[(\d+(?:\s*,\s*\d+)+)\])");
    static const std::regex digit(R"(\d+)");
    std::string out;
    out.reserve(answer.size());
    auto begin = std::sregex_iterator(answer.begin(), answer.end(), comma_group);
    std::size_t last = 0;
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        out.append(answer, last, static_cast<std::size_t>(it->position()) - last);
        const std::string body = (*it)[1].str();
        for (auto d = std::sregex_iterator(body.begin(), body.end(), digit);
             d != std::sregex_iterator(); ++d) {
            out += "[" + d->str() + "]";
        }
        last = static_cast<std::size_t>(it->position() + it->length());
    }
    out.append(answer, last, answer.size() - last);
    static const std::regex gap(R"(\]\s+\[)");
    return std::regex_replace(out, gap, "][");
}

bool truthy_supported(const nlohmann::json& v) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number()) return v.get<double>() != 0.0;
    if (v.is_string()) {
        const auto s = text::to_lower(v.get<std::string>());
        return s == "yes" || s == "true" || s == "supported" || s == "1";
    }
    return false;
}

// First matching drop reason, or empty string to keep the record.
std::string drop_reason(const nlohmann::json& record) {
    const auto& docs = record["docs"];
    if (docs.empty()) return "no-references";

    const auto parsed = markup::parse_answer(record["answer"].get<std::string>());
    for (const auto& stmt : parsed.answer.statements) {
        for (int c : stmt.citations) {
            if (c < 1 || static_cast<std::size_t>(c) > docs.size()) return "empty-reference";
            const auto cited = docs[static_cast<std::size_t>(c - 1)];
            const std::string body = trim(cited.value("text", ""));
            if (body == "None") return "none-reference";
            if (body.empty()) return "empty-reference";
        }
    }
    for (std::size_t i = 0; i < docs.size(); ++i) {
        for (std::size_t j = i + 1; j < docs.size(); ++j) {
            if (docs[i].value("id", "") != docs[j].value("id", "") &&
                docs[i].value("text", "") == docs[j].value("text", "")) {
                return "duplicate-context";
            }
        }
    }
    return {};
}

}  // namespace

NormalizeResult normalize_training_data(const std::vector<std::string>& record_lines) {
    NormalizeResult result;
    int line_number = 0;
    for (const auto& line : record_lines) {
        ++line_number;
        nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_discarded()) {
            throw InputError("line " + std::to_string(line_number) + ": malformed JSON");
        }
        if (!record.is_object() || !record.contains("question") || !record.contains("docs") ||
            !record.contains("answer") || !record["question"].is_string() ||
            !record["docs"].is_array() || !record["answer"].is_string()) {
            throw InputError("line " + std::to_string(line_number) +
                             ": expected {question, docs, answer}");
        }

        nlohmann::json normalized = record;
        normalized["answer"] = normalize_brackets(record["answer"].get<std::string>());
        if (normalized.contains("supported")) {
            normalized["supported"] = truthy_supported(normalized["supported"]);
        }
        for (auto& doc : normalized["docs"]) {
            if (doc.is_object() && doc.contains("supported")) {
                doc["supported"] = truthy_supported(doc["supported"]);
            }
        }

        const std::string reason = drop_reason(normalized);
        if (!reason.empty()) {
            result.drops.push_back({line_number, reason});
            continue;
        }
        result.lines.push_back(normalized == record ? line : normalized.dump());
    }
    return result;
}

NormalizeResult normalize_training_file(const std::filesystem::path& path) {
    std::vector<std::string> lines;
    const std::string raw = jsonl::read_file(path);
    std::size_t begin = 0;
    while (begin < raw.size()) {
        std::size_t end = raw.find('\n', begin);
        if (end == std::string::npos) end = raw.size();
        std::string line = raw.substr(begin, end - begin);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos) lines.push_back(line);
        begin = end + 1;
    }
    return normalize_training_data(lines);
}

}  // namespace attribkit::corpus
