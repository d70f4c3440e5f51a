#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace attribkit::corpus {

/// A retrievable passage.
struct Document {
    std::string id;
    std::string title;
    std::string text;

    bool operator==(const Document&) const = default;
};

Document document_from_json(const nlohmann::json& j);
nlohmann::json document_to_json(const Document& d);

struct RetrievalResult {
    std::string doc_id;
    double score = 0.0;
    int rank = 0;  // 1-based
};

class Corpus {
public:
    void add(Document doc);  // throws on duplicate id
    const std::vector<Document>& documents() const { return docs_; }
    const Document& at(std::size_t i) const { return docs_.at(i); }
    const Document* find(const std::string& id) const;
    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }

private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// One document per JSONL line: {"id", "title", "text"}. Duplicate ids
/// and malformed lines raise InputError naming the offender.
Corpus load_corpus(const std::filesystem::path& path);

/// Ranking contract shared by all retriever backends: top-k documents,
/// scores non-increasing, ties broken by ascending doc id, and
/// retrieve(q, k) is a prefix of retrieve(q, k+1).
class Retriever {
public:
    virtual ~Retriever() = default;
    virtual std::vector<RetrievalResult> retrieve(const std::string& query, int k) const = 0;
};

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// Inverted index over lowercased, punctuation-stripped tokens of
/// title+text. No stemming, no stopword removal.
class Index : public Retriever {
public:
    const Corpus& corpus() const { return *corpus_; }
    std::size_t doc_count() const { return doc_lengths_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }

    int term_frequency(const std::string& term, std::size_t doc_index) const;
    int document_frequency(const std::string& term) const;

    std::vector<RetrievalResult> retrieve(const std::string& query, int k) const override;

private:
    friend Index build_index(const Corpus&, Bm25Params);

    struct Posting {
        std::size_t doc_index;
        int tf;
    };

    std::shared_ptr<const Corpus> corpus_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::vector<int> doc_lengths_;
    double avg_doc_length_ = 0.0;
    Bm25Params params_;
};

/// Builds the inverted index; the corpus is copied so the index owns an
/// immutable snapshot. Empty corpus is an error.
Index build_index(const Corpus& corpus, Bm25Params params = {});

/// Post-training record filtering. Reasons:
///   empty-reference   — a citation resolves to a document with empty text
///                       (or to no document at all)
///   duplicate-context — two documents with distinct ids share identical text
///   none-reference    — a cited document's text is the literal "None"
///   no-references     — the record has no documents
struct DropRecord {
    int line = 0;  // 1-based position in the input record list
    std::string reason;
};

struct NormalizeResult {
    /// Surviving records, serialized one per entry. Records that needed
    /// no change are passed through byte-identical.
    std::vector<std::string> lines;
    std::vector<DropRecord> drops;
};

/// Applies the drop rules above to post-training records
/// ({"question", "docs", "answer"}), normalizes the citation bracket
/// format ("[1, 2]" and "[1] [2]" become "[1][2]") and maps any truthy
/// "supported" field variant (yes/true/supported/1) to a boolean.
/// Idempotent: a second pass drops nothing and changes no bytes.
NormalizeResult normalize_training_data(const std::vector<std::string>& record_lines);

NormalizeResult normalize_training_file(const std::filesystem::path& path);

}  // namespace attribkit::corpus
