#include <doctest.h>

#include <random>

#include "attribkit/markup.hpp"
#include "attribkit/text.hpp"

using namespace attribkit;
using markup::AttributedAnswer;
using markup::Statement;

namespace {

// random but well-formed answers for the round-trip property
AttributedAnswer random_answer(std::mt19937_64& rng) {
    static const char* words[] = {"river",  "storm",  "plateau", "violet", "meridian",
                                  "copper", "falcon", "harbor",  "signal", "lantern",
                                  "Turing", "Nile",   "quiet",   "orbit",  "cedar"};
    static const char terminals[] = {'.', '!', '?'};
    AttributedAnswer answer;
    const std::size_t n = 1 + rng() % 4;
    for (std::size_t s = 0; s < n; ++s) {
        std::string text;
        const std::size_t len = 3 + rng() % 6;
        for (std::size_t w = 0; w < len; ++w) {
            if (w > 0) text += rng() % 7 == 0 ? ", " : " ";
            text += words[rng() % std::size(words)];
        }
        text += terminals[rng() % 3];

        Statement stmt;
        stmt.text = text;
        const std::size_t cites = rng() % 4;
        while (stmt.citations.size() < cites) {
            const int c = 1 + static_cast<int>(rng() % 9);
            bool fresh = true;
            for (int e : stmt.citations) fresh = fresh && e != c;
            if (fresh) stmt.citations.push_back(c);
        }
        answer.statements.push_back(std::move(stmt));
    }
    return answer;
}

}  // namespace

TEST_SUITE("markup") {

TEST_CASE("segments split on terminal punctuation") {
    CHECK(markup::segment_statements("A. B? C!") ==
          std::vector<std::string>{"A.", "B?", "C!"});
}

TEST_CASE("empty input gives empty list") {
    CHECK(markup::segment_statements("").empty());
    CHECK(markup::segment_statements("   \n\t ").empty());
}

TEST_CASE("abbreviation guard keeps sentences together") {
    const std::string paragraph =
        "Rivers flood in spring, e.g. after heavy snow melt. "
        "Dams hold part of the water back. Farmers rely on the rest.";
    const auto segments = markup::segment_statements(paragraph);
    REQUIRE(segments.size() == 3);
    CHECK(segments[0] == "Rivers flood in spring, e.g. after heavy snow melt.");
    CHECK(segments[1] == "Dams hold part of the water back.");
    CHECK(segments[2] == "Farmers rely on the rest.");
}

TEST_CASE("decimal points never split") {
    const auto segments =
        markup::segment_statements("The star formed 4.6 billion years ago. It still burns.");
    REQUIRE(segments.size() == 2);
    CHECK(segments[0] == "The star formed 4.6 billion years ago.");
}

TEST_CASE("segmentation only collapses whitespace") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto answer = random_answer(rng);
        const auto input = markup::serialize_answer(answer);
        const auto segments = markup::segment_statements(input);
        std::string joined;
        for (std::size_t s = 0; s < segments.size(); ++s) {
            if (s > 0) joined += " ";
            joined += segments[s];
        }
        CHECK(joined == text::normalize_whitespace(input));
    }
}

TEST_CASE("parse extracts bracket markers into citations") {
    const auto result =
        markup::parse_answer("The sun is formed approximately 4.6 billion years ago [1][2].");
    REQUIRE(result.answer.statements.size() == 1);
    const auto& stmt = result.answer.statements[0];
    CHECK(stmt.text == "The sun is formed approximately 4.6 billion years ago.");
    CHECK(stmt.citations == std::vector<int>{1, 2});
    CHECK(result.warnings.empty());
}

TEST_CASE("parse without markers leaves citations empty") {
    const auto result = markup::parse_answer("No citations here.");
    REQUIRE(result.answer.statements.size() == 1);
    CHECK(result.answer.statements[0].text == "No citations here.");
    CHECK(result.answer.statements[0].citations.empty());
}

TEST_CASE("markers attach to their own statement") {
    const auto result = markup::parse_answer("A [3]. B.");
    REQUIRE(result.answer.statements.size() == 2);
    CHECK(result.answer.statements[0] == Statement{"A.", {3}});
    CHECK(result.answer.statements[1] == Statement{"B.", {}});
}

TEST_CASE("malformed markers stay in the text and warn") {
    const auto result = markup::parse_answer("Some claim [abc] stands [2].");
    REQUIRE(result.answer.statements.size() == 1);
    CHECK(result.answer.statements[0].text == "Some claim [abc] stands.");
    CHECK(result.answer.statements[0].citations == std::vector<int>{2});
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].marker == "[abc]");
}

TEST_CASE("duplicate markers deduplicate in first-occurrence order") {
    const auto result = markup::parse_answer("Claim [2][1][2].");
    REQUIRE(result.answer.statements.size() == 1);
    CHECK(result.answer.statements[0].citations == std::vector<int>{2, 1});
}

TEST_CASE("serialize places markers before terminal punctuation") {
    AttributedAnswer answer;
    answer.statements.push_back({"A.", {1, 2}});
    CHECK(markup::serialize_answer(answer) == "A [1][2].");
}

TEST_CASE("serialize of empty answer is empty") {
    CHECK(markup::serialize_answer({}).empty());
}

TEST_CASE("round trip reproduces the statement list") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
        const auto answer = random_answer(rng);
        const auto parsed = markup::parse_answer(markup::serialize_answer(answer));
        CHECK(parsed.answer == answer);
        CHECK(parsed.warnings.empty());
    }
}

TEST_CASE("refine propagates the nearest following citation set") {
    AttributedAnswer answer;
    answer.statements = {{"S one.", {}}, {"S two.", {3}}, {"S three.", {}}};
    const auto refined = markup::refine_citations(answer);
    REQUIRE(refined.statements.size() == 3);
    CHECK(refined.statements[0].citations == std::vector<int>{3});
    CHECK(refined.statements[1].citations == std::vector<int>{3});
    CHECK(refined.statements[2].citations.empty());
}

TEST_CASE("refine keeps fully cited answers unchanged") {
    AttributedAnswer answer;
    answer.statements = {{"A.", {1}}, {"B.", {2}}};
    CHECK(markup::refine_citations(answer) == answer);
}

TEST_CASE("refine is idempotent and preserves texts") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 200; ++i) {
        const auto answer = random_answer(rng);
        const auto once = markup::refine_citations(answer);
        CHECK(markup::refine_citations(once) == once);
        REQUIRE(once.statements.size() == answer.statements.size());
        for (std::size_t s = 0; s < once.statements.size(); ++s) {
            CHECK(once.statements[s].text == answer.statements[s].text);
        }
    }
}

TEST_CASE("after refinement a statement is uncited iff nothing at or after it was cited") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 200; ++i) {
        const auto answer = random_answer(rng);
        const auto refined = markup::refine_citations(answer);
        for (std::size_t s = 0; s < refined.statements.size(); ++s) {
            bool later_cited = false;
            for (std::size_t t = s; t < answer.statements.size(); ++t) {
                later_cited = later_cited || !answer.statements[t].citations.empty();
            }
            CHECK(refined.statements[s].citations.empty() == !later_cited);
        }
    }
}

}  // TEST_SUITE
