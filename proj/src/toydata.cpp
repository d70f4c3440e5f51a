#include "attribkit/toydata.hpp"

#include <fstream>

#include "attribkit/jsonl.hpp"
#include "attribkit/markup.hpp"
#include "attribkit/text.hpp"

namespace attribkit::toydata {

namespace {

struct RawDoc {
    const char* title;
    const char* body;
};

const RawDoc kDocs[] = {
    {"Mercury",
     "Mercury is the smallest planet in the solar system and orbits closest to the sun. A year "
     "on Mercury lasts only 88 days."},
    {"Venus",
     "Venus is the hottest planet in the solar system with surface temperatures near 460 "
     "degrees. Thick clouds of sulfuric acid cover Venus at all times."},
    {"Mars",
     "Mars is called the red planet because iron oxide dust covers its surface. Olympus Mons on "
     "Mars is the tallest volcano in the solar system."},
    {"Jupiter",
     "Jupiter is the largest planet in the solar system with more mass than all other planets "
     "combined. The Great Red Spot on Jupiter is a storm older than 300 years."},
    {"Saturn",
     "Saturn is famous for its bright rings made of ice and rock. Saturn has 83 confirmed moons "
     "including the giant moon Titan."},
    {"Nile",
     "The Nile is the longest river in Africa and flows north into the Mediterranean Sea. "
     "Ancient Egypt depended on the Nile for water and fertile soil."},
    {"Amazon River",
     "The Amazon carries more water than any other river on Earth. The Amazon basin holds the "
     "largest rainforest in the world."},
    {"Danube",
     "The Danube flows through ten countries which is more than any other river. The Danube "
     "rises in the Black Forest of Germany and ends in the Black Sea."},
    {"Yangtze",
     "The Yangtze is the longest river in Asia and crosses China from west to east. The Three "
     "Gorges Dam on the Yangtze is the largest power station in the world."},
    {"Mississippi",
     "The Mississippi drains 31 states of the United States into the Gulf of Mexico. Steamboats "
     "on the Mississippi carried cotton and grain in the 1800s."},
    {"Johann Sebastian Bach",
     "Johann Sebastian Bach was born in Eisenach in 1685 and wrote more than 1000 works. Bach "
     "served as cantor of the Thomas Church in Leipzig for 27 years."},
    {"Wolfgang Amadeus Mozart",
     "Wolfgang Amadeus Mozart composed his first symphony at the age of eight. Mozart was born "
     "in Salzburg in 1756 and died in Vienna in 1791."},
    {"Ludwig van Beethoven",
     "Ludwig van Beethoven continued composing after losing his hearing completely. Beethoven "
     "premiered his Ninth Symphony in Vienna in 1824."},
    {"Frederic Chopin",
     "Frederic Chopin wrote almost exclusively for the piano and was born near Warsaw in 1810. "
     "Chopin left Poland at the age of 20 and settled in Paris."},
    {"Johannes Brahms",
     "Johannes Brahms was born in Hamburg in 1833 and spent his later career in Vienna. Brahms "
     "worked on his First Symphony for more than 14 years."},
    {"Mount Everest",
     "Mount Everest is the highest mountain on Earth at 8849 meters above sea level. Edmund "
     "Hillary and Tenzing Norgay reached the summit of Everest in 1953."},
    {"Kilimanjaro",
     "Kilimanjaro is the highest mountain in Africa and a dormant volcano in Tanzania. The snow "
     "cap of Kilimanjaro has shrunk by more than 80 percent since 1912."},
    {"Denali",
     "Denali in Alaska is the highest mountain in North America at 6190 meters. The name Denali "
     "means the tall one in the Koyukon language."},
    {"Aconcagua",
     "Aconcagua in Argentina is the highest mountain in South America. Climbers reach the "
     "summit of Aconcagua without ropes because the normal route is a walk up."},
    {"Mount Elbrus",
     "Mount Elbrus in Russia is the highest peak in Europe at 5642 meters. Elbrus is a dormant "
     "volcano with two summits of nearly equal height."},
    {"Telephone",
     "The telephone was invented by Alexander Graham Bell in 1876. Bell made the first "
     "successful telephone call to his assistant Thomas Watson in Boston."},
    {"Phonograph",
     "Thomas Edison invented the phonograph in 1877 at his Menlo Park laboratory. The first "
     "phonograph recorded sound on a sheet of tin foil wrapped around a cylinder."},
    {"Telegraph",
     "Samuel Morse demonstrated the electric telegraph in 1844 with a message from Washington "
     "to Baltimore. The telegraph used a code of dots and dashes named after Morse."},
    {"Radio",
     "Guglielmo Marconi sent the first radio signal across the Atlantic Ocean in 1901. Marconi "
     "shared the Nobel Prize in Physics in 1909 for his work on wireless telegraphy."},
    {"Television",
     "Philo Farnsworth transmitted the first electronic television image in 1927 in San "
     "Francisco. Farnsworth conceived the scanning principle while studying a potato field as a "
     "teenager."},
    {"Cheetah",
     "The cheetah is the fastest land animal and can reach speeds of 112 kilometers per hour. A "
     "cheetah accelerates faster than most sports cars but tires after 30 seconds."},
    {"Blue Whale",
     "The blue whale is the largest animal that has ever lived and can weigh 180 tonnes. A blue "
     "whale calf drinks around 400 liters of milk every day."},
    {"Albatross",
     "The wandering albatross has the largest wingspan of any bird at 350 centimeters. An "
     "albatross can glide for hours without flapping its wings."},
    {"Octopus",
     "An octopus has three hearts and blue blood based on copper. The giant Pacific octopus can "
     "change color in less than a second."},
    {"Peregrine Falcon",
     "The peregrine falcon is the fastest animal on Earth reaching 389 kilometers per hour in a "
     "dive. Peregrine falcons nest on tall buildings in many large cities."},
    {"Tokyo",
     "Tokyo is the largest metropolitan area in the world with about 37 million people. Tokyo "
     "was known as Edo before 1868 when it became the capital of Japan."},
    {"Paris",
     "Paris is the capital of France and lies on the Seine river. The Eiffel Tower in Paris was "
     "completed in 1889 for the World Fair."},
    {"Cairo",
     "Cairo is the largest city in Africa and stands near the pyramids of Giza. The old center "
     "of Cairo dates back more than 1000 years."},
    {"Sydney",
     "Sydney is the largest city in Australia and surrounds one of the finest natural harbours "
     "in the world. The Sydney Opera House opened in 1973 after 14 years of construction."},
    {"Toronto",
     "Toronto is the largest city in Canada and sits on the northern shore of Lake Ontario. "
     "More than half of the residents of Toronto were born outside Canada."},
    {"Bamboo",
     "Bamboo is the fastest growing plant on Earth and some species grow 91 centimeters in a "
     "day. Bamboo is a grass rather than a tree despite its woody stem."},
    {"Giant Sequoia",
     "The giant sequoia is the most massive tree on Earth and can live more than 3000 years. "
     "The General Sherman sequoia in California is the largest known living tree."},
    {"Baobab",
     "The baobab tree stores up to 120000 liters of water in its swollen trunk. Baobab trees in "
     "Africa can live for more than 2000 years."},
    {"Saguaro",
     "The saguaro cactus of the Sonoran Desert can grow taller than 12 meters. A saguaro grows "
     "its first arm only after about 75 years."},
    {"Mangrove",
     "Mangrove trees grow in salt water along tropical coasts. Mangrove roots shelter young "
     "fish and protect shores from storms."},
    {"Ferdinand Magellan",
     "Ferdinand Magellan led the first expedition to sail around the world starting in 1519. "
     "Magellan was killed in the Philippines before his ship Victoria completed the voyage in "
     "1522."},
    {"James Cook",
     "James Cook mapped the coast of New Zealand and eastern Australia on his first voyage from "
     "1768 to 1771. Cook crossed the Antarctic Circle three times on his second voyage."},
    {"Roald Amundsen",
     "Roald Amundsen reached the South Pole first in December 1911. Amundsen beat the British "
     "team of Robert Scott by 34 days."},
    {"Ernest Shackleton",
     "Ernest Shackleton led the Endurance expedition to Antarctica in 1914. After the Endurance "
     "sank Shackleton brought every member of his crew home alive."},
    {"Francis Drake",
     "Francis Drake completed the second circumnavigation of the world in 1580. Drake returned "
     "to England aboard the Golden Hind with a cargo of Spanish treasure."},
    {"ENIAC",
     "ENIAC was completed in 1945 at the University of Pennsylvania and weighed 27 tonnes. "
     "ENIAC used 17468 vacuum tubes and filled a large room."},
    {"Colossus",
     "Colossus was built in 1943 at Bletchley Park to break German ciphers. Colossus is "
     "regarded as the first programmable electronic digital computer."},
    {"Analytical Engine",
     "Charles Babbage designed the Analytical Engine in 1837 as a general purpose mechanical "
     "computer. Ada Lovelace wrote the first published program for the Analytical Engine."},
    {"UNIVAC",
     "UNIVAC was the first commercial computer produced in the United States and appeared in "
     "1951. UNIVAC correctly predicted the 1952 presidential election from early returns."},
    {"Z3",
     "Konrad Zuse finished the Z3 in Berlin in 1941 as the first working programmable computer. "
     "The Z3 used 2600 telephone relays and read programs from punched film."},
};

const char* kQueries[] = {
    "which planet is the largest in the solar system",
    "why is Mars called the red planet",
    "which river is the longest river in Africa",
    "which river carries more water than any other river",
    "where was Johann Sebastian Bach born",
    "when did Beethoven premiere his Ninth Symphony",
    "what is the highest mountain on Earth",
    "which mountain is the highest peak in Europe",
    "when was the telephone invented by Alexander Graham Bell",
    "who invented the phonograph in 1877",
    "what is the fastest land animal",
    "what is the largest animal that has ever lived",
    "which city is the largest metropolitan area in the world",
    "when was the Eiffel Tower in Paris completed",
    "what is the fastest growing plant on Earth",
    "how much water does the baobab tree store in its trunk",
    "who led the first expedition to sail around the world",
    "who reached the South Pole first",
    "when was ENIAC completed and how much did it weigh",
    "who designed the Analytical Engine as a mechanical computer",
};

std::string doc_id(std::size_t i) {
    std::string id = "d";
    if (i < 10) id += "0";
    id += std::to_string(i);
    return id;
}

std::string first_sentence(const corpus::Document& doc) {
    return markup::segment_statements(doc.text).front();
}

std::string second_sentence(const corpus::Document& doc) {
    auto segments = markup::segment_statements(doc.text);
    return segments.size() > 1 ? segments[1] : segments.front();
}

}  // namespace

corpus::Corpus toy_corpus() {
    corpus::Corpus corpus;
    for (std::size_t i = 0; i < std::size(kDocs); ++i) {
        corpus.add({doc_id(i), kDocs[i].title, kDocs[i].body});
    }
    return corpus;
}

std::vector<synth::Query> toy_queries() {
    std::vector<synth::Query> queries;
    for (std::size_t i = 0; i < std::size(kQueries); ++i) {
        std::string qid = "q";
        if (i < 10) qid += "0";
        qid += std::to_string(i);
        queries.push_back({qid, kQueries[i]});
    }
    return queries;
}

std::vector<std::string> toy_posttrain_lines() {
    const auto corpus = toy_corpus();
    auto doc_json = [&](std::size_t i) { return corpus::document_to_json(corpus.at(i)); };

    std::vector<std::string> lines;
    const auto queries = toy_queries();
    // clean records built from aligned corpus documents
    const std::size_t clean_doc[8] = {3, 2, 5, 6, 10, 12, 15, 20};
    for (std::size_t r = 0; r < 8; ++r) {
        const std::size_t a = clean_doc[r];
        const std::size_t b = (a + 1) % std::size(kDocs);
        nlohmann::json record = {
            {"question", queries[r].query},
            {"docs", nlohmann::json::array({doc_json(a), doc_json(b)})},
            {"answer", first_sentence(corpus.at(a)).substr(0, first_sentence(corpus.at(a)).size() - 1) +
                           " [1]. " + second_sentence(corpus.at(b)).substr(0, second_sentence(corpus.at(b)).size() - 1) +
                           " [2]."}};
        lines.push_back(record.dump());
    }
    // empty reference
    lines.push_back(nlohmann::json{
        {"question", "what does the empty source say"},
        {"docs", nlohmann::json::array({{{"id", "e1"}, {"title", "Empty"}, {"text", ""}}})},
        {"answer", "This claim cites nothing real [1]."}}.dump());
    // literal "None" reference
    lines.push_back(nlohmann::json{
        {"question", "what does the missing source say"},
        {"docs", nlohmann::json::array({{{"id", "n1"}, {"title", "Missing"}, {"text", "None"}}})},
        {"answer", "This claim cites a placeholder [1]."}}.dump());
    // duplicate context under distinct ids
    lines.push_back(nlohmann::json{
        {"question", "which source is the original"},
        {"docs", nlohmann::json::array(
                     {{{"id", "dupA"}, {"title", "Copy one"}, {"text", "The same passage twice."}},
                      {{"id", "dupB"}, {"title", "Copy two"}, {"text", "The same passage twice."}}})},
        {"answer", "Both copies say the same thing [1]."}}.dump());
    // no reference documents at all
    lines.push_back(nlohmann::json{{"question", "what supports this"},
                                   {"docs", nlohmann::json::array()},
                                   {"answer", "Nothing supports this claim."}}.dump());
    // kept, but needs bracket and supported-label normalization
    lines.push_back(nlohmann::json{
        {"question", queries[8].query},
        {"docs", nlohmann::json::array({doc_json(20), doc_json(21)})},
        {"supported", "yes"},
        {"answer", "The telephone was invented by Alexander Graham Bell in 1876 [1, 2]."}}.dump());
    return lines;
}

std::vector<metrics::EvalExample> toy_eval_examples() {
    const auto corpus = toy_corpus();
    std::vector<metrics::EvalExample> examples;
    for (std::size_t i = 0; i < 20; ++i) {
        const std::size_t a = (i * 2) % std::size(kDocs);
        const std::size_t b = (a + 1) % std::size(kDocs);
        const std::size_t c = (a + 7) % std::size(kDocs);
        metrics::EvalExample ex;
        ex.question = kQueries[i % std::size(kQueries)];
        ex.docs = {corpus.at(a), corpus.at(b), corpus.at(c)};

        const std::string s1 = first_sentence(corpus.at(a));
        const std::string s2 = first_sentence(corpus.at(b));
        markup::AttributedAnswer answer;
        if (i % 5 == 0) {
            answer.statements.push_back({s1, {1, 3}});  // padded citation
        } else {
            answer.statements.push_back({s1, {1}});
        }
        if (i % 4 == 0) {
            answer.statements.push_back({s2, {}});  // uncited statement
        } else if (i % 3 == 0) {
            // ungrounded: second half borrowed from the unrelated document
            const std::string s3 = first_sentence(corpus.at(c));
            answer.statements.push_back(
                {s2.substr(0, s2.size() / 2) + " " + s3.substr(s3.size() / 2), {2}});
        } else {
            answer.statements.push_back({s2, {2}});
        }
        ex.answer = markup::serialize_answer(answer);

        if (i % 2 == 0) {
            // gold aliases: the first title word matches, a second group misses
            ex.gold_short_answers = {{corpus.at(a).title},
                                     {"completely absent phrase " + std::to_string(i)}};
        } else {
            ex.claims = {s1, "An unrelated claim about nothing in particular."};
        }
        examples.push_back(std::move(ex));
    }
    return examples;
}

nlohmann::json eval_example_to_json(const metrics::EvalExample& example) {
    nlohmann::json docs = nlohmann::json::array();
    for (const auto& d : example.docs) docs.push_back(corpus::document_to_json(d));
    nlohmann::json j = {{"question", example.question}, {"docs", docs}, {"answer", example.answer}};
    if (example.gold_short_answers.has_value()) j["gold_short_answers"] = *example.gold_short_answers;
    if (example.claims.has_value()) j["claims"] = *example.claims;
    return j;
}

void write_fixtures(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::vector<nlohmann::json> records;
        for (const auto& d : toy_corpus().documents()) records.push_back(corpus::document_to_json(d));
        jsonl::write_all(dir / "corpus_toy.jsonl", records);
    }
    {
        std::vector<nlohmann::json> records;
        for (const auto& q : toy_queries()) {
            records.push_back({{"qid", q.qid}, {"query", q.query}});
        }
        jsonl::write_all(dir / "queries_toy.jsonl", records);
    }
    {
        std::string raw;
        for (const auto& line : toy_posttrain_lines()) raw += line + "\n";
        jsonl::write_file(dir / "posttrain_raw.jsonl", raw);
    }
    {
        std::vector<nlohmann::json> records;
        for (const auto& ex : toy_eval_examples()) records.push_back(eval_example_to_json(ex));
        jsonl::write_all(dir / "eval_toy.jsonl", records);
    }
}

}  // namespace attribkit::toydata
