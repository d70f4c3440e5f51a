#include "attribkit/jsonl.hpp"

#include <fstream>
#include <sstream>

namespace attribkit::jsonl {

void for_each_record(const std::filesystem::path& path,
                     const std::function<void(int, const nlohmann::json&)>& fn) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_discarded()) {
            throw InputError(path.string() + ":" + std::to_string(line_number) +
                             ": malformed JSON line");
        }
        fn(line_number, record);
    }
}

std::vector<nlohmann::json> read_all(const std::filesystem::path& path) {
    std::vector<nlohmann::json> records;
    for_each_record(path, [&](int, const nlohmann::json& r) { records.push_back(r); });
    return records;
}

void write_all(const std::filesystem::path& path, const std::vector<nlohmann::json>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& r : records) out << r.dump() << '\n';
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << contents;
}

}  // namespace attribkit::jsonl
