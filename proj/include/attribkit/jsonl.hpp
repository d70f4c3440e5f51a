#pragma once

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace attribkit::jsonl {

/// Malformed input (unreadable file, bad JSON line, schema violation).
/// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads a JSONL file, calling fn(line_number, parsed) per line.
/// Line numbers are 1-based. Blank lines are skipped. A line that fails
/// to parse raises InputError naming the line.
void for_each_record(const std::filesystem::path& path,
                     const std::function<void(int, const nlohmann::json&)>& fn);

std::vector<nlohmann::json> read_all(const std::filesystem::path& path);

/// Writes one compact JSON document per line.
void write_all(const std::filesystem::path& path, const std::vector<nlohmann::json>& records);

/// Raw lines joined with '\n' (no trailing newline handling beyond the
/// file's own). Used for byte-identity checks.
std::string read_file(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace attribkit::jsonl
