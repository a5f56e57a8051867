#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace opo::cli {

using Json = nlohmann::json;

constexpr const char* kToolName = "opo-sim";
constexpr const char* kToolVersion = "1.0.0";

enum ExitCode { kOk = 0, kValidationFailed = 1, kSchemaError = 2, kNumericError = 3, kIoError = 4 };

// Schema violation; path names the offending field ("config.sigma", "--omega").
class config_error : public std::runtime_error {
public:
    config_error(const std::string& path, const std::string& msg)
        : std::runtime_error(path + ": " + msg), path(path) {}
    std::string path;
};

enum class KeyType { Number, Integer, String, Bool, NumberOrInf };

const std::vector<std::string>& commands();
// Keys accepted by a command (config file keys and --flags share names).
const std::map<std::string, KeyType>& command_keys(const std::string& command);

// Typed value of one key from its textual flag form.
Json coerce(const std::string& command, const std::string& key, const std::string& text,
            const std::string& path);

// Parses a flat JSON object (or a previous output document with a "config"
// member) and checks every key against the schema of the command.
Json parse_config_text(const std::string& text, const std::string& command);

// FNV-1a 64-bit hash of the canonical dump (sorted keys) as 16 hex digits.
std::uint64_t fnv1a64(const std::string& s);
std::string config_hash(const Json& config);

// "a:b:step" (inclusive), "a,b,c" or a single value.
std::vector<double> parse_grid(const std::string& s);

// 17 significant digits; inf and nan spelled out.
std::string format_double(double x);

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    // Scalar results reported alongside the table (stable key order).
    std::vector<std::pair<std::string, Cell>> summary;
};

// CSV: comment lines with tool, config echo, hash and summary, then a single
// header row. JSON: one object with keys tool, version, config, config_hash,
// summary, columns, rows.
std::string emit(const Table& t, const Json& config, const std::string& format);

// Executes one command. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace opo::cli
