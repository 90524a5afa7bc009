#pragma once

// Command-line front end: experiment configs, run records, JSON/CSV output
// and subcommand dispatch.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace potts {

using Json = nlohmann::json;

enum class OutputFormat { Json, Csv };

const char* to_string(OutputFormat f);
OutputFormat parse_format(const std::string& s);

inline constexpr const char* kSchemaVersion = "potts-run/1";

/// Compiler and source revision baked in at configure time.
const char* build_id();

struct ExperimentConfig {
    std::string command;
    Json params;  ///< every parameter of the command, defaults filled in
    std::uint64_t master_seed = 1;
    std::string output_path;  ///< empty: standard output
    OutputFormat format = OutputFormat::Json;
    int threads = 1;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

Json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const Json& j);

struct RunRecord {
    ExperimentConfig config;
    std::string build;
    std::string started_at;   ///< ISO 8601 UTC
    std::string finished_at;
    double runtime_ms = 0;  ///< wall clock; kept out of `result` so payloads compare equal across runs
    std::vector<std::uint64_t> replica_seeds;
    /// Command payload. Tabular commands put {"columns": [...], "rows": [[...]]}
    /// under "table", which is what CSV output writes.
    Json result;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

Json to_json(const RunRecord& r);
RunRecord record_from_json(const Json& j);

/// Runs a configured experiment. Throws potts::Error on domain errors.
RunRecord run_experiment(const ExperimentConfig& config);

/// JSON: the whole record. CSV: the result table with a header row and
/// 17 significant digits; the record itself goes to a "<path>.json" sidecar
/// when writing to a file.
void emit_results(const RunRecord& record, std::ostream& out);
void emit_results(const RunRecord& record);

/// CSV body only (header plus rows), exposed for tests.
void write_csv_table(const Json& table, std::ostream& out);

/// Parses argv, runs the command and writes its output. Returns 0 on success,
/// 1 on a domain error and 2 on a usage error.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// The quick example suite behind `potts selftest`; prints one line per check.
bool run_selftest(std::ostream& out);

}  // namespace potts
