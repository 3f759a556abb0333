#ifndef SPINBUS_EXPERIMENTS_HPP
#define SPINBUS_EXPERIMENTS_HPP

// Batch front end: strict-schema config ingestion, named experiments, sweep
// execution and file outputs. Everything below is deterministic for a fixed
// (config, seed) pair; sweep cells run concurrently and merge in order.

#include <cstdint>
#include <filesystem>
#include <string>

namespace spinbus {

enum class RunStatus : int {
    Ok = 0,
    SchemaError = 2,
    NumericalError = 3,
    BoundaryWarning = 4,
};

struct RunResult {
    RunStatus status = RunStatus::Ok;
    std::string summary_json;   // experiment summary (or error JSON on failure)
    std::string error;          // empty on success
    bool boundary_warning = false;
};

// Executes the named experiment (or the sweep, when the config carries sweep
// axes). Writes resolved_config.json, summary.json, data.csv (when the
// experiment produces tabular data) and manifest.json into out_dir; the
// manifest is written last, atomically. `strict` escalates boundary-optimum
// warnings to status BoundaryWarning.
RunResult run_config(const std::string& config_json, const std::filesystem::path& out_dir,
                     bool strict = false, int threads = 0);

// Schema check only; returns SchemaError with a message on violation.
RunResult validate_config(const std::string& config_json);

std::string tool_version();

} // namespace spinbus

#endif
