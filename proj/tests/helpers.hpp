#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "ssc/panel.hpp"

// Shared plumbing for the test binaries: locating bundled fixtures and the
// command-line tool, scratch directories, and small panel builders.

namespace testutil {

inline std::string from_env_or(const char* name, const char* fallback) {
    if (const char* value = std::getenv(name)) {
        if (*value != '\0') return value;
    }
    return fallback;
}

inline std::string data_dir() { return from_env_or("SSC_DATA", SSC_DATA_DIR); }
inline std::string config_dir() { return from_env_or("SSC_CONFIGS", SSC_CONFIG_DIR); }
inline std::string cli_path() { return from_env_or("SSC_CLI", SSC_CLI_PATH); }

inline std::string data_file(const std::string& name) {
    return (std::filesystem::path(data_dir()) / name).string();
}

inline std::string config_file(const std::string& name) {
    return (std::filesystem::path(config_dir()) / name).string();
}

/// Fresh scratch directory under the system temp root.
inline std::string scratch_dir(const std::string& tag) {
    static std::mt19937_64 gen{std::random_device{}()};
    auto root = std::filesystem::temp_directory_path();
    std::filesystem::path dir;
    do {
        dir = root / ("ssc_test_" + tag + "_" + std::to_string(gen()));
    } while (std::filesystem::exists(dir));
    std::filesystem::create_directories(dir);
    return dir.string();
}

/// Runs the CLI with the given argument string; returns the process exit
/// code (128+signal if it died on one). Output is silenced.
inline int run_cli(const std::string& args) {
    std::string command = cli_path() + " " + args + " >/dev/null 2>&1";
    int status = std::system(command.c_str());
    if (status < 0) return -1;
#ifdef WEXITSTATUS
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
    return status;
#else
    return status;
#endif
}

/// In-memory record list for a tiny two-unit panel; tests mutate the rows
/// to provoke specific validation failures.
inline std::vector<ssc::RawRecord> two_unit_records() {
    std::vector<ssc::RawRecord> records;
    const char* periods[] = {"1", "2", "3", "4"};
    double ya[] = {1.0, 1.5, 2.0, 2.5};
    double yb[] = {0.5, 0.75, 1.0, 1.25};
    for (int t = 0; t < 4; ++t) {
        records.push_back({"A", periods[t], ya[t], t >= 3});
    }
    for (int t = 0; t < 4; ++t) {
        records.push_back({"B", periods[t], yb[t], 0});
    }
    return records;
}

}  // namespace testutil
