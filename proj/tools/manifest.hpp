#pragma once

#include "settings.hpp"

#include <string>
#include <vector>

namespace pdcli {

/// Hex SHA-256 of a file's bytes. ConfigError if it cannot be read.
std::string sha256_file(const std::string& path);

struct InputRecord {
    std::string role;
    std::string path;
    std::string sha256;
};

/// Recorded once per output directory; carries what is needed to replay.
class Manifest {
public:
    Manifest(std::string command, const Settings& settings);

    void add_input(const std::string& role, const std::string& path);
    void add_output(const std::string& name) { outputs_.push_back(name); }
    /// Writes manifest.json into `dir`, stamping the finish time.
    void write(const std::string& dir, int exit_code);

private:
    std::string command_;
    nlohmann::ordered_json config_;
    std::uint64_t seed_;
    std::string started_;
    std::vector<InputRecord> inputs_;
    std::vector<std::string> outputs_;
};

/// When `j` is a manifest, re-hashes its inputs and throws ConfigError on any
/// digest that no longer matches. Plain config files pass through.
void check_manifest_inputs(const nlohmann::json& j, const std::string& command);

std::string utc_now();

extern const char* const kVersion;

}  // namespace pdcli
