#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace gmvp {

// Provenance sidecar written next to every batch output. Re-running the
// recorded command with the recorded config and seed reproduces the outputs
// byte-identically; the timestamp is informational only.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config;  // canonical (sorted) key-values
    std::uint64_t master_seed = 0;
    std::string artifact_version;
    std::string timestamp;  // ISO-8601, UTC

    std::string to_json() const;
    void write(const std::string& path) const;
};

std::string iso8601_utc_now();

}  // namespace gmvp
