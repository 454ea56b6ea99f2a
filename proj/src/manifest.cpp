#include "gmvp/manifest.hpp"

#include <ctime>
#include <fstream>

#include "gmvp/errors.hpp"
#include "json.hpp"

namespace gmvp {

std::string iso8601_utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json doc;
    doc["command"] = command;
    nlohmann::ordered_json cfg;
    for (const auto& [key, value] : config) cfg[key] = value;
    doc["config"] = cfg;
    doc["master_seed"] = master_seed;
    doc["artifact_version"] = artifact_version;
    doc["timestamp"] = timestamp;
    return doc.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << to_json();
}

}  // namespace gmvp
