#ifndef PANELSOM_MANIFEST_HPP
#define PANELSOM_MANIFEST_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "panelsom/errors.hpp"

namespace panelsom {

inline constexpr const char* kToolVersion = "panelsom 0.1.0";

// FNV-1a, 64 bit. Content identity for the run manifest, not cryptography.
inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string digest_hex(const std::string& data) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Reproducibility record written next to every subcommand's outputs:
/// the exact configuration plus digests of all inputs and outputs.
struct RunManifest {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    std::map<std::string, std::string> input_digests;   // path -> digest
    std::map<std::string, std::string> output_digests;  // filename -> digest

    void add_input_file(const std::string& path) { input_digests[path] = digest_hex(read_file(path)); }
    void add_output(const std::string& name, const std::string& content) {
        output_digests[name] = digest_hex(content);
    }

    nlohmann::json to_json() const {
        return {{"tool", kToolVersion},
                {"command", command},
                {"parameters", parameters},
                {"inputs", input_digests},
                {"outputs", output_digests}};
    }
};

} // namespace panelsom

#endif
