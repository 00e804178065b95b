#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "piecevec/errors.hpp"
#include "piecevec/util/digest.hpp"
#include "piecevec/version.hpp"

namespace piecevec {

// Run manifest: a stage's full config plus content digests of everything it
// read and wrote. A rerun re-executes the recorded config after checking
// the input digests still match, which makes deterministic stages
// reproducible byte-for-byte. Deliberately no timestamps or host info: the
// manifest itself has to come out byte-identical on a rerun.
struct Manifest {
    std::string subcommand;
    nlohmann::json config;
    nlohmann::json inputs = nlohmann::json::array();   // {path, fnv1a64, bytes}
    nlohmann::json outputs = nlohmann::json::array();
};

inline nlohmann::json file_digest_entry(const std::string& path) {
    return {{"path", path},
            {"fnv1a64", digest_hex(fnv1a64_file(path))},
            {"bytes", std::filesystem::file_size(path)}};
}

inline std::string manifest_path_for(const std::string& output_path) {
    return output_path + ".manifest.json";
}

inline void write_manifest(const std::string& path, const Manifest& m) {
    nlohmann::json j{{"format", "piecevec-manifest"},
                     {"version", 1},
                     {"tool", {{"name", "piecevec"}, {"version", kVersion}}},
                     {"subcommand", m.subcommand},
                     {"config", m.config},
                     {"inputs", m.inputs},
                     {"outputs", m.outputs}};
    std::ofstream out(path);
    if (!out) throw ManifestError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

inline Manifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(path + ": not a manifest: " + e.what());
    }
    if (j.value("format", std::string()) != "piecevec-manifest" || j.value("version", 0) != 1)
        throw ManifestError(path + ": not a version-1 manifest");
    Manifest m;
    try {
        m.subcommand = j.at("subcommand").get<std::string>();
        m.config = j.at("config");
        m.inputs = j.value("inputs", nlohmann::json::array());
        m.outputs = j.value("outputs", nlohmann::json::array());
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(path + ": " + e.what());
    }
    return m;
}

// Fails loudly when any recorded input's content changed since the manifest
// was written, so a rerun cannot silently produce different outputs.
inline void verify_manifest_inputs(const Manifest& m) {
    for (const auto& e : m.inputs) {
        const std::string p = e.at("path").get<std::string>();
        if (digest_hex(fnv1a64_file(p)) != e.at("fnv1a64").get<std::string>())
            throw ManifestError("input changed since the manifest was written: " + p);
    }
}

}  // namespace piecevec
