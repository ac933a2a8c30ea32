#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace fermat::cli {

std::string sha256_file(const std::filesystem::path& path);

// Fresh run directory <root>/<kind>-<UTC timestamp>[-k]; never reuses an existing directory.
std::filesystem::path make_run_dir(const std::filesystem::path& root, const std::string& kind);

class RunRecord {
public:
    explicit RunRecord(std::filesystem::path dir) : dir_(std::move(dir)) {}

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path file(const std::string& name);  // registers and returns dir/name
    void write_json(const std::string& name, const nlohmann::json& value);

    // manifest.json: kind, params, files with sha256 and size, wall time
    nlohmann::json write_manifest(const std::string& kind, const nlohmann::json& params, double wall_seconds) const;

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

// manifest without its wall-clock entry, for reproducibility comparisons
nlohmann::json manifest_signature(const nlohmann::json& manifest);

}  // namespace fermat::cli
