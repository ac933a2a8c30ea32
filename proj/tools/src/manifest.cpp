#include "manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace fermat::cli {

namespace fs = std::filesystem;

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md;
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

fs::path make_run_dir(const fs::path& root, const std::string& kind) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream stamp;
    stamp << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
    fs::create_directories(root);
    const std::string base = kind + "-" + stamp.str();
    for (int k = 0;; ++k) {
        const fs::path dir = root / (k == 0 ? base : base + "-" + std::to_string(k));
        if (fs::create_directory(dir)) return dir;
    }
}

fs::path RunRecord::file(const std::string& name) {
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
    return dir_ / name;
}

void RunRecord::write_json(const std::string& name, const nlohmann::json& value) {
    std::ofstream out(file(name));
    out << value.dump(2) << '\n';
}

nlohmann::json RunRecord::write_manifest(const std::string& kind, const nlohmann::json& params,
                                         double wall_seconds) const {
    std::vector<std::string> names = files_;
    std::sort(names.begin(), names.end());
    nlohmann::json files = nlohmann::json::array();
    for (const std::string& n : names) {
        const fs::path p = dir_ / n;
        files.push_back({{"name", n}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p)}});
    }
    nlohmann::json m = {{"kind", kind}, {"params", params}, {"files", files}, {"wall_time_s", wall_seconds}};
    std::ofstream out(dir_ / "manifest.json");
    out << m.dump(2) << '\n';
    return m;
}

nlohmann::json manifest_signature(const nlohmann::json& manifest) {
    nlohmann::json m = manifest;
    m.erase("wall_time_s");
    return m;
}

}  // namespace fermat::cli
