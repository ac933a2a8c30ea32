#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fermat/medium.hpp"

namespace fermat::cli {

using json = nlohmann::json;

// Scenario problems (parse, schema, values); the CLI exits with status 2.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parses the supported TOML subset into a JSON tree. `lines` receives "a.b.c" -> line of definition.
json parse_toml(const std::string& text, const std::string& name, std::map<std::string, int>* lines);

size_t edit_distance(const std::string& a, const std::string& b);

class Scenario {
public:
    static Scenario load(const std::string& path);
    static Scenario from_text(const std::string& text, const std::string& name, bool is_json);

    const json& root() const { return root_; }
    const std::string& name() const { return name_; }

    // rejects keys not present in `schema` (dotted paths; "a.*" admits any key below a)
    void validate(const std::set<std::string>& schema) const;

    bool has(const std::string& path) const;
    double number(const std::string& path) const;
    double number(const std::string& path, double fallback) const;
    long integer(const std::string& path) const;
    long integer(const std::string& path, long fallback) const;
    bool boolean(const std::string& path, bool fallback) const;
    std::string string(const std::string& path) const;
    std::string string(const std::string& path, const std::string& fallback) const;
    Vec3 vec(const std::string& path) const;
    Vec3 vec(const std::string& path, const Vec3& fallback) const;
    std::vector<double> numbers(const std::string& path) const;
    std::vector<Vec3> vecs(const std::string& path) const;

    // "<name>:<line>: " for a key, or "<name>: " when the line is unknown
    std::string where(const std::string& path) const;
    [[noreturn]] void fail(const std::string& path, const std::string& message) const;

private:
    const json* find(const std::string& path) const;
    const json& require(const std::string& path) const;

    json root_;
    std::string name_;
    std::map<std::string, int> lines_;
};

}  // namespace fermat::cli
