#include "scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace fermat::cli {

namespace {

class TomlParser {
public:
    TomlParser(const std::string& text, std::string name, std::map<std::string, int>* lines)
        : s_(text), name_(std::move(name)), lines_(lines) {}

    json parse() {
        json root = json::object();
        json* table = &root;
        std::string prefix;
        while (true) {
            skip_blank_lines();
            if (eof()) break;
            if (peek() == '[') {
                ++pos_;
                if (!eof() && peek() == '[') error("arrays of tables ([[...]]) are not supported; use an inline array");
                skip_ws();
                std::vector<std::string> path = parse_key();
                skip_ws();
                expect(']');
                end_of_line();
                prefix = join(path);
                if (!defined_tables_.insert(prefix).second) error("table [" + prefix + "] defined twice");
                table = &root;
                for (const std::string& part : path) {
                    json& next = (*table)[part];
                    if (next.is_null()) next = json::object();
                    if (!next.is_object()) error("'" + part + "' is already a value, not a table");
                    table = &next;
                }
                record(prefix);
                continue;
            }
            const int key_line = line_;
            std::vector<std::string> path = parse_key();
            skip_ws();
            expect('=');
            skip_ws();
            json value = parse_value(prefix.empty() ? join(path) : prefix + "." + join(path));
            end_of_line();
            json* target = table;
            for (size_t i = 0; i + 1 < path.size(); ++i) {
                json& next = (*target)[path[i]];
                if (next.is_null()) next = json::object();
                if (!next.is_object()) error("'" + path[i] + "' is already a value, not a table");
                target = &next;
            }
            if (target->contains(path.back())) {
                line_ = key_line;
                error("duplicate key '" + path.back() + "'");
            }
            (*target)[path.back()] = std::move(value);
            const std::string full = prefix.empty() ? join(path) : prefix + "." + join(path);
            if (lines_ && !lines_->count(full)) (*lines_)[full] = key_line;
        }
        return root;
    }

private:
    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }

    [[noreturn]] void error(const std::string& msg) const {
        throw ScenarioError(name_ + ":" + std::to_string(line_) + ": " + msg);
    }

    void record(const std::string& path) {
        if (lines_ && !lines_->count(path)) (*lines_)[path] = line_;
    }

    static std::string join(const std::vector<std::string>& parts) {
        std::string out;
        for (const std::string& p : parts) out += (out.empty() ? "" : ".") + p;
        return out;
    }

    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }

    void skip_comment() {
        if (!eof() && peek() == '#')
            while (!eof() && peek() != '\n') ++pos_;
    }

    void skip_blank_lines() {
        while (!eof()) {
            skip_ws();
            skip_comment();
            if (eof()) return;
            if (peek() == '\r') {
                ++pos_;
                continue;
            }
            if (peek() != '\n') return;
            ++pos_;
            ++line_;
        }
    }

    // whitespace, comments and newlines inside arrays
    void skip_space_multiline() { skip_blank_lines(); }

    void end_of_line() {
        skip_ws();
        skip_comment();
        if (!eof() && peek() == '\r') ++pos_;
        if (eof()) return;
        if (peek() != '\n') error(std::string("unexpected text after value: '") + peek() + "'");
        ++pos_;
        ++line_;
    }

    void expect(char c) {
        if (eof() || peek() != c) error(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::vector<std::string> parse_key() {
        std::vector<std::string> parts;
        while (true) {
            skip_ws();
            if (eof()) error("expected a key");
            if (peek() == '"') {
                parts.push_back(parse_basic_string());
            } else if (peek() == '\'') {
                parts.push_back(parse_literal_string());
            } else {
                const size_t start = pos_;
                while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
                    ++pos_;
                if (pos_ == start) error("expected a key");
                parts.push_back(s_.substr(start, pos_ - start));
            }
            skip_ws();
            if (!eof() && peek() == '.') {
                ++pos_;
                continue;
            }
            return parts;
        }
    }

    std::string parse_basic_string() {
        expect('"');
        if (s_.compare(pos_, 2, "\"\"") == 0) error("multi-line strings are not supported");
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') error("unterminated string");
            char c = s_[pos_++];
            if (c == '"') return out;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (eof()) error("unterminated string");
            c = s_[pos_++];
            switch (c) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case 'b': out += '\b'; break;
                case 'f': out += '\f'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'u': {
                    if (pos_ + 4 > s_.size()) error("bad \\u escape");
                    const unsigned cp = static_cast<unsigned>(std::stoul(s_.substr(pos_, 4), nullptr, 16));
                    pos_ += 4;
                    if (cp < 0x80) {
                        out += static_cast<char>(cp);
                    } else if (cp < 0x800) {
                        out += static_cast<char>(0xC0 | (cp >> 6));
                        out += static_cast<char>(0x80 | (cp & 0x3F));
                    } else {
                        out += static_cast<char>(0xE0 | (cp >> 12));
                        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
                        out += static_cast<char>(0x80 | (cp & 0x3F));
                    }
                    break;
                }
                default: error(std::string("unknown escape \\") + c);
            }
        }
    }

    std::string parse_literal_string() {
        expect('\'');
        const size_t start = pos_;
        while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
        if (eof() || peek() != '\'') error("unterminated string");
        return s_.substr(start, pos_++ - start);
    }

    json parse_value(const std::string& path) {
        if (eof()) error("expected a value");
        const char c = peek();
        if (c == '"') return parse_basic_string();
        if (c == '\'') return parse_literal_string();
        if (c == '[') return parse_array(path);
        if (c == '{') return parse_inline_table(path);
        if (s_.compare(pos_, 4, "true") == 0 && !ident_char(pos_ + 4)) {
            pos_ += 4;
            return true;
        }
        if (s_.compare(pos_, 5, "false") == 0 && !ident_char(pos_ + 5)) {
            pos_ += 5;
            return false;
        }
        return parse_number();
    }

    bool ident_char(size_t at) const {
        return at < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[at])) || s_[at] == '_');
    }

    json parse_number() {
        const size_t start = pos_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                          peek() == '.' || peek() == '_' || peek() == ':'))
            ++pos_;
        std::string tok = s_.substr(start, pos_ - start);
        if (tok.empty()) error("expected a value");
        if (tok.find(':') != std::string::npos || std::count(tok.begin(), tok.end(), '-') > 1)
            error("dates and times are not supported: " + tok);
        tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
        std::string body = tok;
        double sign = 1.0;
        if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
            sign = body[0] == '-' ? -1.0 : 1.0;
            body = body.substr(1);
        }
        if (body == "inf") return sign * std::numeric_limits<double>::infinity();
        if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
        try {
            size_t used = 0;
            if (body.rfind("0x", 0) == 0 || body.rfind("0o", 0) == 0 || body.rfind("0b", 0) == 0) {
                const int base = body[1] == 'x' ? 16 : body[1] == 'o' ? 8 : 2;
                const long long v = std::stoll(body.substr(2), &used, base);
                if (used != body.size() - 2) throw std::invalid_argument(tok);
                return static_cast<long long>(sign) * v;
            }
            if (tok.find_first_of(".eE") == std::string::npos) {
                const long long v = std::stoll(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                return v;
            }
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            error("not a valid value: " + tok);
        }
    }

    json parse_array(const std::string& path) {
        expect('[');
        json arr = json::array();
        while (true) {
            skip_space_multiline();
            if (eof()) error("unterminated array");
            if (peek() == ']') {
                ++pos_;
                return arr;
            }
            arr.push_back(parse_value(path + "[]"));
            skip_space_multiline();
            if (!eof() && peek() == ',') {
                ++pos_;
                continue;
            }
            skip_space_multiline();
            expect(']');
            return arr;
        }
    }

    json parse_inline_table(const std::string& path) {
        expect('{');
        json obj = json::object();
        skip_ws();
        if (!eof() && peek() == '}') {
            ++pos_;
            return obj;
        }
        while (true) {
            skip_ws();
            const std::vector<std::string> key = parse_key();
            skip_ws();
            expect('=');
            skip_ws();
            const std::string full = path + "." + join(key);
            record(full);
            json value = parse_value(full);
            json* target = &obj;
            for (size_t i = 0; i + 1 < key.size(); ++i) {
                json& next = (*target)[key[i]];
                if (next.is_null()) next = json::object();
                target = &next;
            }
            if (target->contains(key.back())) error("duplicate key '" + key.back() + "'");
            (*target)[key.back()] = std::move(value);
            skip_ws();
            if (!eof() && peek() == ',') {
                ++pos_;
                continue;
            }
            expect('}');
            return obj;
        }
    }

    const std::string& s_;
    std::string name_;
    std::map<std::string, int>* lines_;
    size_t pos_ = 0;
    int line_ = 1;
    std::set<std::string> defined_tables_;
};

int line_of_offset(const std::string& text, size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// key -> line for JSON input, by scanning the text in document order
void scan_json_lines(const nlohmann::ordered_json& node, const std::string& prefix, const std::string& text,
                     size_t& cursor, std::map<std::string, int>& lines) {
    if (node.is_object()) {
        for (auto it = node.begin(); it != node.end(); ++it) {
            const std::string quoted = "\"" + it.key() + "\"";
            size_t at = cursor;
            while ((at = text.find(quoted, at)) != std::string::npos) {
                size_t after = at + quoted.size();
                while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
                if (after < text.size() && text[after] == ':') break;
                at += quoted.size();
            }
            const std::string full = prefix.empty() ? it.key() : prefix + "." + it.key();
            if (at != std::string::npos) {
                if (!lines.count(full)) lines[full] = line_of_offset(text, at);
                cursor = at + quoted.size();
            }
            scan_json_lines(it.value(), full, text, cursor, lines);
        }
    } else if (node.is_array()) {
        for (const auto& el : node) scan_json_lines(el, prefix + "[]", text, cursor, lines);
    }
}

bool schema_admits(const std::set<std::string>& schema, const std::string& parent, const std::string& full) {
    return schema.count(full) || schema.count(parent.empty() ? "*" : parent + ".*");
}

}  // namespace

json parse_toml(const std::string& text, const std::string& name, std::map<std::string, int>* lines) {
    return TomlParser(text, name, lines).parse();
}

size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= b.size(); ++j) {
            const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

Scenario Scenario::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(path + ": cannot open scenario file");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    if (!is_json) {
        const size_t first = text.find_first_not_of(" \t\r\n");
        is_json = first != std::string::npos && text[first] == '{';
    }
    return from_text(text, path, is_json);
}

Scenario Scenario::from_text(const std::string& text, const std::string& name, bool is_json) {
    Scenario sc;
    sc.name_ = name;
    if (is_json) {
        nlohmann::ordered_json doc;
        try {
            doc = nlohmann::ordered_json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ScenarioError(name + ":" + std::to_string(line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0)) +
                                ": JSON parse error: " + e.what());
        }
        if (!doc.is_object()) throw ScenarioError(name + ":1: scenario must be a JSON object");
        size_t cursor = 0;
        scan_json_lines(doc, "", text, cursor, sc.lines_);
        sc.root_ = json::parse(doc.dump());
    } else {
        sc.root_ = parse_toml(text, name, &sc.lines_);
    }
    return sc;
}

void Scenario::validate(const std::set<std::string>& schema) const {
    struct Walker {
        const Scenario& sc;
        const std::set<std::string>& schema;
        void walk(const json& node, const std::string& parent) {
            if (node.is_array()) {
                for (const json& el : node) walk(el, parent + "[]");
                return;
            }
            if (!node.is_object()) return;
            for (auto it = node.begin(); it != node.end(); ++it) {
                const std::string full = parent.empty() ? it.key() : parent + "." + it.key();
                if (!schema_admits(schema, parent, full)) reject(it.key(), parent, full);
                if (!schema.count(parent.empty() ? "*" : parent + ".*")) walk(it.value(), full);
            }
        }
        [[noreturn]] void reject(const std::string& key, const std::string& parent, const std::string& full) {
            std::string best;
            size_t best_d = std::numeric_limits<size_t>::max();
            auto consider = [&](const std::string& candidate) {
                const size_t d = edit_distance(key, candidate);
                if (d < best_d || (d == best_d && candidate < best)) {
                    best_d = d;
                    best = candidate;
                }
            };
            for (const std::string& s : schema) {
                const size_t dot = s.rfind('.');
                const std::string sp = dot == std::string::npos ? "" : s.substr(0, dot);
                const std::string leaf = dot == std::string::npos ? s : s.substr(dot + 1);
                if (sp == parent && leaf != "*") consider(leaf);
            }
            if (best.empty())
                for (const std::string& s : schema) consider(s.substr(s.rfind('.') == std::string::npos ? 0 : s.rfind('.') + 1));
            std::string msg = sc.where(full) + "unknown key '" + key + "'";
            if (!parent.empty()) msg += " in [" + parent + "]";
            msg += "; nearest valid key is '" + best + "'";
            throw ScenarioError(msg);
        }
    };
    Walker{*this, schema}.walk(root_, "");
}

const json* Scenario::find(const std::string& path) const {
    const json* node = &root_;
    size_t start = 0;
    while (start <= path.size()) {
        const size_t dot = path.find('.', start);
        const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!node->is_object()) return nullptr;
        const auto it = node->find(part);
        if (it == node->end()) return nullptr;
        node = &*it;
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return node;
}

const json& Scenario::require(const std::string& path) const {
    const json* v = find(path);
    if (!v) throw ScenarioError(name_ + ": missing required key '" + path + "'");
    return *v;
}

bool Scenario::has(const std::string& path) const { return find(path) != nullptr; }

std::string Scenario::where(const std::string& path) const {
    const auto it = lines_.find(path);
    if (it == lines_.end()) return name_ + ": ";
    return name_ + ":" + std::to_string(it->second) + ": ";
}

void Scenario::fail(const std::string& path, const std::string& message) const {
    throw ScenarioError(where(path) + "'" + path + "': " + message);
}

double Scenario::number(const std::string& path) const {
    const json& v = require(path);
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

double Scenario::number(const std::string& path, double fallback) const {
    return has(path) ? number(path) : fallback;
}

long Scenario::integer(const std::string& path) const {
    const json& v = require(path);
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<long>();
}

long Scenario::integer(const std::string& path, long fallback) const {
    return has(path) ? integer(path) : fallback;
}

bool Scenario::boolean(const std::string& path, bool fallback) const {
    if (!has(path)) return fallback;
    const json& v = require(path);
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
}

std::string Scenario::string(const std::string& path) const {
    const json& v = require(path);
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

std::string Scenario::string(const std::string& path, const std::string& fallback) const {
    return has(path) ? string(path) : fallback;
}

std::vector<double> Scenario::numbers(const std::string& path) const {
    const json& v = require(path);
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (const json& el : v) {
        if (!el.is_number()) fail(path, "expected an array of numbers");
        out.push_back(el.get<double>());
    }
    return out;
}

Vec3 Scenario::vec(const std::string& path) const {
    const json& v = require(path);
    if (v.is_number()) return Vec3(v.get<double>(), 0.0, 0.0);
    const std::vector<double> xs = numbers(path);
    if (xs.empty() || xs.size() > 3) fail(path, "expected 1 to 3 coordinates");
    Vec3 out = Vec3::Zero();
    for (size_t i = 0; i < xs.size(); ++i) out[static_cast<Eigen::Index>(i)] = xs[i];
    return out;
}

Vec3 Scenario::vec(const std::string& path, const Vec3& fallback) const { return has(path) ? vec(path) : fallback; }

std::vector<Vec3> Scenario::vecs(const std::string& path) const {
    const json& v = require(path);
    if (!v.is_array()) fail(path, "expected an array of points");
    std::vector<Vec3> out;
    for (const json& el : v) {
        Vec3 p = Vec3::Zero();
        if (el.is_number()) {
            p[0] = el.get<double>();
        } else if (el.is_array() && !el.empty() && el.size() <= 3) {
            for (size_t i = 0; i < el.size(); ++i) {
                if (!el[i].is_number()) fail(path, "expected an array of points");
                p[static_cast<Eigen::Index>(i)] = el[i].get<double>();
            }
        } else {
            fail(path, "expected an array of points");
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace fermat::cli
