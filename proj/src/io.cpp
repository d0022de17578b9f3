#include "gstl/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gstl/errors.hpp"

namespace gstl::io {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

void write_matrix_csv(const std::string& path, const DenseMatrix& m) {
    std::string buf;
    for (index_t i = 0; i < m.rows(); ++i) {
        for (index_t j = 0; j < m.cols(); ++j) {
            if (j) buf += ',';
            buf += fmt17(m(i, j));
        }
        buf += '\n';
    }
    write_text_file(path, buf);
}

namespace {

double parse_double(const std::string& s, const std::string& where) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
        throw DataError("bad numeric value '" + s + "' in " + where);
    }
    return v;
}

}  // namespace

DenseMatrix read_matrix_csv(const std::string& path) {
    const std::string text = read_text_file(path);
    std::vector<double> data;
    index_t rows = 0;
    index_t cols = 0;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        std::istringstream cells(line);
        std::string cell;
        index_t this_cols = 0;
        while (std::getline(cells, cell, ',')) {
            data.push_back(parse_double(cell, path));
            ++this_cols;
        }
        if (rows == 0) {
            cols = this_cols;
        } else if (this_cols != cols) {
            throw DataError("ragged CSV row in " + path);
        }
        ++rows;
    }
    return DenseMatrix(rows, cols, std::move(data));
}

void write_vector_lines(const std::string& path, std::span<const double> v) {
    std::string buf;
    for (double x : v) {
        buf += fmt17(x);
        buf += '\n';
    }
    write_text_file(path, buf);
}

std::vector<double> read_vector_lines(const std::string& path) {
    const std::string text = read_text_file(path);
    std::vector<double> out;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        out.push_back(parse_double(line, path));
    }
    return out;
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::parse_text(const std::string& text,
                          const std::vector<std::string>& allowed_keys) {
    Config cfg;
    std::istringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value'", line_no);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line_no);
        if (std::find(allowed_keys.begin(), allowed_keys.end(), key) ==
            allowed_keys.end()) {
            throw ConfigError("unknown key '" + key + "'", line_no);
        }
        if (cfg.entries_.count(key)) {
            throw ConfigError("duplicate key '" + key + "'", line_no);
        }
        cfg.entries_[key] = Entry{value, line_no};
    }
    return cfg;
}

Config Config::parse_file(const std::string& path,
                          const std::vector<std::string>& allowed_keys) {
    return parse_text(read_text_file(path), allowed_keys);
}

bool Config::has(const std::string& key) const {
    return entries_.count(key) != 0;
}

const Config::Entry& Config::require(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw ConfigError("missing required key '" + key + "'", 0);
    }
    return it->second;
}

std::string Config::get_string(const std::string& key) const {
    return require(key).value;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
    return has(key) ? entries_.at(key).value : fallback;
}

double Config::get_double(const std::string& key) const {
    const Entry& e = require(key);
    try {
        return parse_double(e.value, "config");
    } catch (const DataError&) {
        throw ConfigError("key '" + key + "' is not a number", e.line);
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key) const {
    const Entry& e = require(key);
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0' || errno == ERANGE) {
        throw ConfigError("key '" + key + "' is not a non-negative integer",
                          e.line);
    }
    return v;
}

std::uint64_t Config::get_u64(const std::string& key,
                              std::uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Entry& e = entries_.at(key);
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    throw ConfigError("key '" + key + "' must be true/false", e.line);
}

std::vector<double> Config::get_double_list(const std::string& key) const {
    const Entry& e = require(key);
    std::vector<double> out;
    std::istringstream cells(e.value);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
        const std::string t = trim(cell);
        if (t.empty()) continue;
        try {
            out.push_back(parse_double(t, "config"));
        } catch (const DataError&) {
            throw ConfigError("key '" + key + "' has a non-numeric entry",
                              e.line);
        }
    }
    if (out.empty()) throw ConfigError("key '" + key + "' is empty", e.line);
    return out;
}

}  // namespace gstl::io
