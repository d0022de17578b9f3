#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gstl/matrix.hpp"

namespace gstl::io {

// Fixed decimal formatting for every emitted artifact: 17 significant
// digits, '.' separator, no locale.
std::string fmt17(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Matrices as CSV rows of comma-separated reals.
void write_matrix_csv(const std::string& path, const DenseMatrix& m);
DenseMatrix read_matrix_csv(const std::string& path);

// Vectors as one value per line.
void write_vector_lines(const std::string& path, std::span<const double> v);
std::vector<double> read_vector_lines(const std::string& path);

// Plain-text "key = value" configuration with '#' comments. Unknown keys,
// duplicates, and type errors are reported with their line number.
class Config {
  public:
    static Config parse_file(const std::string& path,
                             const std::vector<std::string>& allowed_keys);
    static Config parse_text(const std::string& text,
                             const std::vector<std::string>& allowed_keys);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // Comma-separated list of reals.
    std::vector<double> get_double_list(const std::string& key) const;

  private:
    struct Entry {
        std::string value;
        int line;
    };
    std::map<std::string, Entry> entries_;
    const Entry& require(const std::string& key) const;
};

}  // namespace gstl::io
