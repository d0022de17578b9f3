#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gstl/matrix.hpp"

namespace gstl {

using Sentence = std::vector<std::string>;

// Sentence-split, lowercase, punctuation-stripped tokens. Sentences shorter
// than min_chars characters (code points, before tokenization) or
// min_tokens tokens are dropped; stopwords are removed afterwards. Invalid
// UTF-8 raises EncodingError with the byte offset.
std::vector<Sentence> preprocess(
    std::string_view raw_text,
    const std::unordered_set<std::string>& stopwords = {},
    index_t min_chars = 20, index_t min_tokens = 5);

struct Vocabulary {
    std::vector<std::string> tokens;       // id -> token
    std::vector<std::uint64_t> counts;     // id -> corpus count
    std::unordered_map<std::string, std::uint32_t> id_of;
    std::uint64_t min_count = 1;

    index_t size() const { return tokens.size(); }
    bool contains(const std::string& tok) const { return id_of.count(tok); }
};

// Tokens with corpus frequency >= min_count; ids by descending frequency,
// lexicographic tie-break.
Vocabulary build_vocabulary(std::span<const Sentence> sentences,
                            std::uint64_t min_count);

// Symmetric co-occurrence table stored as its upper half (i <= j), sorted.
// An entry's weight is the full symmetric cell value X_ij (= X_ji); the
// diagonal accumulates both directions of a self co-occurrence.
struct CoocEntry {
    std::uint32_t i;
    std::uint32_t j;
    double weight;
};

struct CooccurrenceCounts {
    std::vector<CoocEntry> entries;  // i <= j, sorted by (i, j)
    index_t vocab_size = 0;
    index_t window = 0;
    bool distance_weighting = true;

    double weight(std::uint32_t a, std::uint32_t b) const;
    double total_mass() const;  // sum over the full symmetric table
};

// Windowed counting within sentences: tokens outside the vocabulary are
// skipped before distances are measured, and windows never cross sentence
// boundaries. A pair at distance k adds 1/k (or 1 without distance
// weighting) to both ordered cells.
CooccurrenceCounts count_cooccurrences(std::span<const Sentence> sentences,
                                       const Vocabulary& vocab, index_t window,
                                       bool distance_weighting = true);

// TSV formats: co-occurrences as "i<TAB>j<TAB>weight" with i <= j sorted by
// (i, j); vocabulary as "token<TAB>count" with id = line number.
std::string cooc_to_tsv(const CooccurrenceCounts& counts);
void write_cooc_tsv(const std::string& path, const CooccurrenceCounts& counts);
CooccurrenceCounts read_cooc_tsv(const std::string& path);

std::string vocab_to_tsv(const Vocabulary& vocab);
void write_vocab_tsv(const std::string& path, const Vocabulary& vocab);
Vocabulary read_vocab_tsv(const std::string& path);

// Newline-delimited stopword list.
std::unordered_set<std::string> read_stopwords(const std::string& path);

}  // namespace gstl
