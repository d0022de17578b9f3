#include "gstl/textpipe.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "gstl/errors.hpp"
#include "gstl/io.hpp"

namespace gstl {

namespace {

// Validates UTF-8 and returns the code-point count; throws with the byte
// offset of the first invalid byte.
index_t validate_utf8(std::string_view text) {
    index_t points = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        std::size_t extra;
        if (c < 0x80) {
            extra = 0;
        } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
            extra = 1;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
        } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
            extra = 3;
        } else {
            throw EncodingError("invalid UTF-8 byte at offset " +
                                    std::to_string(i),
                                i);
        }
        if (i + extra >= text.size() && extra > 0) {
            throw EncodingError("truncated UTF-8 sequence at offset " +
                                    std::to_string(i),
                                i);
        }
        for (std::size_t k = 1; k <= extra; ++k) {
            if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
                throw EncodingError("invalid UTF-8 continuation at offset " +
                                        std::to_string(i + k),
                                    i + k);
            }
        }
        i += extra + 1;
        ++points;
    }
    return points;
}

bool is_token_char(unsigned char c) {
    return std::isalnum(c) || c >= 0x80;
}

std::vector<std::string> tokenize_lower(std::string_view sentence) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : sentence) {
        if (is_token_char(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string_view trim_view(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

std::vector<Sentence> preprocess(std::string_view raw_text,
                                 const std::unordered_set<std::string>& stopwords,
                                 index_t min_chars, index_t min_tokens) {
    validate_utf8(raw_text);

    std::vector<Sentence> out;
    std::size_t start = 0;
    const auto flush = [&](std::size_t end) {
        const std::string_view segment =
            trim_view(raw_text.substr(start, end - start));
        if (!segment.empty()) {
            const index_t chars = validate_utf8(segment);
            std::vector<std::string> tokens = tokenize_lower(segment);
            if (chars >= min_chars && tokens.size() >= min_tokens) {
                Sentence kept;
                kept.reserve(tokens.size());
                for (auto& tok : tokens) {
                    if (!stopwords.count(tok)) kept.push_back(std::move(tok));
                }
                if (!kept.empty()) out.push_back(std::move(kept));
            }
        }
    };
    for (std::size_t i = 0; i < raw_text.size(); ++i) {
        const char c = raw_text[i];
        if (c == '.' || c == '!' || c == '?' || c == '\n') {
            flush(i);
            start = i + 1;
        }
    }
    flush(raw_text.size());
    return out;
}

Vocabulary build_vocabulary(std::span<const Sentence> sentences,
                            std::uint64_t min_count) {
    if (min_count < 1) throw ValueError("build_vocabulary: min_count >= 1");
    std::map<std::string, std::uint64_t> counts;
    for (const Sentence& s : sentences) {
        for (const std::string& tok : s) ++counts[tok];
    }
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (const auto& [tok, n] : counts) {
        if (n >= min_count) kept.emplace_back(tok, n);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary vocab;
    vocab.min_count = min_count;
    vocab.tokens.reserve(kept.size());
    vocab.counts.reserve(kept.size());
    for (std::uint32_t id = 0; id < kept.size(); ++id) {
        vocab.tokens.push_back(kept[id].first);
        vocab.counts.push_back(kept[id].second);
        vocab.id_of.emplace(kept[id].first, id);
    }
    return vocab;
}

double CooccurrenceCounts::weight(std::uint32_t a, std::uint32_t b) const {
    const std::uint32_t i = std::min(a, b);
    const std::uint32_t j = std::max(a, b);
    const auto it = std::lower_bound(
        entries.begin(), entries.end(), std::make_pair(i, j),
        [](const CoocEntry& e, const std::pair<std::uint32_t, std::uint32_t>& key) {
            return std::make_pair(e.i, e.j) < key;
        });
    if (it != entries.end() && it->i == i && it->j == j) return it->weight;
    return 0.0;
}

double CooccurrenceCounts::total_mass() const {
    double total = 0.0;
    for (const CoocEntry& e : entries) {
        total += e.i == e.j ? e.weight : 2.0 * e.weight;
    }
    return total;
}

CooccurrenceCounts count_cooccurrences(std::span<const Sentence> sentences,
                                       const Vocabulary& vocab, index_t window,
                                       bool distance_weighting) {
    if (window < 1) throw ValueError("count_cooccurrences: window >= 1");
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> cells;
    std::vector<std::uint32_t> ids;
    for (const Sentence& s : sentences) {
        ids.clear();
        for (const std::string& tok : s) {
            const auto it = vocab.id_of.find(tok);
            if (it != vocab.id_of.end()) ids.push_back(it->second);
        }
        for (index_t p = 0; p < ids.size(); ++p) {
            const index_t limit = std::min(ids.size(), p + window + 1);
            for (index_t q = p + 1; q < limit; ++q) {
                const double w =
                    distance_weighting ? 1.0 / static_cast<double>(q - p) : 1.0;
                const std::uint32_t i = std::min(ids[p], ids[q]);
                const std::uint32_t j = std::max(ids[p], ids[q]);
                // Both ordered cells gain w; the diagonal holds both.
                cells[{i, j}] += i == j ? 2.0 * w : w;
            }
        }
    }

    CooccurrenceCounts counts;
    counts.vocab_size = vocab.size();
    counts.window = window;
    counts.distance_weighting = distance_weighting;
    counts.entries.reserve(cells.size());
    for (const auto& [key, w] : cells) {
        counts.entries.push_back(CoocEntry{key.first, key.second, w});
    }
    return counts;
}

std::string cooc_to_tsv(const CooccurrenceCounts& counts) {
    std::string out;
    for (const CoocEntry& e : counts.entries) {
        out += std::to_string(e.i);
        out += '\t';
        out += std::to_string(e.j);
        out += '\t';
        out += io::fmt17(e.weight);
        out += '\n';
    }
    return out;
}

void write_cooc_tsv(const std::string& path, const CooccurrenceCounts& counts) {
    io::write_text_file(path, cooc_to_tsv(counts));
}

CooccurrenceCounts read_cooc_tsv(const std::string& path) {
    const std::string text = io::read_text_file(path);
    CooccurrenceCounts counts;
    std::istringstream lines(text);
    std::string line;
    int line_no = 0;
    std::uint32_t max_id = 0;
    bool any = false;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream cells(line);
        std::string si, sj, sw;
        if (!std::getline(cells, si, '\t') || !std::getline(cells, sj, '\t') ||
            !std::getline(cells, sw)) {
            throw DataError("bad co-occurrence line " + std::to_string(line_no) +
                            " in " + path);
        }
        CoocEntry e;
        try {
            e.i = static_cast<std::uint32_t>(std::stoul(si));
            e.j = static_cast<std::uint32_t>(std::stoul(sj));
            e.weight = std::stod(sw);
        } catch (const std::exception&) {
            throw DataError("bad co-occurrence line " + std::to_string(line_no) +
                            " in " + path);
        }
        if (e.i > e.j) {
            throw DataError("co-occurrence table must satisfy i <= j (line " +
                            std::to_string(line_no) + ")");
        }
        counts.entries.push_back(e);
        max_id = std::max({max_id, e.i, e.j});
        any = true;
    }
    if (!std::is_sorted(counts.entries.begin(), counts.entries.end(),
                        [](const CoocEntry& a, const CoocEntry& b) {
                            return std::make_pair(a.i, a.j) <
                                   std::make_pair(b.i, b.j);
                        })) {
        throw DataError("co-occurrence table must be sorted by (i, j)");
    }
    counts.vocab_size = any ? max_id + 1 : 0;
    return counts;
}

std::string vocab_to_tsv(const Vocabulary& vocab) {
    std::string out;
    for (index_t id = 0; id < vocab.size(); ++id) {
        out += vocab.tokens[id];
        out += '\t';
        out += std::to_string(vocab.counts[id]);
        out += '\n';
    }
    return out;
}

void write_vocab_tsv(const std::string& path, const Vocabulary& vocab) {
    io::write_text_file(path, vocab_to_tsv(vocab));
}

Vocabulary read_vocab_tsv(const std::string& path) {
    const std::string text = io::read_text_file(path);
    Vocabulary vocab;
    std::istringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError("bad vocabulary line " + std::to_string(line_no) +
                            " in " + path);
        }
        const std::string token = line.substr(0, tab);
        std::uint64_t count = 0;
        try {
            count = std::stoull(line.substr(tab + 1));
        } catch (const std::exception&) {
            throw DataError("bad vocabulary count at line " +
                            std::to_string(line_no) + " in " + path);
        }
        const auto id = static_cast<std::uint32_t>(vocab.tokens.size());
        if (!vocab.id_of.emplace(token, id).second) {
            throw DataError("duplicate vocabulary token '" + token + "'");
        }
        vocab.tokens.push_back(token);
        vocab.counts.push_back(count);
    }
    return vocab;
}

std::unordered_set<std::string> read_stopwords(const std::string& path) {
    const std::string text = io::read_text_file(path);
    std::unordered_set<std::string> out;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.pop_back();
        }
        if (!line.empty()) out.insert(line);
    }
    return out;
}

}  // namespace gstl
