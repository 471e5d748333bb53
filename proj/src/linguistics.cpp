#include "vlogcues/linguistics.hpp"

#include "vlogcues/csv.hpp"
#include "vlogcues/errors.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace vlogcues {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) {
        out.push_back(std::move(cur));
    }
    return out;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
    StopwordSet out;
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
        for (auto& t : tokenize(line)) {
            out.insert(std::move(t));
        }
    }
    return out;
}

WordTable::WordTable(std::map<std::string, std::size_t> counts, std::size_t n_videos)
    : counts_(std::move(counts)), n_videos_(n_videos) {
    if (n_videos_ == 0) {
        throw InvalidInput("WordTable: n_videos must be positive");
    }
}

std::size_t WordTable::total_tokens() const {
    std::size_t n = 0;
    for (const auto& [w, c] : counts_) {
        n += c;
    }
    return n;
}

double WordTable::frequency(std::string_view word) const {
    auto it = counts_.find(std::string(word));
    if (it == counts_.end() || n_videos_ == 0) {
        return 0.0;
    }
    return static_cast<double>(it->second) / static_cast<double>(n_videos_);
}

WordTable word_freq(const std::vector<VideoRecord>& records, const StopwordSet& stopwords) {
    if (records.empty()) {
        throw InvalidInput("word_freq: empty bin");
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& r : records) {
        for (const auto* field : {&r.title, &r.description}) {
            for (auto& tok : tokenize(*field)) {
                if (!stopwords.contains(tok)) {
                    ++counts[std::move(tok)];
                }
            }
        }
    }
    return WordTable(std::move(counts), records.size());
}

std::vector<std::pair<std::string, double>> top_k(const WordTable& table, std::size_t k) {
    if (k == 0) {
        throw InvalidInput("top_k: k must be at least 1");
    }
    // Counts share one denominator, so ordering by count orders by frequency
    // without rounding ties apart.
    std::vector<std::pair<std::string, std::size_t>> items(table.counts().begin(),
                                                           table.counts().end());
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t i = 0; i < items.size() && i < k; ++i) {
        out.emplace_back(items[i].first, table.frequency(items[i].first));
    }
    return out;
}

std::vector<std::optional<double>> target_trajectory(
    const std::vector<std::optional<WordTable>>& tables, const std::vector<std::string>& targets) {
    if (targets.empty()) {
        throw InvalidInput("target_trajectory: no target words");
    }
    std::vector<std::optional<double>> out;
    out.reserve(tables.size());
    for (const auto& t : tables) {
        if (!t) {
            out.push_back(std::nullopt);
            continue;
        }
        double best = 0.0;
        for (const auto& w : targets) {
            for (const auto& tok : tokenize(w)) {
                best = std::max(best, t->frequency(tok));
            }
        }
        out.push_back(best);
    }
    return out;
}

}  // namespace vlogcues
