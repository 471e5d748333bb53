#pragma once

#include "vlogcues/corpus.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vlogcues {

/// Lowercases ASCII and splits on every non-alphanumeric byte.
std::vector<std::string> tokenize(std::string_view text);

using StopwordSet = std::set<std::string, std::less<>>;

/// One token per line; blank lines ignored, entries lowercased.
StopwordSet load_stopwords(const std::filesystem::path& path);

/// Word occurrence counts over a group of videos. Frequencies are average
/// occurrences per video.
class WordTable {
public:
    WordTable() = default;
    WordTable(std::map<std::string, std::size_t> counts, std::size_t n_videos);

    std::size_t n_videos() const { return n_videos_; }
    const std::map<std::string, std::size_t>& counts() const { return counts_; }
    std::size_t total_tokens() const;

    /// Average occurrences per video; 0 for absent words.
    double frequency(std::string_view word) const;

private:
    std::map<std::string, std::size_t> counts_;
    std::size_t n_videos_ = 0;
};

/// Counts every non-stopword token of title + description over the records.
WordTable word_freq(const std::vector<VideoRecord>& records, const StopwordSet& stopwords = {});

/// Highest frequencies first, ties in ascending word order, at most k entries.
std::vector<std::pair<std::string, double>> top_k(const WordTable& table, std::size_t k = 5);

inline const std::vector<std::string>& default_target_words() {
    static const std::vector<std::string> w{"quarantine", "coronavirus", "covid", "pandemic"};
    return w;
}

/// Per table, the largest frequency among the target words (0 if none occur).
/// Missing tables (empty bins) stay missing.
std::vector<std::optional<double>> target_trajectory(
    const std::vector<std::optional<WordTable>>& tables, const std::vector<std::string>& targets);

}  // namespace vlogcues
