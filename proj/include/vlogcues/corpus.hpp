#pragma once

#include "vlogcues/date.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vlogcues {

/// Metadata of one corpus item.
struct VideoRecord {
    std::string id;
    std::string title;
    std::string description;
    Date publish_date;
    double duration_s = 0.0;
    std::uint64_t views = 0;
    std::uint64_t upvotes = 0;
    std::uint64_t downvotes = 0;
    std::optional<std::string> audio_path;

    friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

/// Keyword components combined into search queries.
struct QueryGrid {
    std::vector<std::string> events;
    std::vector<std::string> behaviors;
    std::vector<std::string> locations;
};

/// The component table used for the original crawl.
QueryGrid default_query_grid();

/// Cartesian product "<event> <behavior> <location>", events outermost.
std::vector<std::string> generate_queries(const QueryGrid& grid);

/// Keeps the first occurrence of each id, preserving order.
std::vector<VideoRecord> dedupe(const std::vector<VideoRecord>& records);

/// Keeps records with start <= publish_date <= end.
std::vector<VideoRecord> filter_date_range(const std::vector<VideoRecord>& records, Date start,
                                           Date end);

/// Keeps a record when any exact token appears as a whole, case-sensitive
/// token of its title or description, or any substring occurs in either
/// field case-insensitively. Tokens are delimited by whitespace and ASCII
/// punctuation.
std::vector<VideoRecord> filter_location(const std::vector<VideoRecord>& records,
                                         const std::vector<std::string>& exact_tokens,
                                         const std::vector<std::string>& substrings);

/// Two annotators' labels for the same items, in item order.
struct AnnotationPair {
    std::vector<std::string> labels_a;
    std::vector<std::string> labels_b;
};

/// Cohen's kappa over the union of labels seen in either sequence.
double cohens_kappa(const AnnotationPair& pair);

// ---- file formats --------------------------------------------------------

inline const std::vector<std::string>& metadata_header() {
    static const std::vector<std::string> h{"id",         "title", "description",
                                            "publish_date", "duration_s", "views",
                                            "upvotes",    "downvotes", "audio_path"};
    return h;
}

/// Reads the metadata CSV. Throws LoadError naming the offending line.
std::vector<VideoRecord> load_metadata(const std::filesystem::path& path);
std::string metadata_to_csv(const std::vector<VideoRecord>& records);

/// Reads an annotation CSV `id,label_a,label_b`.
AnnotationPair load_annotations(const std::filesystem::path& path);

}  // namespace vlogcues
