#pragma once

#include "vlogcues/date.hpp"
#include "vlogcues/diarization.hpp"
#include "vlogcues/prosody.hpp"
#include "vlogcues/timeline.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vlogcues {

/// Every tunable of the pipeline. Defaults reproduce the published setup.
struct PipelineConfig {
    // binning
    Date anchor = kDefaultAnchor;
    Date end = kDefaultEnd;
    int width_days = kDefaultWidthDays;
    TrailingDays trailing = TrailingDays::MergeIntoLast;
    std::optional<std::filesystem::path> bin_overrides;

    // diarization
    double threshold = kDefaultSimilarityThreshold;
    double window_ms = kDefaultWindowMs;
    int embedding_dim = kDefaultEmbeddingDim;
    std::optional<std::filesystem::path> embeddings_dir;

    // prosody
    double frame_ms = 25.0;
    double hop_ms = 10.0;
    double f0_min_hz = 60.0;
    double f0_max_hz = 400.0;
    ZcrExtremaMode zcr_extrema = ZcrExtremaMode::PerWindow;

    // corpus
    std::vector<std::string> location_tokens{"NY", "NYC"};
    std::vector<std::string> location_substrings{"New York"};
    std::optional<std::filesystem::path> validated_ids;

    // linguistics
    std::vector<std::string> target_words = default_target_words();
    std::optional<std::filesystem::path> stopwords;
    std::size_t top_k = 5;

    // report
    Aggregation event_aggregation = Aggregation::Sum;
    std::size_t peak_tolerance = 1;

    // paths
    std::optional<std::filesystem::path> metadata;
    std::optional<std::filesystem::path> audio_root;
    std::optional<std::filesystem::path> references;
    std::optional<std::filesystem::path> events;
    std::optional<std::filesystem::path> features;
    std::filesystem::path out_dir = "out";
    bool write_masks = false;

    std::size_t workers = 1;

    /// Sets one key from its textual value. Throws InvalidInput for unknown
    /// keys or unparsable values.
    void set(const std::string& key, const std::string& value);

    /// Throws InvalidInput when parameters are inconsistent.
    void validate() const;

    BinGrid grid() const;
    DiarizationOptions diarization() const;
    ProsodyOptions prosody() const;

    /// The features file `report` reads: `features` if set, else out_dir/features.csv.
    std::filesystem::path features_path() const;
};

/// Flat `key = value` lines; `#` starts a comment. Relative paths are kept
/// as written.
PipelineConfig parse_config(const std::string& text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

}  // namespace vlogcues
