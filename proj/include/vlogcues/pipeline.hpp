#pragma once

#include "vlogcues/config.hpp"
#include "vlogcues/corpus.hpp"
#include "vlogcues/prosody.hpp"
#include "vlogcues/timeline.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace vlogcues {

// ---- scan -----------------------------------------------------------------

struct ScanStage {
    std::string name;
    std::size_t kept = 0;
    std::vector<std::string> dropped_ids;
};

struct ScanResult {
    std::size_t input = 0;
    std::vector<ScanStage> stages;  // dedupe, date_range, [validated], location
    std::vector<VideoRecord> kept;
};

/// dedupe -> date range -> (validated ids, if configured) -> location.
ScanResult scan(const std::vector<VideoRecord>& records, const PipelineConfig& config);

/// Reads config.metadata and writes filtered_metadata.csv and scan_report.json.
ScanResult cmd_scan(const PipelineConfig& config);

// ---- extract --------------------------------------------------------------

struct ReferenceSpan {
    double start_ms = 0.0;
    double end_ms = 0.0;
};

/// Reads the sidecar CSV `id,start_ms,end_ms`.
std::map<std::string, ReferenceSpan> load_references(const std::filesystem::path& path);

struct FeatureRow {
    std::string id;
    ProsodyVector vector;
};

struct SkippedRecord {
    std::string id;
    std::string reason;
};

struct ExtractResult {
    std::vector<FeatureRow> rows;      // metadata order
    std::vector<SkippedRecord> skips;  // metadata order
};

/// Diarizes and describes every record, `config.workers` at a time.
ExtractResult extract(const std::vector<VideoRecord>& records,
                      const std::map<std::string, ReferenceSpan>& references,
                      const PipelineConfig& config);

/// Writes features.csv and extract_skips.csv (plus masks/ when enabled).
ExtractResult cmd_extract(const PipelineConfig& config);

std::vector<std::string> feature_header();
std::string features_to_csv(const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> load_features(const std::filesystem::path& path);

// ---- words ----------------------------------------------------------------

struct WordsResult {
    BinAssignment bins;  // word_table filled for nonempty bins
    Trajectory target;
};

WordsResult words(const std::vector<VideoRecord>& records, const PipelineConfig& config);

/// Writes word_freq.csv, top_words.csv and target_trajectory.csv.
WordsResult cmd_words(const PipelineConfig& config);

// ---- report ---------------------------------------------------------------

struct ReportResult {
    BinAssignment bins;  // mean_vector and word_table filled where available
    std::vector<Trajectory> feature_trajectories;  // 18 descriptors + target words
    std::vector<Trajectory> event_trajectories;
    std::vector<PeakSet> feature_peaks;
    std::vector<PeakSet> event_peaks;
    std::vector<std::string> diagnostics;
    AlignmentReport alignment;
};

ReportResult report(const std::vector<VideoRecord>& records, const std::vector<FeatureRow>& features,
                    const std::vector<EventSeries>& events, const PipelineConfig& config);

/// Writes weekly_features.csv, word_freq.csv, top_words.csv,
/// target_trajectory.csv, event_weekly.csv, trajectories.csv and
/// alignment.json. Inputs are validated before anything is written.
ReportResult cmd_report(const PipelineConfig& config);

std::string alignment_to_json(const ReportResult& result);

}  // namespace vlogcues
