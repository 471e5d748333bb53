#pragma once

#include "vlogcues/corpus.hpp"
#include "vlogcues/date.hpp"
#include "vlogcues/linguistics.hpp"
#include "vlogcues/prosody.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vlogcues {

inline const Date kDefaultAnchor{2020, 3, 13};
inline const Date kDefaultEnd{2020, 6, 1};
inline constexpr int kDefaultWidthDays = 7;

/// What happens to the days left over when (end - anchor + 1) is not a
/// multiple of the bin width.
enum class TrailingDays {
    MergeIntoLast,  // extend the last full bin through `end`
    SeparateBin,    // open a shorter final bin
};

/// Consecutive date ranges covering [anchor, end]. Bin indices are 1-based.
class BinGrid {
public:
    /// Fixed-width bins from `anchor`. With the defaults this yields the
    /// 11-week grid 2020-03-13 .. 2020-06-01.
    static BinGrid uniform(Date anchor = kDefaultAnchor, Date end = kDefaultEnd,
                           int width_days = kDefaultWidthDays,
                           TrailingDays trailing = TrailingDays::MergeIntoLast);

    /// Explicit bin start dates (strictly increasing); the last bin runs to `end`.
    static BinGrid from_starts(std::vector<Date> starts, Date end);

    std::size_t size() const { return starts_.size(); }
    Date anchor() const { return starts_.front(); }
    Date end() const { return end_; }
    Date start_date(std::size_t index) const { return starts_.at(index - 1); }
    /// Inclusive last day of bin `index`.
    Date last_date(std::size_t index) const;

    /// 1-based bin holding `d`, or nullopt outside [anchor, end].
    std::optional<std::size_t> bin_of(Date d) const;

    friend bool operator==(const BinGrid&, const BinGrid&) = default;

private:
    std::vector<Date> starts_;
    Date end_;
};

/// Reads a boundary override CSV `bin,start_date` with bins numbered 1..n.
BinGrid load_bin_overrides(const std::filesystem::path& path, Date end);
BinGrid parse_bin_overrides(const std::string& text, Date end);

/// Date of 1-based day number `day` counted from `anchor` (day 1 = anchor).
inline Date day_date(Date anchor, int day) { return anchor.plus_days(day - 1); }

struct TimeBin {
    std::size_t index = 0;
    Date start_date;
    Date last_date;
    std::vector<std::string> record_ids;
    std::optional<ProsodyVector> mean_vector;
    std::optional<WordTable> word_table;
};

struct RejectedRecord {
    std::string id;
    Date publish_date;
    std::string reason;
};

struct BinAssignment {
    std::vector<TimeBin> bins;
    std::vector<RejectedRecord> rejects;

    std::size_t accepted() const;
};

/// Places each record in its bin; records outside the grid are reported.
BinAssignment assign_bins(const std::vector<VideoRecord>& records, const BinGrid& grid);

/// Componentwise mean; nullopt for an empty bin.
std::optional<ProsodyVector> bin_average(std::span<const ProsodyVector> vectors);

// ---- event series ---------------------------------------------------------

struct EventSeries {
    std::string name;
    std::map<Date, std::uint64_t> values;
};

inline const std::vector<std::string>& event_header() {
    static const std::vector<std::string> h{"date", "new_cases", "new_deaths", "hospitalized"};
    return h;
}

/// Reads the daily event CSV into the series new_cases, new_deaths and
/// hospitalized, in that order. Rows may come unsorted.
std::vector<EventSeries> load_event_series(const std::filesystem::path& path);

enum class Aggregation { Sum, Mean };

/// Per-bin aggregate of the days that fall in the grid. Days outside the
/// grid are ignored. A bin without any day yields 0 for Sum and nullopt
/// for Mean.
std::vector<std::optional<double>> weekly_aggregate(const EventSeries& series, const BinGrid& grid,
                                                    Aggregation how = Aggregation::Sum);

/// Number of dated rows per bin.
std::vector<std::size_t> coverage(const EventSeries& series, const BinGrid& grid);

// ---- peaks and alignment --------------------------------------------------

struct PeakSet {
    std::string series;
    std::size_t n_bins = 0;
    std::vector<std::size_t> indices;  // 1-based, ascending
};

/// Strict local maxima of a per-bin series. A run of equal values counts as
/// one peak reported at its first index when every existing neighbor of the
/// run is strictly lower. Requires at least 3 bins.
PeakSet detect_peaks(std::string name, std::span<const double> values);

/// A per-bin trajectory where empty bins are missing.
struct Trajectory {
    std::string name;
    std::vector<std::optional<double>> values;
};

/// Peaks of a trajectory, or a diagnostic when a bin is missing.
struct PeakResult {
    std::optional<PeakSet> peaks;
    std::string diagnostic;
};

PeakResult detect_peaks(const Trajectory& trajectory);

struct PeakMatch {
    std::string feature_series;
    std::size_t feature_bin = 0;
    std::string event_series;
    std::size_t event_bin = 0;
    long offset = 0;  // event_bin - feature_bin
};

struct UnmatchedPeak {
    std::string series;
    std::size_t bin = 0;
};

struct AlignmentReport {
    std::size_t n_bins = 0;
    std::size_t tolerance_bins = 0;
    std::vector<PeakMatch> matches;
    std::vector<UnmatchedPeak> unmatched_features;
    std::vector<UnmatchedPeak> unmatched_events;
};

/// Pairs every feature peak with every event peak at most `tolerance_bins`
/// apart. All peak sets must share one grid size.
AlignmentReport align_report(const std::vector<PeakSet>& feature_peaks,
                             const std::vector<PeakSet>& event_peaks,
                             std::size_t tolerance_bins = 1);

}  // namespace vlogcues
