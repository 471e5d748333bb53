#include "vlogcues/timeline.hpp"

#include "vlogcues/csv.hpp"
#include "vlogcues/errors.hpp"

#include <algorithm>
#include <charconv>

namespace vlogcues {

BinGrid BinGrid::uniform(Date anchor, Date end, int width_days, TrailingDays trailing) {
    if (end < anchor) {
        throw InvalidInput("bin grid: anchor after end");
    }
    if (width_days <= 0) {
        throw InvalidInput("bin grid: width_days must be positive");
    }
    const long days = end.days_since(anchor) + 1;
    long n = days / width_days;
    if (trailing == TrailingDays::SeparateBin && days % width_days != 0) {
        ++n;
    }
    n = std::max(1L, n);
    BinGrid g;
    g.end_ = end;
    for (long i = 0; i < n; ++i) {
        g.starts_.push_back(anchor.plus_days(i * width_days));
    }
    return g;
}

BinGrid BinGrid::from_starts(std::vector<Date> starts, Date end) {
    if (starts.empty()) {
        throw InvalidInput("bin grid: no bin starts");
    }
    for (std::size_t i = 1; i < starts.size(); ++i) {
        if (!(starts[i - 1] < starts[i])) {
            throw InvalidInput("bin grid: starts must be strictly increasing");
        }
    }
    if (end < starts.back()) {
        throw InvalidInput("bin grid: last bin starts after end");
    }
    BinGrid g;
    g.starts_ = std::move(starts);
    g.end_ = end;
    return g;
}

Date BinGrid::last_date(std::size_t index) const {
    return index < starts_.size() ? starts_.at(index).plus_days(-1) : end_;
}

std::optional<std::size_t> BinGrid::bin_of(Date d) const {
    if (d < starts_.front() || end_ < d) {
        return std::nullopt;
    }
    auto it = std::upper_bound(starts_.begin(), starts_.end(), d);
    return static_cast<std::size_t>(it - starts_.begin());
}

BinGrid parse_bin_overrides(const std::string& text, Date end) {
    auto rows = csv::parse(text);
    if (rows.empty() || rows.front().fields != std::vector<std::string>{"bin", "start_date"}) {
        throw LoadError("bin override: expected header 'bin,start_date'");
    }
    std::vector<Date> starts;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        auto fail = [&](const std::string& msg) {
            throw LoadError("bin override line " + std::to_string(r.line) + ": " + msg);
        };
        if (r.fields.size() != 2) {
            fail("expected 2 fields");
        }
        std::size_t bin = 0;
        const auto& b = r.fields[0];
        auto res = std::from_chars(b.data(), b.data() + b.size(), bin);
        if (res.ec != std::errc{} || res.ptr != b.data() + b.size() || bin != starts.size() + 1) {
            fail("bins must be numbered 1..n in order");
        }
        auto d = Date::parse(r.fields[1]);
        if (!d) {
            fail("bad start_date '" + r.fields[1] + "'");
        }
        starts.push_back(*d);
    }
    try {
        return BinGrid::from_starts(std::move(starts), end);
    } catch (const InvalidInput& e) {
        throw LoadError(std::string("bin override: ") + e.what());
    }
}

BinGrid load_bin_overrides(const std::filesystem::path& path, Date end) {
    return parse_bin_overrides(read_text_file(path), end);
}

std::size_t BinAssignment::accepted() const {
    std::size_t n = 0;
    for (const auto& b : bins) {
        n += b.record_ids.size();
    }
    return n;
}

BinAssignment assign_bins(const std::vector<VideoRecord>& records, const BinGrid& grid) {
    BinAssignment out;
    for (std::size_t i = 1; i <= grid.size(); ++i) {
        TimeBin b;
        b.index = i;
        b.start_date = grid.start_date(i);
        b.last_date = grid.last_date(i);
        out.bins.push_back(std::move(b));
    }
    for (const auto& r : records) {
        if (auto bin = grid.bin_of(r.publish_date)) {
            out.bins[*bin - 1].record_ids.push_back(r.id);
        } else {
            out.rejects.push_back({r.id, r.publish_date,
                                   r.publish_date < grid.anchor() ? "before anchor" : "after end"});
        }
    }
    return out;
}

std::optional<ProsodyVector> bin_average(std::span<const ProsodyVector> vectors) {
    if (vectors.empty()) {
        return std::nullopt;
    }
    DescriptorVector sum = DescriptorVector::Zero();
    DescriptorVector lo = vectors.front().values;
    DescriptorVector hi = lo;
    for (const auto& v : vectors) {
        sum += v.values;
        lo = lo.cwiseMin(v.values);
        hi = hi.cwiseMax(v.values);
    }
    ProsodyVector out;
    out.values = sum / static_cast<double>(vectors.size());
    // Identical inputs average to themselves exactly.
    for (int i = 0; i < kDescriptorCount; ++i) {
        if (lo(i) == hi(i)) {
            out.values(i) = lo(i);
        }
    }
    return out;
}

std::vector<EventSeries> load_event_series(const std::filesystem::path& path) {
    const auto rows = csv::read_with_header(path, event_header());
    std::vector<EventSeries> out{{"new_cases", {}}, {"new_deaths", {}}, {"hospitalized", {}}};
    for (const auto& r : rows) {
        auto fail = [&](const std::string& msg) {
            throw LoadError(path.string() + ":" + std::to_string(r.line) + ": " + msg);
        };
        auto d = Date::parse(r.fields[0]);
        if (!d) {
            fail("malformed date '" + r.fields[0] + "'");
        }
        for (std::size_t k = 0; k < 3; ++k) {
            const auto& f = r.fields[k + 1];
            if (!f.empty() && f.front() == '-') {
                fail("negative count in " + out[k].name);
            }
            std::uint64_t v = 0;
            auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
                fail("bad count '" + f + "' in " + out[k].name);
            }
            if (!out[k].values.emplace(*d, v).second) {
                fail("duplicate date " + d->iso());
            }
        }
    }
    return out;
}

std::vector<std::optional<double>> weekly_aggregate(const EventSeries& series, const BinGrid& grid,
                                                    Aggregation how) {
    if (series.values.empty()) {
        throw InvalidInput("weekly_aggregate: series '" + series.name + "' is empty");
    }
    std::vector<double> sums(grid.size(), 0.0);
    std::vector<std::size_t> days(grid.size(), 0);
    for (const auto& [date, count] : series.values) {
        if (auto bin = grid.bin_of(date)) {
            sums[*bin - 1] += static_cast<double>(count);
            ++days[*bin - 1];
        }
    }
    std::vector<std::optional<double>> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (how == Aggregation::Sum) {
            out[i] = sums[i];
        } else if (days[i] > 0) {
            out[i] = sums[i] / static_cast<double>(days[i]);
        }
    }
    return out;
}

std::vector<std::size_t> coverage(const EventSeries& series, const BinGrid& grid) {
    std::vector<std::size_t> out(grid.size(), 0);
    for (const auto& [date, count] : series.values) {
        if (auto bin = grid.bin_of(date)) {
            ++out[*bin - 1];
        }
    }
    return out;
}

PeakSet detect_peaks(std::string name, std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 3) {
        throw InvalidInput("detect_peaks: need at least 3 bins, got " + std::to_string(n));
    }
    PeakSet out{std::move(name), n, {}};
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[j + 1] == values[i]) {
            ++j;
        }
        const bool left_lower = i == 0 || values[i - 1] < values[i];
        const bool right_lower = j + 1 == n || values[j + 1] < values[i];
        if (left_lower && right_lower && !(i == 0 && j + 1 == n)) {
            out.indices.push_back(i + 1);
        }
        i = j + 1;
    }
    return out;
}

PeakResult detect_peaks(const Trajectory& trajectory) {
    std::vector<double> dense;
    dense.reserve(trajectory.values.size());
    for (std::size_t i = 0; i < trajectory.values.size(); ++i) {
        if (!trajectory.values[i]) {
            return {std::nullopt, "series '" + trajectory.name + "' skipped: bin " +
                                      std::to_string(i + 1) + " has no data"};
        }
        dense.push_back(*trajectory.values[i]);
    }
    if (dense.size() < 3) {
        return {std::nullopt, "series '" + trajectory.name + "' skipped: fewer than 3 bins"};
    }
    return {detect_peaks(trajectory.name, dense), {}};
}

AlignmentReport align_report(const std::vector<PeakSet>& feature_peaks,
                             const std::vector<PeakSet>& event_peaks, std::size_t tolerance_bins) {
    AlignmentReport report;
    report.tolerance_bins = tolerance_bins;
    std::optional<std::size_t> n_bins;
    for (const auto* side : {&feature_peaks, &event_peaks}) {
        for (const auto& p : *side) {
            if (n_bins && *n_bins != p.n_bins) {
                throw InvalidInput("align_report: series '" + p.series + "' has " +
                                   std::to_string(p.n_bins) + " bins, expected " +
                                   std::to_string(*n_bins));
            }
            n_bins = p.n_bins;
        }
    }
    report.n_bins = n_bins.value_or(0);

    std::vector<std::vector<bool>> event_hit;
    for (const auto& e : event_peaks) {
        event_hit.emplace_back(e.indices.size(), false);
    }
    for (const auto& f : feature_peaks) {
        for (std::size_t fb : f.indices) {
            bool hit = false;
            for (std::size_t ei = 0; ei < event_peaks.size(); ++ei) {
                const auto& e = event_peaks[ei];
                for (std::size_t k = 0; k < e.indices.size(); ++k) {
                    const long offset = static_cast<long>(e.indices[k]) - static_cast<long>(fb);
                    if (static_cast<std::size_t>(std::abs(offset)) <= tolerance_bins) {
                        report.matches.push_back({f.series, fb, e.series, e.indices[k], offset});
                        event_hit[ei][k] = true;
                        hit = true;
                    }
                }
            }
            if (!hit) {
                report.unmatched_features.push_back({f.series, fb});
            }
        }
    }
    for (std::size_t ei = 0; ei < event_peaks.size(); ++ei) {
        for (std::size_t k = 0; k < event_peaks[ei].indices.size(); ++k) {
            if (!event_hit[ei][k]) {
                report.unmatched_events.push_back({event_peaks[ei].series, event_peaks[ei].indices[k]});
            }
        }
    }
    return report;
}

}  // namespace vlogcues
