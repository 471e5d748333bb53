#include "vlogcues/config.hpp"

#include "vlogcues/csv.hpp"
#include "vlogcues/errors.hpp"

#include <charconv>
#include <functional>
#include <sstream>

namespace vlogcues {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <typename T>
T number(const std::string& key, const std::string& value) {
    T out{};
    auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (value.empty() || res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
        throw InvalidInput("config '" + key + "': bad number '" + value + "'");
    }
    return out;
}

std::vector<std::string> list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

bool boolean(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw InvalidInput("config '" + key + "': expected true/false, got '" + value + "'");
}

std::optional<std::filesystem::path> path_or_none(const std::string& value) {
    if (value.empty()) {
        return std::nullopt;
    }
    return std::filesystem::path(value);
}

}  // namespace

void PipelineConfig::set(const std::string& raw_key, const std::string& raw_value) {
    const auto key = trim(raw_key);
    const auto value = trim(raw_value);
    using Setter = std::function<void()>;
    const std::map<std::string, Setter> setters{
        {"anchor", [&] { anchor = Date::from_iso(value); }},
        {"end", [&] { end = Date::from_iso(value); }},
        {"width_days", [&] { width_days = number<int>(key, value); }},
        {"trailing_days",
         [&] {
             if (value == "merge") {
                 trailing = TrailingDays::MergeIntoLast;
             } else if (value == "separate") {
                 trailing = TrailingDays::SeparateBin;
             } else {
                 throw InvalidInput("config 'trailing_days': expected merge or separate");
             }
         }},
        {"bin_overrides", [&] { bin_overrides = path_or_none(value); }},
        {"threshold", [&] { threshold = number<double>(key, value); }},
        {"window_ms", [&] { window_ms = number<double>(key, value); }},
        {"embedding_dim", [&] { embedding_dim = number<int>(key, value); }},
        {"embeddings_dir", [&] { embeddings_dir = path_or_none(value); }},
        {"frame_ms", [&] { frame_ms = number<double>(key, value); }},
        {"hop_ms", [&] { hop_ms = number<double>(key, value); }},
        {"f0_min", [&] { f0_min_hz = number<double>(key, value); }},
        {"f0_max", [&] { f0_max_hz = number<double>(key, value); }},
        {"zcr_extrema",
         [&] {
             if (value == "window") {
                 zcr_extrema = ZcrExtremaMode::PerWindow;
             } else if (value == "global") {
                 zcr_extrema = ZcrExtremaMode::Global;
             } else {
                 throw InvalidInput("config 'zcr_extrema': expected window or global");
             }
         }},
        {"location_tokens", [&] { location_tokens = list(value); }},
        {"location_substrings", [&] { location_substrings = list(value); }},
        {"validated_ids", [&] { validated_ids = path_or_none(value); }},
        {"target_words", [&] { target_words = list(value); }},
        {"stopwords", [&] { stopwords = path_or_none(value); }},
        {"top_k", [&] { top_k = number<std::size_t>(key, value); }},
        {"event_aggregation",
         [&] {
             if (value == "sum") {
                 event_aggregation = Aggregation::Sum;
             } else if (value == "mean") {
                 event_aggregation = Aggregation::Mean;
             } else {
                 throw InvalidInput("config 'event_aggregation': expected sum or mean");
             }
         }},
        {"peak_tolerance", [&] { peak_tolerance = number<std::size_t>(key, value); }},
        {"metadata", [&] { metadata = path_or_none(value); }},
        {"audio_root", [&] { audio_root = path_or_none(value); }},
        {"references", [&] { references = path_or_none(value); }},
        {"events", [&] { events = path_or_none(value); }},
        {"features", [&] { features = path_or_none(value); }},
        {"out", [&] { out_dir = value; }},
        {"write_masks", [&] { write_masks = boolean(key, value); }},
        {"workers", [&] { workers = number<std::size_t>(key, value); }},
    };
    auto it = setters.find(key);
    if (it == setters.end()) {
        throw InvalidInput("unknown config key '" + key + "'");
    }
    it->second();
}

void PipelineConfig::validate() const {
    auto require = [](bool ok, const char* msg) {
        if (!ok) {
            throw InvalidInput(std::string("config: ") + msg);
        }
    };
    require(!(end < anchor), "anchor must not be after end");
    require(width_days > 0, "width_days must be positive");
    require(threshold >= -1.0 && threshold <= 1.0, "threshold must lie in [-1, 1]");
    require(window_ms > 0 && frame_ms > 0 && hop_ms > 0, "durations must be positive");
    require(hop_ms <= frame_ms && frame_ms <= window_ms, "need hop_ms <= frame_ms <= window_ms");
    require(embedding_dim > 0 && embedding_dim % 2 == 0, "embedding_dim must be positive and even");
    require(f0_min_hz > 0 && f0_min_hz < f0_max_hz, "need 0 < f0_min < f0_max");
    require(!target_words.empty(), "target_words must not be empty");
    require(top_k > 0, "top_k must be positive");
    require(workers > 0, "workers must be positive");
    require(!location_tokens.empty() || !location_substrings.empty(),
            "at least one location keyword is required");
}

BinGrid PipelineConfig::grid() const {
    if (bin_overrides) {
        return load_bin_overrides(*bin_overrides, end);
    }
    return BinGrid::uniform(anchor, end, width_days, trailing);
}

DiarizationOptions PipelineConfig::diarization() const {
    DiarizationOptions o;
    o.threshold = threshold;
    o.window_ms = window_ms;
    o.embedder.dim = embedding_dim;
    o.embedder.frame = {frame_ms, hop_ms};
    return o;
}

ProsodyOptions PipelineConfig::prosody() const {
    ProsodyOptions o;
    o.frame = {frame_ms, hop_ms};
    o.pitch = {f0_min_hz, f0_max_hz};
    o.zcr_extrema = zcr_extrema;
    return o;
}

std::filesystem::path PipelineConfig::features_path() const {
    return features ? *features : out_dir / "features.csv";
}

PipelineConfig parse_config(const std::string& text, PipelineConfig base) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidInput("config line " + std::to_string(line_no) + ": expected key = value");
        }
        try {
            base.set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const InvalidInput& e) {
            throw InvalidInput("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
    return parse_config(read_text_file(path), std::move(base));
}

}  // namespace vlogcues
