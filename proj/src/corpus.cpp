#include "vlogcues/corpus.hpp"

#include "vlogcues/csv.hpp"
#include "vlogcues/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <unordered_set>

namespace vlogcues {

QueryGrid default_query_grid() {
    return {{"quarantine", "covid-19", "pandemic"},
            {"vlog", "vlogger", "vlogging"},
            {"New York", "NY"}};
}

std::vector<std::string> generate_queries(const QueryGrid& grid) {
    if (grid.events.empty() || grid.behaviors.empty() || grid.locations.empty()) {
        throw InvalidInput("generate_queries: every component list must be nonempty");
    }
    std::vector<std::string> out;
    out.reserve(grid.events.size() * grid.behaviors.size() * grid.locations.size());
    for (const auto& e : grid.events) {
        for (const auto& b : grid.behaviors) {
            for (const auto& l : grid.locations) {
                out.push_back(e + " " + b + " " + l);
            }
        }
    }
    return out;
}

std::vector<VideoRecord> dedupe(const std::vector<VideoRecord>& records) {
    std::unordered_set<std::string> seen;
    std::vector<VideoRecord> out;
    for (const auto& r : records) {
        if (seen.insert(r.id).second) {
            out.push_back(r);
        }
    }
    return out;
}

std::vector<VideoRecord> filter_date_range(const std::vector<VideoRecord>& records, Date start,
                                           Date end) {
    if (end < start) {
        throw InvalidInput("filter_date_range: start after end");
    }
    std::vector<VideoRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out), [&](const auto& r) {
        return start <= r.publish_date && r.publish_date <= end;
    });
    return out;
}

namespace {

bool is_delimiter(unsigned char c) {
    return std::isspace(c) || std::ispunct(c);
}

bool has_token(const std::string& text, const std::string& token) {
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
        const std::size_t end = pos + token.size();
        const bool left = pos == 0 || is_delimiter(static_cast<unsigned char>(text[pos - 1]));
        const bool right =
            end == text.size() || is_delimiter(static_cast<unsigned char>(text[end]));
        if (left && right) {
            return true;
        }
        ++pos;
    }
    return false;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

std::vector<VideoRecord> filter_location(const std::vector<VideoRecord>& records,
                                         const std::vector<std::string>& exact_tokens,
                                         const std::vector<std::string>& substrings) {
    if (exact_tokens.empty() && substrings.empty()) {
        throw InvalidInput("filter_location: no keywords given");
    }
    std::vector<std::string> lowered_subs;
    for (const auto& s : substrings) {
        lowered_subs.push_back(lower(s));
    }
    std::vector<VideoRecord> out;
    for (const auto& r : records) {
        bool keep = false;
        for (const auto& t : exact_tokens) {
            if (!t.empty() && (has_token(r.title, t) || has_token(r.description, t))) {
                keep = true;
                break;
            }
        }
        if (!keep && !lowered_subs.empty()) {
            const auto title = lower(r.title);
            const auto desc = lower(r.description);
            for (const auto& s : lowered_subs) {
                if (!s.empty() && (title.find(s) != std::string::npos ||
                                   desc.find(s) != std::string::npos)) {
                    keep = true;
                    break;
                }
            }
        }
        if (keep) {
            out.push_back(r);
        }
    }
    return out;
}

double cohens_kappa(const AnnotationPair& pair) {
    const auto& a = pair.labels_a;
    const auto& b = pair.labels_b;
    if (a.size() != b.size()) {
        throw InvalidInput("cohens_kappa: label sequences differ in length");
    }
    if (a.empty()) {
        throw InvalidInput("cohens_kappa: no items");
    }
    const double n = static_cast<double>(a.size());
    std::map<std::string, std::size_t> count_a, count_b;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++count_a[a[i]];
        ++count_b[b[i]];
        agree += a[i] == b[i];
    }
    const double p_o = static_cast<double>(agree) / n;
    double p_e = 0.0;
    for (const auto& [label, ca] : count_a) {
        auto it = count_b.find(label);
        if (it != count_b.end()) {
            p_e += (static_cast<double>(ca) / n) * (static_cast<double>(it->second) / n);
        }
    }
    if (p_e >= 1.0) {
        // Both annotators used one and the same label throughout.
        return p_o >= 1.0 ? 1.0 : 0.0;
    }
    if (agree == a.size()) {
        return 1.0;
    }
    return (p_o - p_e) / (1.0 - p_e);
}

// ---- file formats --------------------------------------------------------

namespace {

template <typename T>
T parse_number(const std::string& field, const char* name, std::size_t line,
               const std::filesystem::path& path) {
    T value{};
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto res = std::from_chars(first, last, value);
    if (field.empty() || res.ec != std::errc{} || res.ptr != last) {
        throw LoadError(path.string() + ":" + std::to_string(line) + ": bad " + name + " '" +
                        field + "'");
    }
    return value;
}

}  // namespace

std::vector<VideoRecord> load_metadata(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        return {};
    }
    auto rows = csv::read_with_header(path, metadata_header());
    std::vector<VideoRecord> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        const auto& f = row.fields;
        VideoRecord r;
        r.id = f[0];
        if (r.id.empty()) {
            throw LoadError(path.string() + ":" + std::to_string(row.line) + ": empty id");
        }
        r.title = f[1];
        r.description = f[2];
        auto date = Date::parse(f[3]);
        if (!date) {
            throw LoadError(path.string() + ":" + std::to_string(row.line) +
                            ": bad publish_date '" + f[3] + "'");
        }
        r.publish_date = *date;
        r.duration_s = f[4].empty() ? 0.0 : parse_number<double>(f[4], "duration_s", row.line, path);
        if (!(r.duration_s >= 0.0)) {
            throw LoadError(path.string() + ":" + std::to_string(row.line) +
                            ": negative duration_s");
        }
        r.views = f[5].empty() ? 0 : parse_number<std::uint64_t>(f[5], "views", row.line, path);
        r.upvotes = f[6].empty() ? 0 : parse_number<std::uint64_t>(f[6], "upvotes", row.line, path);
        r.downvotes =
            f[7].empty() ? 0 : parse_number<std::uint64_t>(f[7], "downvotes", row.line, path);
        if (!f[8].empty()) {
            r.audio_path = f[8];
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string metadata_to_csv(const std::vector<VideoRecord>& records) {
    std::string out = csv::join(metadata_header()) + "\n";
    for (const auto& r : records) {
        out += csv::join({r.id, r.title, r.description, r.publish_date.iso(),
                          csv::format_number(r.duration_s), std::to_string(r.views),
                          std::to_string(r.upvotes), std::to_string(r.downvotes),
                          r.audio_path.value_or("")});
        out += "\n";
    }
    return out;
}

AnnotationPair load_annotations(const std::filesystem::path& path) {
    auto rows = csv::read_with_header(path, {"id", "label_a", "label_b"});
    AnnotationPair pair;
    for (const auto& row : rows) {
        pair.labels_a.push_back(row.fields[1]);
        pair.labels_b.push_back(row.fields[2]);
    }
    return pair;
}

}  // namespace vlogcues
