#include "vlogcues/pipeline.hpp"

#include "vlogcues/audio.hpp"
#include "vlogcues/csv.hpp"
#include "vlogcues/diarization.hpp"
#include "vlogcues/errors.hpp"
#include "vlogcues/linguistics.hpp"

#include <json.hpp>

#include <atomic>
#include <charconv>
#include <set>
#include <sstream>
#include <thread>

namespace vlogcues {

using json = nlohmann::ordered_json;

namespace {

std::vector<std::string> dropped(const std::vector<VideoRecord>& before,
                                 const std::vector<VideoRecord>& after) {
    std::multiset<std::string> kept;
    for (const auto& r : after) {
        kept.insert(r.id);
    }
    std::vector<std::string> out;
    for (const auto& r : before) {
        auto it = kept.find(r.id);
        if (it == kept.end()) {
            out.push_back(r.id);
        } else {
            kept.erase(it);
        }
    }
    return out;
}

void require_path(const std::optional<std::filesystem::path>& p, const char* key) {
    if (!p) {
        throw InvalidInput(std::string("missing required setting '") + key + "'");
    }
    if (!std::filesystem::exists(*p)) {
        throw InvalidInput(std::string(key) + " file '" + p->string() + "' does not exist");
    }
}

std::string opt_number(const std::optional<double>& v) {
    return v ? csv::format_number(*v) : std::string();
}

}  // namespace

// ---- scan -----------------------------------------------------------------

ScanResult scan(const std::vector<VideoRecord>& records, const PipelineConfig& config) {
    ScanResult out;
    out.input = records.size();
    auto stage = [&](const char* name, const std::vector<VideoRecord>& before,
                     std::vector<VideoRecord> after) {
        out.stages.push_back({name, after.size(), dropped(before, after)});
        return after;
    };
    auto current = stage("dedupe", records, dedupe(records));
    current = stage("date_range", current, filter_date_range(current, config.anchor, config.end));
    if (config.validated_ids) {
        std::set<std::string> valid;
        std::istringstream in(read_text_file(*config.validated_ids));
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (!line.empty()) {
                valid.insert(line);
            }
        }
        std::vector<VideoRecord> next;
        for (const auto& r : current) {
            if (valid.contains(r.id)) {
                next.push_back(r);
            }
        }
        current = stage("validated", current, std::move(next));
    }
    current = stage("location", current,
                    filter_location(current, config.location_tokens, config.location_substrings));
    out.kept = std::move(current);
    return out;
}

ScanResult cmd_scan(const PipelineConfig& config) {
    config.validate();
    require_path(config.metadata, "metadata");
    const auto records = load_metadata(*config.metadata);
    auto result = scan(records, config);

    json report;
    report["input"] = result.input;
    json stages = json::array();
    for (const auto& s : result.stages) {
        stages.push_back({{"stage", s.name}, {"kept", s.kept},
                          {"dropped", s.dropped_ids.size()}, {"dropped_ids", s.dropped_ids}});
    }
    report["stages"] = stages;
    report["output"] = result.kept.size();

    write_file_atomic(config.out_dir / "filtered_metadata.csv", metadata_to_csv(result.kept));
    write_file_atomic(config.out_dir / "scan_report.json", report.dump(2) + "\n");
    return result;
}

// ---- extract --------------------------------------------------------------

std::map<std::string, ReferenceSpan> load_references(const std::filesystem::path& path) {
    const auto rows = csv::read_with_header(path, {"id", "start_ms", "end_ms"});
    std::map<std::string, ReferenceSpan> out;
    for (const auto& r : rows) {
        auto num = [&](const std::string& f) {
            double v = 0.0;
            auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
                throw LoadError(path.string() + ":" + std::to_string(r.line) + ": bad time '" + f + "'");
            }
            return v;
        };
        ReferenceSpan span{num(r.fields[1]), num(r.fields[2])};
        if (!(span.start_ms >= 0.0) || !(span.end_ms > span.start_ms)) {
            throw LoadError(path.string() + ":" + std::to_string(r.line) +
                            ": need 0 <= start_ms < end_ms");
        }
        if (!out.emplace(r.fields[0], span).second) {
            throw LoadError(path.string() + ":" + std::to_string(r.line) + ": duplicate id '" +
                            r.fields[0] + "'");
        }
    }
    return out;
}

namespace {

struct Outcome {
    std::optional<ProsodyVector> vector;
    std::string skip_reason;
    std::string mask_csv;
};

std::filesystem::path resolve_audio(const VideoRecord& r, const PipelineConfig& config) {
    std::filesystem::path p = r.audio_path ? std::filesystem::path(*r.audio_path)
                                           : std::filesystem::path(r.id + ".wav");
    if (p.is_relative() && config.audio_root) {
        p = *config.audio_root / p;
    }
    return p;
}

Outcome process_record(const VideoRecord& r, const std::map<std::string, ReferenceSpan>& refs,
                       const PipelineConfig& config) {
    Outcome o;
    auto ref_it = refs.find(r.id);
    if (ref_it == refs.end()) {
        o.skip_reason = "no reference segment";
        return o;
    }
    AudioBuffer audio;
    try {
        audio = load_audio(resolve_audio(r, config));
    } catch (const DecodeError& e) {
        o.skip_reason = std::string("audio: ") + e.what();
        return o;
    }
    ReferenceSegment ref{slice(audio, ms_to_samples(ref_it->second.start_ms, audio.sample_rate_hz),
                               ms_to_samples(ref_it->second.end_ms, audio.sample_rate_hz))};
    try {
        ref.validate();
    } catch (const InvalidInput& e) {
        o.skip_reason = std::string("reference: ") + e.what();
        return o;
    }
    ExternalEmbeddings external;
    if (config.embeddings_dir) {
        const auto emb = *config.embeddings_dir / (r.id + ".emb");
        if (std::filesystem::exists(emb)) {
            try {
                external = load_external_embeddings(emb);
            } catch (const LoadError& e) {
                o.skip_reason = std::string("embeddings: ") + e.what();
                return o;
            }
        }
    }
    try {
        const auto mask = diarize(audio, ref, config.diarization(), &external);
        if (config.write_masks) {
            o.mask_csv = mask_to_csv(mask);
        }
        if (mask.no_analyzable_audio()) {
            o.skip_reason = "no analyzable audio";
            return o;
        }
        o.vector = prosody_vector(audio, mask, config.prosody());
    } catch (const NoSpeechRetained&) {
        o.skip_reason = "no speech retained";
    } catch (const InvalidInput& e) {
        o.skip_reason = e.what();
    }
    return o;
}

std::vector<Outcome> run_all(const std::vector<VideoRecord>& records,
                             const std::map<std::string, ReferenceSpan>& refs,
                             const PipelineConfig& config) {
    std::vector<Outcome> outcomes(records.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < records.size(); i = next++) {
            outcomes[i] = process_record(records[i], refs, config);
        }
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(config.workers, records.size()));
    if (n == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n; ++t) {
            pool.emplace_back(work);
        }
    }
    return outcomes;
}

}  // namespace

ExtractResult extract(const std::vector<VideoRecord>& records,
                      const std::map<std::string, ReferenceSpan>& references,
                      const PipelineConfig& config) {
    const auto outcomes = run_all(records, references, config);
    ExtractResult out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (outcomes[i].vector) {
            out.rows.push_back({records[i].id, *outcomes[i].vector});
        } else {
            out.skips.push_back({records[i].id, outcomes[i].skip_reason});
        }
    }
    return out;
}

std::vector<std::string> feature_header() {
    std::vector<std::string> h{"id"};
    for (auto name : kDescriptorNames) {
        h.emplace_back(name);
    }
    return h;
}

std::string features_to_csv(const std::vector<FeatureRow>& rows) {
    std::string out = csv::join(feature_header()) + "\n";
    for (const auto& r : rows) {
        csv::Row fields{r.id};
        for (int i = 0; i < kDescriptorCount; ++i) {
            fields.push_back(csv::format_number(r.vector.values(i)));
        }
        out += csv::join(fields) + "\n";
    }
    return out;
}

std::vector<FeatureRow> load_features(const std::filesystem::path& path) {
    const auto rows = csv::read_with_header(path, feature_header());
    std::vector<FeatureRow> out;
    for (const auto& r : rows) {
        FeatureRow row{r.fields[0], {}};
        for (int i = 0; i < kDescriptorCount; ++i) {
            const auto& f = r.fields[static_cast<std::size_t>(i) + 1];
            double v = 0.0;
            auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || res.ec != std::errc{} || res.ptr != f.data() + f.size() ||
                !std::isfinite(v)) {
                throw LoadError(path.string() + ":" + std::to_string(r.line) + ": bad value '" +
                                f + "' for " + std::string(kDescriptorNames[static_cast<std::size_t>(i)]));
            }
            row.vector.values(i) = v;
        }
        out.push_back(std::move(row));
    }
    return out;
}

ExtractResult cmd_extract(const PipelineConfig& config) {
    config.validate();
    require_path(config.metadata, "metadata");
    require_path(config.references, "references");
    const auto records = load_metadata(*config.metadata);
    const auto refs = load_references(*config.references);

    std::vector<Outcome> outcomes = run_all(records, refs, config);
    ExtractResult out;
    std::string skips = "id,reason\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (outcomes[i].vector) {
            out.rows.push_back({records[i].id, *outcomes[i].vector});
        } else {
            out.skips.push_back({records[i].id, outcomes[i].skip_reason});
            skips += csv::join({records[i].id, outcomes[i].skip_reason}) + "\n";
        }
        if (config.write_masks && !outcomes[i].mask_csv.empty()) {
            write_file_atomic(config.out_dir / "masks" / (records[i].id + ".csv"),
                              outcomes[i].mask_csv);
        }
    }
    write_file_atomic(config.out_dir / "features.csv", features_to_csv(out.rows));
    write_file_atomic(config.out_dir / "extract_skips.csv", skips);
    return out;
}

// ---- words ----------------------------------------------------------------

namespace {

StopwordSet stopwords_of(const PipelineConfig& config) {
    return config.stopwords ? load_stopwords(*config.stopwords) : StopwordSet{};
}

void fill_word_tables(BinAssignment& bins, const std::vector<VideoRecord>& records,
                      const StopwordSet& stop) {
    std::map<std::string, const VideoRecord*> by_id;
    for (const auto& r : records) {
        by_id.emplace(r.id, &r);
    }
    for (auto& b : bins.bins) {
        std::vector<VideoRecord> members;
        for (const auto& id : b.record_ids) {
            members.push_back(*by_id.at(id));
        }
        if (!members.empty()) {
            b.word_table = word_freq(members, stop);
        }
    }
}

Trajectory target_of(const BinAssignment& bins, const std::vector<std::string>& targets) {
    std::vector<std::optional<WordTable>> tables;
    for (const auto& b : bins.bins) {
        tables.push_back(b.word_table);
    }
    return {"target_words", target_trajectory(tables, targets)};
}

std::string word_freq_csv(const BinAssignment& bins) {
    std::string out = "bin,word,frequency\n";
    for (const auto& b : bins.bins) {
        if (!b.word_table) {
            continue;
        }
        for (const auto& [w, f] : top_k(*b.word_table, b.word_table->counts().size() + 1)) {
            out += std::to_string(b.index) + "," + csv::escape(w) + "," + csv::format_number(f) + "\n";
        }
    }
    return out;
}

std::string top_words_csv(const BinAssignment& bins, std::size_t k) {
    std::string out = "bin,start_date,rank,word,frequency\n";
    for (const auto& b : bins.bins) {
        if (!b.word_table) {
            continue;
        }
        std::size_t rank = 1;
        for (const auto& [w, f] : top_k(*b.word_table, k)) {
            out += std::to_string(b.index) + "," + b.start_date.iso() + "," + std::to_string(rank++) +
                   "," + csv::escape(w) + "," + csv::format_number(f) + "\n";
        }
    }
    return out;
}

std::string trajectory_csv(const BinAssignment& bins, const Trajectory& t) {
    std::string out = "bin,start_date," + t.name + "\n";
    for (std::size_t i = 0; i < bins.bins.size(); ++i) {
        out += std::to_string(bins.bins[i].index) + "," + bins.bins[i].start_date.iso() + "," +
               opt_number(t.values[i]) + "\n";
    }
    return out;
}

}  // namespace

WordsResult words(const std::vector<VideoRecord>& records, const PipelineConfig& config) {
    WordsResult out;
    out.bins = assign_bins(records, config.grid());
    fill_word_tables(out.bins, records, stopwords_of(config));
    out.target = target_of(out.bins, config.target_words);
    return out;
}

WordsResult cmd_words(const PipelineConfig& config) {
    config.validate();
    require_path(config.metadata, "metadata");
    const auto records = load_metadata(*config.metadata);
    auto result = words(records, config);
    write_file_atomic(config.out_dir / "word_freq.csv", word_freq_csv(result.bins));
    write_file_atomic(config.out_dir / "top_words.csv", top_words_csv(result.bins, config.top_k));
    write_file_atomic(config.out_dir / "target_trajectory.csv",
                      trajectory_csv(result.bins, result.target));
    return result;
}

// ---- report ---------------------------------------------------------------

ReportResult report(const std::vector<VideoRecord>& records, const std::vector<FeatureRow>& features,
                    const std::vector<EventSeries>& events, const PipelineConfig& config) {
    const auto grid = config.grid();
    ReportResult out;
    out.bins = assign_bins(records, grid);

    for (const auto& e : events) {
        const auto cov = coverage(e, grid);
        for (std::size_t i = 0; i < cov.size(); ++i) {
            if (cov[i] == 0) {
                throw InvalidInput("grid mismatch: event series '" + e.name + "' has no days in bin " +
                                   std::to_string(i + 1) + " (" + grid.start_date(i + 1).iso() +
                                   " .. " + grid.last_date(i + 1).iso() + ")");
            }
        }
    }

    std::map<std::string, const ProsodyVector*> by_id;
    for (const auto& f : features) {
        by_id.emplace(f.id, &f.vector);
    }
    for (auto& b : out.bins.bins) {
        std::vector<ProsodyVector> vs;
        for (const auto& id : b.record_ids) {
            if (auto it = by_id.find(id); it != by_id.end()) {
                vs.push_back(*it->second);
            }
        }
        b.mean_vector = bin_average(vs);
    }
    fill_word_tables(out.bins, records, stopwords_of(config));

    for (int d = 0; d < kDescriptorCount; ++d) {
        Trajectory t{std::string(kDescriptorNames[static_cast<std::size_t>(d)]), {}};
        for (const auto& b : out.bins.bins) {
            t.values.push_back(b.mean_vector ? std::optional<double>(b.mean_vector->values(d))
                                             : std::nullopt);
        }
        out.feature_trajectories.push_back(std::move(t));
    }
    out.feature_trajectories.push_back(target_of(out.bins, config.target_words));
    for (const auto& e : events) {
        out.event_trajectories.push_back({e.name, weekly_aggregate(e, grid, config.event_aggregation)});
    }

    auto peaks_of = [&](const std::vector<Trajectory>& ts, std::vector<PeakSet>& dst) {
        for (const auto& t : ts) {
            auto r = detect_peaks(t);
            if (r.peaks) {
                dst.push_back(std::move(*r.peaks));
            } else {
                out.diagnostics.push_back(r.diagnostic);
            }
        }
    };
    peaks_of(out.feature_trajectories, out.feature_peaks);
    peaks_of(out.event_trajectories, out.event_peaks);
    out.alignment = align_report(out.feature_peaks, out.event_peaks, config.peak_tolerance);
    out.alignment.n_bins = grid.size();
    return out;
}

std::string alignment_to_json(const ReportResult& r) {
    json j;
    j["n_bins"] = r.alignment.n_bins;
    j["tolerance_bins"] = r.alignment.tolerance_bins;
    json bins = json::array();
    for (const auto& b : r.bins.bins) {
        bins.push_back({{"bin", b.index}, {"start_date", b.start_date.iso()},
                        {"last_date", b.last_date.iso()}, {"n_records", b.record_ids.size()}});
    }
    j["bins"] = bins;
    auto peaks_json = [](const std::vector<PeakSet>& ps) {
        json o = json::object();
        for (const auto& p : ps) {
            o[p.series] = p.indices;
        }
        return o;
    };
    j["feature_peaks"] = peaks_json(r.feature_peaks);
    j["event_peaks"] = peaks_json(r.event_peaks);
    json matches = json::array();
    for (const auto& m : r.alignment.matches) {
        matches.push_back({{"feature_series", m.feature_series}, {"feature_bin", m.feature_bin},
                           {"event_series", m.event_series}, {"event_bin", m.event_bin},
                           {"offset", m.offset}});
    }
    j["matches"] = matches;
    auto unmatched_json = [](const std::vector<UnmatchedPeak>& us) {
        json a = json::array();
        for (const auto& u : us) {
            a.push_back({{"series", u.series}, {"bin", u.bin}});
        }
        return a;
    };
    j["unmatched_feature_peaks"] = unmatched_json(r.alignment.unmatched_features);
    j["unmatched_event_peaks"] = unmatched_json(r.alignment.unmatched_events);
    j["diagnostics"] = r.diagnostics;
    json rejects = json::array();
    for (const auto& x : r.bins.rejects) {
        rejects.push_back({{"id", x.id}, {"publish_date", x.publish_date.iso()}, {"reason", x.reason}});
    }
    j["rejected_records"] = rejects;
    return j.dump(2) + "\n";
}

ReportResult cmd_report(const PipelineConfig& config) {
    config.validate();
    require_path(config.metadata, "metadata");
    require_path(config.events, "events");
    const auto features_file = config.features_path();
    if (!std::filesystem::exists(features_file)) {
        throw InvalidInput("features file '" + features_file.string() +
                           "' does not exist (run extract first)");
    }
    const auto records = load_metadata(*config.metadata);
    const auto features = load_features(features_file);
    const auto events = load_event_series(*config.events);
    const auto result = report(records, features, events, config);

    // Everything is computed before the first write.
    std::string weekly = "bin,start_date,n_videos";
    for (auto name : kDescriptorNames) {
        weekly += "," + std::string(name);
    }
    weekly += "\n";
    std::map<std::string, bool> has_features;
    for (const auto& f : features) {
        has_features[f.id] = true;
    }
    for (const auto& b : result.bins.bins) {
        std::size_t n = 0;
        for (const auto& id : b.record_ids) {
            n += has_features.contains(id);
        }
        weekly += std::to_string(b.index) + "," + b.start_date.iso() + "," + std::to_string(n);
        for (int d = 0; d < kDescriptorCount; ++d) {
            weekly += "," + (b.mean_vector ? csv::format_number(b.mean_vector->values(d)) : std::string());
        }
        weekly += "\n";
    }

    std::string event_weekly = "bin,start_date";
    for (const auto& t : result.event_trajectories) {
        event_weekly += "," + t.name;
    }
    event_weekly += "\n";
    std::string trajectories = "bin,start_date";
    for (const auto* ts : {&result.feature_trajectories, &result.event_trajectories}) {
        for (const auto& t : *ts) {
            trajectories += "," + t.name;
        }
    }
    trajectories += "\n";
    for (std::size_t i = 0; i < result.bins.bins.size(); ++i) {
        const auto prefix =
            std::to_string(result.bins.bins[i].index) + "," + result.bins.bins[i].start_date.iso();
        event_weekly += prefix;
        for (const auto& t : result.event_trajectories) {
            event_weekly += "," + opt_number(t.values[i]);
        }
        event_weekly += "\n";
        trajectories += prefix;
        for (const auto* ts : {&result.feature_trajectories, &result.event_trajectories}) {
            for (const auto& t : *ts) {
                trajectories += "," + opt_number(t.values[i]);
            }
        }
        trajectories += "\n";
    }
    const auto target = result.feature_trajectories.back();

    write_file_atomic(config.out_dir / "weekly_features.csv", weekly);
    write_file_atomic(config.out_dir / "word_freq.csv", word_freq_csv(result.bins));
    write_file_atomic(config.out_dir / "top_words.csv", top_words_csv(result.bins, config.top_k));
    write_file_atomic(config.out_dir / "target_trajectory.csv", trajectory_csv(result.bins, target));
    write_file_atomic(config.out_dir / "event_weekly.csv", event_weekly);
    write_file_atomic(config.out_dir / "trajectories.csv", trajectories);
    write_file_atomic(config.out_dir / "alignment.json", alignment_to_json(result));
    return result;
}

}  // namespace vlogcues
