// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include "vlogcues/config.hpp"
#include "vlogcues/corpus.hpp"
#include "vlogcues/diarization.hpp"
#include "vlogcues/linguistics.hpp"
#include "vlogcues/pipeline.hpp"
#include "vlogcues/prosody.hpp"
#include "vlogcues/timeline.hpp"

#include "corpus_fixture.hpp"
#include "synth.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace vlogcues;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("vlogcues_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) {
            out[fs::relative(e.path(), dir).string()] = read_text_file(e.path());
        }
    }
    return out;
}

// 1. Every feature row has 18 ordered descriptors with zcr.min <= mean <= max
// and nonnegative perturbation measures.
Outcome c1_descriptor_contract() {
    Outcome o;
    const std::vector<std::string> order{
        "loudness_mean", "loudness_std", "loudness_skew", "loudness_slope", "zcr_mean",
        "zcr_std",       "zcr_skew",     "zcr_slope",     "jitter_mean",    "jitter_std",
        "jitter_skew",   "jitter_slope", "shimmer_mean",  "shimmer_std",    "shimmer_skew",
        "shimmer_slope", "zcr_min",      "zcr_max"};
    const auto full = feature_header();
    const std::vector<std::string> header(full.begin() + 1, full.end());
    o.require(header == order, "descriptor order");
    o.require(kDescriptorCount == 18, "descriptor count");

    std::mt19937 rng(1);
    for (int t = 0; t < 40; ++t) {
        synth::VoiceSpec v;
        v.f0_hz = 80.0 + 250.0 * synth::unit(rng);
        v.jitter = 0.05 * synth::unit(rng);
        v.shimmer = 0.2 * synth::unit(rng);
        v.amplitude = 0.05 + 0.9 * synth::unit(rng);
        auto rec = synth::voice(v, 1.0, rng());
        if (t % 3 == 0) {
            rec = synth::concat(rec, synth::white_noise(0.3, 0.5, rng()));
        }
        SpeechMask mask;
        const auto n = windows(rec.size(), rec.sample_rate_hz, kDefaultWindowMs).size();
        for (std::size_t i = 0; i < n; ++i) {
            mask.retained.push_back(rng() % 4 != 0 || i == 0);
            mask.start_ms.push_back(125.0 * static_cast<double>(i));
        }
        mask.similarity = VectorXd::Zero(static_cast<Index>(n));
        for (auto mode : {ZcrExtremaMode::PerWindow, ZcrExtremaMode::Global}) {
            ProsodyOptions opts;
            opts.zcr_extrema = mode;
            const auto p = prosody_vector(rec, mask, opts);
            o.require(p.values.size() == 18, "vector size");
            o.require(p.values.allFinite(), "finite");
            o.require(p[Descriptor::ZcrMin] <= p[Descriptor::ZcrMean] &&
                          p[Descriptor::ZcrMean] <= p[Descriptor::ZcrMax],
                      "zcr.min <= zcr.mean <= zcr.max");
            o.require(p[Descriptor::JitterMean] >= 0.0 && p[Descriptor::ShimmerMean] >= 0.0,
                      "jitter/shimmer >= 0");
        }
    }
    return o;
}

// 2. DSP primitives against brute-force oracles.
Outcome c2_dsp_oracles() {
    Outcome o;
    std::mt19937 rng(2);
    for (int t = 0; t < 150; ++t) {
        const auto n = static_cast<Index>(3 + rng() % 500);
        VectorXd x(n);
        for (Index i = 0; i < n; ++i) {
            x(i) = (2.0 * synth::unit(rng) - 1.0) * (t % 5 == 0 ? 1e-3 : 1.0);
            if (rng() % 17 == 0) {
                x(i) = 0.0;
            }
        }
        const auto v = synth::to_vector(x);
        o.require(synth::err(zero_crossing_rate(x), synth::oracle_zcr(v)) < 1e-9, "zcr");
        o.require(synth::err(rms(x), synth::oracle_rms(v)) < 1e-9, "rms");
        const auto s = descriptor_stats(x);
        const auto r = synth::oracle_stats(v);
        o.require(synth::err(s.mean, r.mean, 1e-9) < 1e-9, "mean");
        o.require(synth::err(s.std, r.std) < 1e-9, "std");
        o.require(synth::err(s.skewness, r.skew, 1e-6) < 1e-9, "skew");
        o.require(synth::err(s.slope, r.slope, 1e-9) < 1e-9, "slope");

        std::vector<FrameFeatures> fs;
        std::vector<double> periods, amps;
        for (int i = 0; i < 11; ++i) {
            FrameFeatures f;
            if (rng() % 4 != 0) {
                f.voiced = true;
                f.period_s = 0.0025 + 0.014 * synth::unit(rng);
                f.peak_amplitude = 0.01 + synth::unit(rng);
                periods.push_back(*f.period_s);
                amps.push_back(*f.peak_amplitude);
            }
            fs.push_back(f);
        }
        o.require(synth::err(jitter(fs), synth::oracle_perturbation(periods)) < 1e-9, "jitter");
        o.require(synth::err(shimmer(fs), synth::oracle_perturbation(amps)) < 1e-9, "shimmer");
    }
    for (int sr : {8000, 16000, 44100}) {
        for (double f0 = 60.0; f0 <= 400.0; f0 += 5.0) {
            const auto s = synth::sine(f0, 0.4, 0.125, sr, 0.3);
            for (const auto& fr : pitch_track(s.samples, sr)) {
                o.require(fr.voiced && std::abs(*fr.period_s * sr - sr / f0) <= 1.0,
                          "pitch within one sample at " + std::to_string(f0) + " Hz");
            }
        }
    }
    return o;
}

// 3. Diarization defaults, threshold monotonicity, two-source accuracy.
Outcome c3_diarization() {
    Outcome o;
    const PipelineConfig defaults;
    o.require(defaults.threshold == 0.65 && DiarizationOptions{}.threshold == 0.65, "threshold 0.65");
    o.require(defaults.window_ms == 125.0 && DiarizationOptions{}.window_ms == 125.0, "window 125 ms");

    std::mt19937 rng(3);
    for (int t = 0; t < 50; ++t) {
        const int dim = 2 * (1 + static_cast<int>(rng() % 16));
        VectorXd ref(dim);
        for (auto& v : ref) v = 2.0 * synth::unit(rng) - 1.0;
        SpeechMask m;
        m.similarity.resize(30);
        for (Index i = 0; i < 30; ++i) {
            VectorXd w(dim);
            for (auto& v : w) v = 2.0 * synth::unit(rng) - 1.0;
            m.similarity(i) = cosine_similarity(ref, w);
            m.retained.push_back(false);
            m.start_ms.push_back(125.0 * static_cast<double>(i));
        }
        const double lo = 2.0 * synth::unit(rng) - 1.0;
        const double hi = lo + (1.0 - lo) * synth::unit(rng);
        const auto a = apply_threshold(m, lo);
        const auto b = apply_threshold(m, hi);
        for (std::size_t i = 0; i < 30; ++i) {
            o.require(!b.retained[i] || a.retained[i], "monotone in threshold");
        }
    }

    synth::VoiceSpec spec;
    spec.f0_hz = 140.0;
    spec.jitter = 0.01;
    const auto rec = synth::concat(synth::voice(spec, 5.0, 105), synth::white_noise(0.3, 5.0, 5));
    const ReferenceSegment ref{synth::voice({140.0}, 5.0, 5)};
    const auto mask = diarize(rec, ref);
    int correct = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        correct += mask.retained[i] == (i < 40);
    }
    const double acc = correct / static_cast<double>(mask.size());
    o.require(mask.size() == 80 && acc >= 0.9, "two-source accuracy " + std::to_string(acc));
    return o;
}

// 4. Weekly grid and the per-week counts of the published corpus.
Outcome c4_binning() {
    Outcome o;
    const auto g = BinGrid::uniform(Date(2020, 3, 13), Date(2020, 6, 1), 7);
    o.require(g.size() == 11, "11 bins");
    const std::vector<std::pair<Date, std::size_t>> starts{
        {Date(2020, 3, 13), 1}, {Date(2020, 3, 20), 2}, {Date(2020, 3, 27), 3}, {Date(2020, 4, 3), 4},
        {Date(2020, 4, 10), 5}, {Date(2020, 4, 17), 6}, {Date(2020, 4, 24), 7}};
    for (const auto& [d, b] : starts) {
        o.require(g.bin_of(d) == b, d.iso() + " -> bin " + std::to_string(b));
    }

    const auto overrides = parse_bin_overrides(
        "bin,start_date\n1,2020-03-13\n2,2020-03-20\n3,2020-03-27\n4,2020-04-03\n5,2020-04-10\n"
        "6,2020-04-17\n7,2020-04-24\n8,2020-05-03\n9,2020-05-11\n10,2020-05-18\n11,2020-05-26\n",
        Date(2020, 6, 1));
    const std::vector<std::size_t> counts{20, 51, 23, 26, 30, 14, 10, 18, 28, 27, 31};
    std::vector<VideoRecord> rs;
    for (std::size_t b = 0; b < counts.size(); ++b) {
        const auto first = overrides.start_date(b + 1);
        const auto span = overrides.last_date(b + 1).days_since(first) + 1;
        for (std::size_t k = 0; k < counts[b]; ++k) {
            VideoRecord r;
            r.id = std::to_string(b) + "_" + std::to_string(k);
            r.publish_date = first.plus_days(static_cast<long>(k) % span);
            rs.push_back(r);
        }
    }
    const auto a = assign_bins(rs, overrides);
    o.require(a.bins.size() == 11 && a.rejects.empty(), "override grid");
    for (std::size_t b = 0; b < a.bins.size(); ++b) {
        o.require(a.bins[b].record_ids.size() == counts[b], "count in bin " + std::to_string(b + 1));
    }
    return o;
}

// 5. Day-20 and day-35 maxima land in weeks 3 and 5.
Outcome c5_event_peaks() {
    Outcome o;
    const auto g = BinGrid::uniform();
    for (const auto& [day, bin] : std::vector<std::pair<int, std::size_t>>{{20, 3}, {35, 5}}) {
        EventSeries s{"cases", {}};
        for (int d = 1; d <= 81; ++d) {
            // a smooth bump centred on the planted day
            const double v = 1000.0 * std::exp(-0.5 * std::pow((d - day) / 3.0, 2));
            s.values[day_date(kDefaultAnchor, d)] = static_cast<std::uint64_t>(std::llround(v));
        }
        std::vector<double> weekly;
        for (const auto& v : weekly_aggregate(s, g)) {
            weekly.push_back(*v);
        }
        const auto peaks = detect_peaks("cases", weekly).indices;
        o.require(peaks == std::vector<std::size_t>{bin},
                  "day " + std::to_string(day) + " -> bin " + std::to_string(bin));
    }
    return o;
}

// 6. Average occurrences per video, deterministic top-k, duplication invariance.
Outcome c6_word_frequency() {
    Outcome o;
    auto rec = [](std::string title, std::string desc) {
        VideoRecord r;
        r.title = std::move(title);
        r.description = std::move(desc);
        return r;
    };
    const std::vector<VideoRecord> rs{rec("vlog", "NYC"), rec("vlog vlog", ""), rec("", "Vlog, quarantine"),
                                      rec("vlog", "vlog quarantine")};
    const auto t = word_freq(rs);
    o.require(t.frequency("vlog") == 1.5, "6 over 4 -> 1.5");
    o.require(t.frequency("quarantine") == 0.5, "2 over 4 -> 0.5");
    o.require(t.frequency("nyc") == 0.25, "1 over 4 -> 0.25");

    const WordTable ties({{"pear", 3}, {"apple", 3}, {"fig", 3}, {"kiwi", 1}, {"date", 2}, {"lime", 1}}, 1);
    const auto top = top_k(ties, 5);
    std::vector<std::string> words;
    for (const auto& [w, f] : top) {
        words.push_back(w);
    }
    o.require(words == std::vector<std::string>{"apple", "fig", "pear", "date", "kiwi"}, "top-5 tie-break");
    o.require(top == top_k(ties, 5), "top-5 deterministic");

    auto doubled = rs;
    doubled.insert(doubled.end(), rs.begin(), rs.end());
    const auto d = word_freq(doubled);
    for (const auto& [w, c] : t.counts()) {
        o.require(d.frequency(w) == t.frequency(w), "duplication leaves " + w + " unchanged");
    }
    return o;
}

// 7. Cohen's kappa fixtures.
Outcome c7_kappa() {
    Outcome o;
    o.require(cohens_kappa({{"v", "i", "v", "v"}, {"v", "i", "v", "v"}}) == 1.0, "perfect agreement");
    o.require(std::abs(cohens_kappa({{"1", "1", "0", "0"}, {"1", "0", "0", "1"}})) < 1e-12, "zero kappa");

    // Contingency table (rows annotator A, columns B) over {valid, invalid}.
    const double n11 = 82, n12 = 22, n21 = 24, n22 = 272;
    const double n = n11 + n12 + n21 + n22;
    const double po = (n11 + n22) / n;
    const double pe = ((n11 + n12) * (n11 + n21) + (n21 + n22) * (n12 + n22)) / (n * n);
    const double oracle = (po - pe) / (1.0 - pe);
    AnnotationPair p;
    auto add = [&](double count, const char* a, const char* b) {
        for (int i = 0; i < static_cast<int>(count); ++i) {
            p.labels_a.push_back(a);
            p.labels_b.push_back(b);
        }
    };
    add(n11, "valid", "valid");
    add(n12, "valid", "invalid");
    add(n21, "invalid", "valid");
    add(n22, "invalid", "invalid");
    const double k = cohens_kappa(p);
    o.require(p.labels_a.size() == 400, "400 items");
    o.require(std::abs(k - oracle) < 1e-9, "400-item fixture vs table oracle");
    o.require(std::abs(k - 0.703) < 5e-4, "fixture sits at 0.703");
    return o;
}

// 8. Full runs are byte-identical, serial or parallel.
Outcome c8_determinism() {
    Outcome o;
    const auto dir = scratch("determinism");
    fixture::CorpusSpec spec;
    spec.add_skips = true;
    fixture::write_corpus(dir, spec);
    std::vector<std::map<std::string, std::string>> runs;
    for (std::size_t workers : {1u, 1u, 2u, 6u}) {
        auto c = load_config(dir / "vlogcues.conf");
        c.out_dir = dir / ("run" + std::to_string(runs.size()));
        c.workers = workers;
        cmd_scan(c);
        cmd_extract(c);
        cmd_words(c);
        cmd_report(c);
        runs.push_back(read_dir(c.out_dir));
    }
    o.require(runs[0].size() >= 12, "all outputs written");
    for (std::size_t i = 1; i < runs.size(); ++i) {
        o.require(runs[i] == runs[0], "run " + std::to_string(i) + " differs");
    }
    fs::remove_all(dir);
    return o;
}

// 9. Jitter raised in weeks 3, 5 and 8 is recovered and aligned with events
// planted in the same weeks.
Outcome c9_trend_recovery() {
    Outcome o;
    const auto dir = scratch("trend");
    fixture::write_corpus(dir);
    auto c = load_config(dir / "vlogcues.conf");
    c.out_dir = dir / "out";
    cmd_extract(c);
    const auto r = cmd_report(c);

    const PeakSet* jitter_peaks = nullptr;
    for (const auto& p : r.feature_peaks) {
        if (p.series == "jitter_mean") {
            jitter_peaks = &p;
        }
    }
    o.require(jitter_peaks != nullptr, "jitter_mean trajectory has peaks");
    if (!jitter_peaks) {
        return o;
    }
    o.require(jitter_peaks->indices == std::vector<std::size_t>{3, 5, 8}, "jitter_mean peaks {3,5,8}");
    for (std::size_t bin : {3u, 5u, 8u}) {
        bool matched = false;
        for (const auto& m : r.alignment.matches) {
            matched |= m.feature_series == "jitter_mean" && m.feature_bin == bin && m.event_bin == bin &&
                       m.offset == 0;
        }
        o.require(matched, "week " + std::to_string(bin) + " matched at offset 0");
    }
    fs::remove_all(dir);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"18-dimensional descriptor contract", c1_descriptor_contract},
        {"DSP oracle equivalence", c2_dsp_oracles},
        {"diarization constants and monotonicity", c3_diarization},
        {"weekly binning and published counts", c4_binning},
        {"event-peak placement", c5_event_peaks},
        {"word frequency semantics", c6_word_frequency},
        {"Cohen's kappa", c7_kappa},
        {"end-to-end determinism", c8_determinism},
        {"injected-trend recovery", c9_trend_recovery},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %zu %s (%.2fs)%s%s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, secs,
                    o.ok ? "" : ": ", o.detail.c_str());
        failed += !o.ok;
    }
    return failed;
}
