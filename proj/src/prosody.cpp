#include "vlogcues/prosody.hpp"

#include "vlogcues/diarization.hpp"

#include <algorithm>
#include <limits>

namespace vlogcues {

FrameFeatures analyze_frame(Eigen::Ref<const VectorXd> frame, int sample_rate_hz,
                            const PitchRange& range) {
    FrameFeatures f;
    f.loudness = rms(frame);
    f.zcr = frame.size() >= 2 ? zero_crossing_rate(frame) : 0.0;

    const Index n = frame.size();
    const Index lag_min = std::max<Index>(1, ms_to_samples(1000.0 / range.f0_max_hz, sample_rate_hz));
    const Index lag_max = std::min<Index>(n - 2, ms_to_samples(1000.0 / range.f0_min_hz, sample_rate_hz));
    if (f.loudness < kRmsGate || lag_max < lag_min) {
        return f;
    }

    // r[k] holds the lag lag_min - 1 + k; one guard lag on each side.
    std::vector<double> r(static_cast<std::size_t>(lag_max - lag_min + 3));
    for (Index lag = lag_min - 1; lag <= lag_max + 1; ++lag) {
        r[static_cast<std::size_t>(lag - lag_min + 1)] = normalized_autocorrelation(frame, lag);
    }
    auto at = [&](Index lag) { return r[static_cast<std::size_t>(lag - lag_min + 1)]; };

    Index best = lag_min;
    for (Index lag = lag_min; lag <= lag_max; ++lag) {
        if (at(lag) > at(best)) {
            best = lag;
        }
    }
    const double peak = at(best);
    if (peak < kVoicingThreshold) {
        return f;
    }
    Index chosen = best;
    for (Index lag = lag_min; lag < best; ++lag) {
        if (at(lag) >= 0.9 * peak && at(lag) >= at(lag - 1) && at(lag) > at(lag + 1)) {
            chosen = lag;
            break;
        }
    }

    f.voiced = true;
    f.period_s = static_cast<double>(chosen) / sample_rate_hz;
    const Index begin = std::max<Index>(0, n / 2 - chosen / 2);
    const Index len = std::min<Index>(chosen, n - begin);
    f.peak_amplitude = frame.segment(begin, len).cwiseAbs().maxCoeff();
    return f;
}

std::vector<FrameFeatures> pitch_track(Eigen::Ref<const VectorXd> window, int sample_rate_hz,
                                       const FrameSpec& spec, const PitchRange& range) {
    if (window.size() == 0) {
        throw InvalidInput("pitch_track: empty window");
    }
    const auto grid = FrameGrid::make(window.size(), sample_rate_hz, spec);
    std::vector<FrameFeatures> out;
    out.reserve(static_cast<std::size_t>(grid.count));
    for (Index k = 0; k < grid.count; ++k) {
        out.push_back(analyze_frame(window.segment(grid.start(k), grid.length), sample_rate_hz, range));
    }
    return out;
}

namespace {

template <typename Get>
std::vector<double> perturbation_contour(std::span<const FrameFeatures> frames, Get get) {
    std::vector<double> v;
    for (const auto& f : frames) {
        if (f.voiced) {
            v.push_back(get(f));
        }
    }
    if (v.size() < 2) {
        return {};
    }
    double mean = 0.0;
    for (double x : v) {
        mean += x;
    }
    mean /= static_cast<double>(v.size());
    if (!(mean > 0.0)) {
        return {};
    }
    std::vector<double> out;
    out.reserve(v.size() - 1);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        out.push_back(std::abs(v[i + 1] - v[i]) / mean);
    }
    return out;
}

double mean_or_zero(const std::vector<double>& v) {
    if (v.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> jitter_contour(std::span<const FrameFeatures> frames) {
    return perturbation_contour(frames, [](const FrameFeatures& f) { return *f.period_s; });
}

std::vector<double> shimmer_contour(std::span<const FrameFeatures> frames) {
    return perturbation_contour(frames, [](const FrameFeatures& f) { return *f.peak_amplitude; });
}

double jitter(std::span<const FrameFeatures> frames) {
    return mean_or_zero(jitter_contour(frames));
}

double shimmer(std::span<const FrameFeatures> frames) {
    return mean_or_zero(shimmer_contour(frames));
}

std::optional<Descriptor> descriptor_from_name(std::string_view name) {
    for (int i = 0; i < kDescriptorCount; ++i) {
        if (kDescriptorNames[static_cast<std::size_t>(i)] == name) {
            return static_cast<Descriptor>(i);
        }
    }
    return std::nullopt;
}

namespace {

void put_stats(ProsodyVector& v, Descriptor first, const DescriptorStats& s) {
    const int i = static_cast<int>(first);
    v.values(i) = s.mean;
    v.values(i + 1) = s.std;
    v.values(i + 2) = s.skewness;
    v.values(i + 3) = s.slope;
}

DescriptorStats stats_or_zero(const std::vector<double>& series) {
    // A window without two voiced frames contributes a zero perturbation.
    return series.empty() ? DescriptorStats{} : descriptor_stats(std::span<const double>(series));
}

}  // namespace

ProsodyVector window_descriptors(std::span<const FrameFeatures> frames) {
    if (frames.empty()) {
        throw InvalidInput("window_descriptors: window has no frames");
    }
    std::vector<double> loud, zcr;
    loud.reserve(frames.size());
    zcr.reserve(frames.size());
    for (const auto& f : frames) {
        loud.push_back(f.loudness);
        zcr.push_back(f.zcr);
    }
    ProsodyVector v;
    put_stats(v, Descriptor::LoudnessMean, descriptor_stats(std::span<const double>(loud)));
    put_stats(v, Descriptor::ZcrMean, descriptor_stats(std::span<const double>(zcr)));
    put_stats(v, Descriptor::JitterMean, stats_or_zero(jitter_contour(frames)));
    put_stats(v, Descriptor::ShimmerMean, stats_or_zero(shimmer_contour(frames)));
    v[Descriptor::ZcrMin] = *std::min_element(zcr.begin(), zcr.end());
    v[Descriptor::ZcrMax] = *std::max_element(zcr.begin(), zcr.end());
    return v;
}

ProsodyVector prosody_vector(const AudioBuffer& buffer, const SpeechMask& mask,
                             const ProsodyOptions& options) {
    const auto wins = windows(buffer, mask.window_ms);
    if (wins.size() != mask.size()) {
        throw InvalidInput("prosody_vector: mask has " + std::to_string(mask.size()) +
                           " windows, buffer has " + std::to_string(wins.size()));
    }
    DescriptorVector sum = DescriptorVector::Zero();
    std::size_t kept = 0;
    double global_min = std::numeric_limits<double>::infinity();
    double global_max = -std::numeric_limits<double>::infinity();
    for (const auto& w : wins) {
        if (!mask.retained[w.index]) {
            continue;
        }
        const auto track = pitch_track(segment(buffer, w), buffer.sample_rate_hz, options.frame,
                                       options.pitch);
        if (track.empty()) {
            throw InvalidInput("prosody_vector: window shorter than one frame");
        }
        const auto wd = window_descriptors(track);
        sum += wd.values;
        global_min = std::min(global_min, wd[Descriptor::ZcrMin]);
        global_max = std::max(global_max, wd[Descriptor::ZcrMax]);
        ++kept;
    }
    if (kept == 0) {
        throw NoSpeechRetained("no window retained by diarization");
    }
    ProsodyVector out;
    out.values = sum / static_cast<double>(kept);
    if (options.zcr_extrema == ZcrExtremaMode::Global) {
        out[Descriptor::ZcrMin] = global_min;
        out[Descriptor::ZcrMax] = global_max;
    }
    return out;
}

}  // namespace vlogcues
