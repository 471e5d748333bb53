#pragma once

#include "vlogcues/audio.hpp"
#include "vlogcues/errors.hpp"
#include "vlogcues/types.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace vlogcues {

struct SpeechMask;

// ---- frame-level primitives ----------------------------------------------

/// Fraction of adjacent sample pairs whose sign differs; zero counts as
/// nonnegative. Requires at least two samples.
template <typename Derived>
double zero_crossing_rate(const Eigen::MatrixBase<Derived>& frame) {
    const Index n = frame.size();
    if (n < 2) {
        throw InvalidInput("zero_crossing_rate: frame needs at least 2 samples");
    }
    Index crossings = 0;
    for (Index i = 0; i + 1 < n; ++i) {
        crossings += (frame(i) >= 0) != (frame(i + 1) >= 0);
    }
    return static_cast<double>(crossings) / static_cast<double>(n - 1);
}

/// Loudness proxy: root-mean-square amplitude.
template <typename Derived>
double rms(const Eigen::MatrixBase<Derived>& frame) {
    if (frame.size() == 0) {
        throw InvalidInput("rms: empty frame");
    }
    return std::sqrt(frame.template cast<double>().squaredNorm() /
                     static_cast<double>(frame.size()));
}

/// Summary statistics of a feature contour.
struct DescriptorStats {
    double mean = 0.0;
    double std = 0.0;       // population
    double skewness = 0.0;  // m3 / m2^1.5, 0 for constant input
    double slope = 0.0;     // OLS slope against index 0..n-1, 0 for n == 1
};

template <typename Derived>
DescriptorStats descriptor_stats(const Eigen::MatrixBase<Derived>& series) {
    const Index n = series.size();
    if (n == 0) {
        throw InvalidInput("descriptor_stats: empty series");
    }
    const auto x = series.template cast<double>().eval();
    if (x.maxCoeff() == x.minCoeff()) {
        return {x(0), 0.0, 0.0, 0.0};
    }
    DescriptorStats s;
    const double nd = static_cast<double>(n);
    s.mean = x.sum() / nd;
    const VectorXd d = x.array() - s.mean;
    const double m2 = d.squaredNorm() / nd;
    const double m3 = d.array().cube().sum() / nd;
    s.std = std::sqrt(m2);
    s.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    if (n > 1) {
        const VectorXd t = VectorXd::LinSpaced(n, 0.0, nd - 1.0).array() - (nd - 1.0) / 2.0;
        s.slope = t.dot(d) / t.squaredNorm();
    }
    return s;
}

inline DescriptorStats descriptor_stats(std::span<const double> series) {
    return descriptor_stats(Eigen::Map<const VectorXd>(series.data(),
                                                       static_cast<Index>(series.size())));
}

// ---- pitch and perturbation ----------------------------------------------

struct PitchRange {
    double f0_min_hz = 60.0;
    double f0_max_hz = 400.0;
};

inline constexpr double kVoicingThreshold = 0.5;
inline constexpr double kRmsGate = 1e-4;

/// Per-frame measurements feeding the prosodic contours.
struct FrameFeatures {
    double loudness = 0.0;
    double zcr = 0.0;
    bool voiced = false;
    std::optional<double> period_s;        // present iff voiced
    std::optional<double> peak_amplitude;  // present iff voiced
};

/// Normalized autocorrelation of `frame` at `lag` over the overlapping part.
template <typename Derived>
double normalized_autocorrelation(const Eigen::MatrixBase<Derived>& frame, Index lag) {
    const Index n = frame.size() - lag;
    if (lag <= 0 || n <= 0) {
        return 0.0;
    }
    const auto head = frame.head(n).template cast<double>();
    const auto tail = frame.segment(lag, n).template cast<double>();
    const double denom = std::sqrt(head.squaredNorm() * tail.squaredNorm());
    return denom > 0.0 ? head.dot(tail) / denom : 0.0;
}

/// Autocorrelation pitch estimate for one frame. Voiced iff the maximum
/// normalized autocorrelation over lags [sr/f0_max, sr/f0_min] reaches 0.5
/// and the RMS reaches 1e-4. The reported lag is the shortest local maximum
/// scoring at least 0.9 of the best one, which suppresses period-doubling
/// on strongly periodic input.
FrameFeatures analyze_frame(Eigen::Ref<const VectorXd> frame, int sample_rate_hz,
                            const PitchRange& range = {});

/// Frames `window` with `spec` and analyzes each frame.
std::vector<FrameFeatures> pitch_track(Eigen::Ref<const VectorXd> window, int sample_rate_hz,
                                       const FrameSpec& spec = {},
                                       const PitchRange& range = {});

/// Relative local perturbation contour over the voiced frames:
/// |v(i+1) - v(i)| / mean(v) for consecutive voiced frames. Empty when fewer
/// than two voiced frames or when mean(v) is 0.
std::vector<double> jitter_contour(std::span<const FrameFeatures> frames);
std::vector<double> shimmer_contour(std::span<const FrameFeatures> frames);

/// Mean of the respective contour; 0 when the contour is empty.
double jitter(std::span<const FrameFeatures> frames);
double shimmer(std::span<const FrameFeatures> frames);

// ---- per-recording descriptor vector -------------------------------------

enum class Descriptor : int {
    LoudnessMean, LoudnessStd, LoudnessSkew, LoudnessSlope,
    ZcrMean, ZcrStd, ZcrSkew, ZcrSlope,
    JitterMean, JitterStd, JitterSkew, JitterSlope,
    ShimmerMean, ShimmerStd, ShimmerSkew, ShimmerSlope,
    ZcrMin, ZcrMax,
};

inline constexpr int kDescriptorCount = 18;

/// Column names in output order. Changing them changes the file format.
inline constexpr std::array<std::string_view, kDescriptorCount> kDescriptorNames{
    "loudness_mean", "loudness_std", "loudness_skew", "loudness_slope",
    "zcr_mean",      "zcr_std",      "zcr_skew",      "zcr_slope",
    "jitter_mean",   "jitter_std",   "jitter_skew",   "jitter_slope",
    "shimmer_mean",  "shimmer_std",  "shimmer_skew",  "shimmer_slope",
    "zcr_min",       "zcr_max",
};

using DescriptorVector = Eigen::Matrix<double, kDescriptorCount, 1>;

/// The 18 acoustic descriptors of one recording (or a bin average).
struct ProsodyVector {
    DescriptorVector values = DescriptorVector::Zero();

    double operator[](Descriptor d) const { return values(static_cast<int>(d)); }
    double& operator[](Descriptor d) { return values(static_cast<int>(d)); }

    friend bool operator==(const ProsodyVector& a, const ProsodyVector& b) {
        return a.values == b.values;
    }
};

std::optional<Descriptor> descriptor_from_name(std::string_view name);

enum class ZcrExtremaMode {
    PerWindow,  // window min/max, averaged across windows
    Global,     // min/max over every retained frame of the recording
};

struct ProsodyOptions {
    FrameSpec frame{};
    PitchRange pitch{};
    ZcrExtremaMode zcr_extrema = ZcrExtremaMode::PerWindow;
};

/// Window-level descriptors from the frames of one analysis window.
ProsodyVector window_descriptors(std::span<const FrameFeatures> frames);

/// Averages window-level descriptors over the windows the mask retains.
/// Throws NoSpeechRetained when the mask keeps nothing.
ProsodyVector prosody_vector(const AudioBuffer& buffer, const SpeechMask& mask,
                             const ProsodyOptions& options = {});

}  // namespace vlogcues
