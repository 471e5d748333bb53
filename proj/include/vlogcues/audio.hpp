#pragma once

#include "vlogcues/errors.hpp"
#include "vlogcues/types.hpp"

#include <cmath>
#include <filesystem>
#include <vector>

namespace vlogcues {

/// Mono signal in [-1, 1] at a fixed sample rate.
template <typename Scalar>
struct BasicAudioBuffer {
    VectorX<Scalar> samples;
    int sample_rate_hz = 0;

    Index size() const { return samples.size(); }
    bool empty() const { return samples.size() == 0; }
    double duration_s() const {
        return sample_rate_hz > 0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
    }
};

using AudioBuffer = BasicAudioBuffer<double>;

/// Frame length and shift in milliseconds. Requires 0 < hop_ms <= frame_ms.
struct FrameSpec {
    double frame_ms = 25.0;
    double hop_ms = 10.0;

    void validate() const {
        if (!(frame_ms > 0.0) || !(hop_ms > 0.0) || hop_ms > frame_ms) {
            throw InvalidInput("FrameSpec requires 0 < hop_ms <= frame_ms");
        }
    }
};

inline constexpr double kDefaultWindowMs = 125.0;

/// Converts a duration to a sample count, rounding half away from zero.
inline Index ms_to_samples(double ms, int sample_rate_hz) {
    return static_cast<Index>(std::llround(ms * sample_rate_hz / 1000.0));
}

/// Frame geometry for a signal of a given length. Trailing partial frames
/// are dropped.
struct FrameGrid {
    Index length = 0;
    Index hop = 0;
    Index count = 0;

    static FrameGrid make(Index n_samples, int sample_rate_hz, const FrameSpec& spec) {
        spec.validate();
        FrameGrid g;
        g.length = std::max<Index>(1, ms_to_samples(spec.frame_ms, sample_rate_hz));
        g.hop = std::max<Index>(1, ms_to_samples(spec.hop_ms, sample_rate_hz));
        g.count = n_samples >= g.length ? (n_samples - g.length) / g.hop + 1 : 0;
        return g;
    }

    Index start(Index k) const { return k * hop; }
};

/// Frames of `signal` as the columns of a length x count matrix.
template <typename Derived>
MatrixX<typename Derived::Scalar> frame_matrix(const Eigen::MatrixBase<Derived>& signal,
                                               const FrameGrid& grid) {
    MatrixX<typename Derived::Scalar> out(grid.length, grid.count);
    for (Index k = 0; k < grid.count; ++k) {
        out.col(k) = signal.segment(grid.start(k), grid.length);
    }
    return out;
}

template <typename Scalar>
MatrixX<Scalar> frames(const BasicAudioBuffer<Scalar>& buffer, const FrameSpec& spec) {
    return frame_matrix(buffer.samples, FrameGrid::make(buffer.size(), buffer.sample_rate_hz, spec));
}

/// A non-overlapping analysis window into a buffer.
struct Window {
    std::size_t index = 0;
    Index offset = 0;
    Index length = 0;
    double start_ms = 0.0;
};

/// Consecutive non-overlapping windows of round(window_ms * sr / 1000)
/// samples; the trailing partial window is dropped.
std::vector<Window> windows(Index n_samples, int sample_rate_hz,
                            double window_ms = kDefaultWindowMs);

template <typename Scalar>
std::vector<Window> windows(const BasicAudioBuffer<Scalar>& buffer,
                            double window_ms = kDefaultWindowMs) {
    return windows(buffer.size(), buffer.sample_rate_hz, window_ms);
}

template <typename Scalar>
auto segment(const BasicAudioBuffer<Scalar>& buffer, const Window& w) {
    return buffer.samples.segment(w.offset, w.length);
}

/// Returns buffer samples [begin, end) as a new buffer at the same rate.
AudioBuffer slice(const AudioBuffer& buffer, Index begin, Index end);

// ---- WAV I/O --------------------------------------------------------------

/// Decodes a linear-PCM RIFF/WAVE file (8/16/24/32-bit integer or 32-bit
/// float, plain or WAVE_FORMAT_EXTENSIBLE). Integer samples are divided by
/// the type's maximum magnitude; channels are averaged to mono.
AudioBuffer load_audio(const std::filesystem::path& path);

/// Decodes from an in-memory WAV image.
AudioBuffer decode_wav(const std::vector<unsigned char>& bytes);

/// Encodes as 16-bit PCM mono. Samples are clamped to [-1, 1] and scaled by
/// 32768 with rounding, so load -> save -> load is bit-exact.
std::vector<unsigned char> encode_wav16(const AudioBuffer& buffer);
void save_wav16(const std::filesystem::path& path, const AudioBuffer& buffer);

}  // namespace vlogcues
