#pragma once

#include "vlogcues/audio.hpp"
#include "vlogcues/types.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vlogcues {

inline constexpr double kDefaultSimilarityThreshold = 0.65;
inline constexpr int kDefaultEmbeddingDim = 256;

/// Options of the built-in spectral embedder. The embedding holds the
/// per-band mean and standard deviation of mel log-energies, so `dim` must be
/// even; `dim / 2` triangular bands span [0, sr/2].
struct EmbedderOptions {
    int dim = kDefaultEmbeddingDim;
    FrameSpec frame{};
    double log_floor = 1e-10;
};

/// Triangular mel filterbank (HTK mel scale) as a bands x bins matrix for an
/// FFT of `fft_size` points.
MatrixXd mel_filterbank(int n_bands, int fft_size, int sample_rate_hz);

/// Deterministic stand-in for a neural speaker encoder. Produces an
/// L2-normalized vector, or the zero vector for all-silent input.
class SpectralEmbedder {
public:
    SpectralEmbedder(int sample_rate_hz, EmbedderOptions options = {});

    int dim() const { return options_.dim; }
    int sample_rate_hz() const { return sample_rate_hz_; }

    VectorXd embed(Eigen::Ref<const VectorXd> audio) const;

private:
    int sample_rate_hz_;
    EmbedderOptions options_;
    FrameGrid frame_proto_;
    int fft_size_;
    VectorXd taper_;
    MatrixXd filterbank_;
};

/// dot(a, b) / (|a| |b|), or 0 when either norm is 0. Clamped to [-1, 1].
template <typename DerivedA, typename DerivedB>
double cosine_similarity(const Eigen::MatrixBase<DerivedA>& a,
                         const Eigen::MatrixBase<DerivedB>& b) {
    if (a.size() != b.size()) {
        throw InvalidInput("cosine_similarity: dimension mismatch (" + std::to_string(a.size()) +
                           " vs " + std::to_string(b.size()) + ")");
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

/// Labeled audio of the target speaker.
struct ReferenceSegment {
    AudioBuffer audio;

    static constexpr double kMinDurationS = 1.0;
    static constexpr double kMaxDurationS = 30.0;

    void validate() const;
};

/// Externally computed embeddings keyed by window index, plus an optional
/// reference embedding (row label `ref`).
struct ExternalEmbeddings {
    int dim = 0;
    std::map<std::size_t, VectorXd> windows;
    std::optional<VectorXd> reference;

    bool empty() const { return windows.empty() && !reference; }
};

/// Reads `dim=<D>` followed by rows `<window_index|ref> v1 ... vD`.
/// An empty file yields an empty mapping.
ExternalEmbeddings load_external_embeddings(const std::filesystem::path& path);
ExternalEmbeddings parse_external_embeddings(const std::string& text);

/// Per-window retention decisions.
struct SpeechMask {
    double window_ms = kDefaultWindowMs;
    double threshold = kDefaultSimilarityThreshold;
    std::vector<double> start_ms;
    VectorXd similarity;
    std::vector<bool> retained;

    std::size_t size() const { return retained.size(); }
    std::size_t retained_count() const;
    /// True when the buffer was shorter than one window.
    bool no_analyzable_audio() const { return retained.empty(); }
};

struct DiarizationOptions {
    double threshold = kDefaultSimilarityThreshold;
    double window_ms = kDefaultWindowMs;
    EmbedderOptions embedder{};
};

/// Scores every window of `buffer` against the reference embedding and
/// keeps windows with similarity >= threshold.
SpeechMask diarize(const AudioBuffer& buffer, const ReferenceSegment& reference,
                   const DiarizationOptions& options = {},
                   const ExternalEmbeddings* external = nullptr);

/// Re-thresholds an existing mask.
SpeechMask apply_threshold(SpeechMask mask, double threshold);

/// CSV `window_index,start_ms,similarity,retained`.
std::string mask_to_csv(const SpeechMask& mask);

}  // namespace vlogcues
