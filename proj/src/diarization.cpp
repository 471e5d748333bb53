#include "vlogcues/diarization.hpp"

#include "vlogcues/csv.hpp"
#include "vlogcues/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <charconv>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace vlogcues {

namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

int next_pow2(Index n) {
    int p = 1;
    while (p < n) {
        p <<= 1;
    }
    return p;
}

}  // namespace

MatrixXd mel_filterbank(int n_bands, int fft_size, int sample_rate_hz) {
    const int n_bins = fft_size / 2 + 1;
    const double mel_hi = hz_to_mel(sample_rate_hz / 2.0);
    VectorXd edges(n_bands + 2);
    for (int i = 0; i < n_bands + 2; ++i) {
        edges(i) = mel_to_hz(mel_hi * i / (n_bands + 1));
    }
    MatrixXd fb = MatrixXd::Zero(n_bands, n_bins);
    for (int b = 0; b < n_bands; ++b) {
        const double lo = edges(b), mid = edges(b + 1), hi = edges(b + 2);
        for (int k = 0; k < n_bins; ++k) {
            const double f = static_cast<double>(k) * sample_rate_hz / fft_size;
            if (f > lo && f < hi) {
                fb(b, k) = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
            }
        }
        if (fb.row(b).sum() == 0.0) {
            // Band narrower than the bin spacing: take the nearest bin.
            const auto k = static_cast<int>(std::lround(mid * fft_size / sample_rate_hz));
            fb(b, std::clamp(k, 0, n_bins - 1)) = 1.0;
        }
    }
    return fb;
}

SpectralEmbedder::SpectralEmbedder(int sample_rate_hz, EmbedderOptions options)
    : sample_rate_hz_(sample_rate_hz), options_(options) {
    if (sample_rate_hz <= 0) {
        throw InvalidInput("SpectralEmbedder: sample rate must be positive");
    }
    if (options_.dim < 2 || options_.dim % 2 != 0) {
        throw InvalidInput("SpectralEmbedder: dim must be a positive even number");
    }
    frame_proto_ = FrameGrid::make(0, sample_rate_hz, options_.frame);
    fft_size_ = std::max(2048, next_pow2(frame_proto_.length));
    const Index len = frame_proto_.length;
    taper_.resize(len);
    for (Index i = 0; i < len; ++i) {
        taper_(i) = len > 1 ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (len - 1)) : 1.0;
    }
    filterbank_ = mel_filterbank(options_.dim / 2, fft_size_, sample_rate_hz);
}

VectorXd SpectralEmbedder::embed(Eigen::Ref<const VectorXd> audio) const {
    if (audio.size() == 0) {
        throw InvalidInput("embed: empty window");
    }
    const int bands = options_.dim / 2;
    VectorXd out = VectorXd::Zero(options_.dim);
    if (audio.cwiseAbs().maxCoeff() == 0.0) {
        return out;
    }

    // Audio shorter than one frame is analyzed as a single zero-padded frame.
    auto grid = FrameGrid::make(audio.size(), sample_rate_hz_, options_.frame);
    const Index len = grid.length;
    const Index count = std::max<Index>(1, grid.count);

    Eigen::FFT<double> fft;
    std::vector<double> padded(static_cast<std::size_t>(fft_size_), 0.0);
    std::vector<std::complex<double>> spectrum;
    VectorXd power(fft_size_ / 2 + 1);
    MatrixXd log_energy(bands, count);
    for (Index k = 0; k < count; ++k) {
        std::fill(padded.begin(), padded.end(), 0.0);
        const Index start = grid.count > 0 ? grid.start(k) : 0;
        const Index n = std::min(len, audio.size() - start);
        for (Index i = 0; i < n; ++i) {
            padded[static_cast<std::size_t>(i)] = audio(start + i) * taper_(i);
        }
        fft.fwd(spectrum, padded);
        for (Index b = 0; b < power.size(); ++b) {
            power(b) = std::norm(spectrum[static_cast<std::size_t>(b)]);
        }
        log_energy.col(k) =
            (filterbank_ * power).array().max(options_.log_floor).log().matrix();
    }

    const VectorXd mean = log_energy.rowwise().mean();
    const VectorXd std =
        ((log_energy.colwise() - mean).array().square().rowwise().mean()).sqrt().matrix();
    out.head(bands) = mean;
    out.tail(bands) = std;
    const double norm = out.norm();
    if (norm > 0.0) {
        out /= norm;
    }
    return out;
}

void ReferenceSegment::validate() const {
    if (audio.empty()) {
        throw InvalidInput("reference segment is empty");
    }
    const double d = audio.duration_s();
    if (d < kMinDurationS || d > kMaxDurationS) {
        throw InvalidInput("reference segment duration " + csv::format_number(d) +
                           " s outside [1, 30] s");
    }
}

ExternalEmbeddings parse_external_embeddings(const std::string& text) {
    ExternalEmbeddings out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    auto fail = [&](const std::string& msg) {
        throw LoadError("embeddings line " + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        std::istringstream row(line);
        if (!have_header) {
            std::string head;
            row >> head;
            if (head.rfind("dim=", 0) != 0) {
                fail("expected header 'dim=<D>'");
            }
            const auto digits = head.substr(4);
            auto res = std::from_chars(digits.data(), digits.data() + digits.size(), out.dim);
            if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size() || out.dim <= 0) {
                fail("bad dimension '" + digits + "'");
            }
            have_header = true;
            continue;
        }
        std::string key;
        row >> key;
        std::vector<double> values;
        std::string tok;
        while (row >> tok) {
            double v = 0.0;
            auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
                fail("bad value '" + tok + "'");
            }
            values.push_back(v);
        }
        if (static_cast<int>(values.size()) != out.dim) {
            fail("dimension mismatch: expected " + std::to_string(out.dim) + " values, got " +
                 std::to_string(values.size()));
        }
        VectorXd vec = Eigen::Map<VectorXd>(values.data(), static_cast<Index>(values.size()));
        if (key == "ref") {
            if (out.reference) {
                fail("duplicate reference row");
            }
            out.reference = std::move(vec);
            continue;
        }
        std::size_t index = 0;
        auto res = std::from_chars(key.data(), key.data() + key.size(), index);
        if (res.ec != std::errc{} || res.ptr != key.data() + key.size()) {
            fail("bad window index '" + key + "'");
        }
        if (!out.windows.emplace(index, std::move(vec)).second) {
            fail("duplicate window index " + key);
        }
    }
    return out;
}

ExternalEmbeddings load_external_embeddings(const std::filesystem::path& path) {
    return parse_external_embeddings(read_text_file(path));
}

std::size_t SpeechMask::retained_count() const {
    return static_cast<std::size_t>(std::count(retained.begin(), retained.end(), true));
}

SpeechMask diarize(const AudioBuffer& buffer, const ReferenceSegment& reference,
                   const DiarizationOptions& options, const ExternalEmbeddings* external) {
    reference.validate();
    if (reference.audio.sample_rate_hz != buffer.sample_rate_hz) {
        throw InvalidInput("diarize: reference and recording sample rates differ");
    }
    if (!(options.threshold >= -1.0 && options.threshold <= 1.0)) {
        throw InvalidInput("diarize: threshold must lie in [-1, 1]");
    }
    const SpectralEmbedder embedder(buffer.sample_rate_hz, options.embedder);
    const bool use_ext = external != nullptr && !external->empty();

    const VectorXd ref = use_ext && external->reference ? *external->reference
                                                        : embedder.embed(reference.audio.samples);

    SpeechMask mask;
    mask.window_ms = options.window_ms;
    mask.threshold = options.threshold;
    const auto wins = windows(buffer, options.window_ms);
    mask.similarity.resize(static_cast<Index>(wins.size()));
    mask.start_ms.reserve(wins.size());
    mask.retained.reserve(wins.size());
    for (const auto& w : wins) {
        double sim = 0.0;
        if (use_ext) {
            auto it = external->windows.find(w.index);
            sim = it != external->windows.end()
                      ? cosine_similarity(ref, it->second)
                      : cosine_similarity(ref, embedder.embed(segment(buffer, w)));
        } else {
            sim = cosine_similarity(ref, embedder.embed(segment(buffer, w)));
        }
        mask.similarity(static_cast<Index>(w.index)) = sim;
        mask.start_ms.push_back(w.start_ms);
        mask.retained.push_back(sim >= options.threshold);
    }
    return mask;
}

SpeechMask apply_threshold(SpeechMask mask, double threshold) {
    mask.threshold = threshold;
    for (std::size_t i = 0; i < mask.retained.size(); ++i) {
        mask.retained[i] = mask.similarity(static_cast<Index>(i)) >= threshold;
    }
    return mask;
}

std::string mask_to_csv(const SpeechMask& mask) {
    std::string out = "window_index,start_ms,similarity,retained\n";
    for (std::size_t i = 0; i < mask.size(); ++i) {
        out += std::to_string(i) + "," + csv::format_number(mask.start_ms[i]) + "," +
               csv::format_number(mask.similarity(static_cast<Index>(i))) + "," +
               (mask.retained[i] ? "1" : "0") + "\n";
    }
    return out;
}

}  // namespace vlogcues
