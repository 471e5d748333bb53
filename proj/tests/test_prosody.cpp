#include "vlogcues/diarization.hpp"
#include "vlogcues/prosody.hpp"

#include "synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace vlogcues;
using synth::err;

namespace {

SpeechMask keep_all(const AudioBuffer& b, double window_ms = kDefaultWindowMs) {
    SpeechMask m;
    m.window_ms = window_ms;
    const auto ws = windows(b, window_ms);
    m.similarity = VectorXd::Ones(static_cast<Index>(ws.size()));
    for (const auto& w : ws) {
        m.start_ms.push_back(w.start_ms);
        m.retained.push_back(true);
    }
    return m;
}

FrameFeatures voiced(double period, double amp) {
    FrameFeatures f;
    f.voiced = true;
    f.period_s = period;
    f.peak_amplitude = amp;
    return f;
}

}  // namespace

TEST_CASE("zero crossing rate") {
    CHECK(zero_crossing_rate(VectorXd::Constant(400, 0.3)) == 0.0);
    VectorXd alt(10);
    alt << 1, -1, 1, -1, 1, -1, 1, -1, 1, -1;
    CHECK(zero_crossing_rate(alt) == 1.0);
    VectorXd zeros(3);
    zeros << 0.0, -0.0, 0.0;
    CHECK(zero_crossing_rate(zeros) == 0.0);
    CHECK_THROWS_AS(zero_crossing_rate(VectorXd::Ones(1)), InvalidInput);

    // 50 Hz over 25 ms is 1.25 periods: with the phase offset the sign
    // changes exactly twice.
    const auto s = synth::sine(50.0, 1.0, 0.025, 16000, 0.1);
    REQUIRE(s.size() == 400);
    const double expected = synth::oracle_zcr(synth::to_vector(s.samples));
    CHECK(expected == 2.0 / 399.0);
    CHECK(zero_crossing_rate(s.samples) == expected);
}

TEST_CASE("rms loudness") {
    CHECK(rms(VectorXd::Zero(100)) == 0.0);
    VectorXd sq(100);
    for (Index i = 0; i < 100; ++i) {
        sq(i) = i % 2 ? 1.0 : -1.0;
    }
    CHECK(rms(sq) == 1.0);
    const auto s = synth::sine(100.0, 0.8, 0.05);  // 5 whole periods
    CHECK(std::abs(rms(s.samples) - 0.8 / std::sqrt(2.0)) < 1e-3);
    CHECK(err(rms(s.samples), synth::oracle_rms(synth::to_vector(s.samples))) < 1e-12);
}

TEST_CASE("descriptor_stats examples") {
    auto s = descriptor_stats(std::vector<double>{5, 5, 5});
    CHECK(s.mean == 5.0);
    CHECK(s.std == 0.0);
    CHECK(s.skewness == 0.0);
    CHECK(s.slope == 0.0);

    s = descriptor_stats(std::vector<double>{0, 1, 2, 3});
    CHECK(s.mean == 1.5);
    CHECK(s.slope == doctest::Approx(1.0).epsilon(1e-15));

    s = descriptor_stats(std::vector<double>{0, 0, 1});
    CHECK(std::abs(s.skewness - std::sqrt(2.0) / 2.0) < 1e-9);

    s = descriptor_stats(std::vector<double>{0.1});
    CHECK(s.mean == 0.1);
    CHECK(s.slope == 0.0);
    CHECK_THROWS_AS(descriptor_stats(std::vector<double>{}), InvalidInput);

    // Repeated values whose sum is inexact still count as constant.
    s = descriptor_stats(std::vector<double>(11, 0.1));
    CHECK(s.mean == 0.1);
    CHECK(s.skewness == 0.0);
}

TEST_CASE("descriptor_stats agrees with direct summation") {
    std::mt19937 rng(42);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng() % 60;
        std::vector<double> x(n);
        const double scale = std::pow(10.0, static_cast<int>(rng() % 7) - 3);
        for (auto& v : x) {
            v = scale * (synth::unit(rng) * 2.0 - 0.5) + (rng() % 3 == 0 ? synth::unit(rng) * t : 0.0);
        }
        const auto got = descriptor_stats(x);
        const auto want = synth::oracle_stats(x);
        CHECK(err(got.mean, want.mean) < 1e-9);
        CHECK(err(got.std, want.std) < 1e-9);
        CHECK(err(got.skewness, want.skew, 1e-6) < 1e-9);
        CHECK(err(got.slope, want.slope, 1e-12 * scale) < 1e-9);

        std::vector<double> rev(x.rbegin(), x.rend());
        const auto r = descriptor_stats(rev);
        CHECK(err(r.slope, -got.slope, 1e-12 * scale) < 1e-9);
        CHECK(err(r.mean, got.mean) < 1e-12);
        CHECK(err(r.std, got.std) < 1e-12);
        CHECK(err(r.skewness, got.skewness, 1e-6) < 1e-9);
    }
}

TEST_CASE("pitch of a 100 Hz tone") {
    const auto s = synth::sine(100.0, 0.5, 0.125);
    const auto track = pitch_track(s.samples, s.sample_rate_hz);
    REQUIRE(track.size() == 11);
    const auto frame = synth::to_vector(s.samples.head(400));
    CHECK(synth::oracle_best_lag(frame, 40, 267) == 160);
    for (const auto& f : track) {
        REQUIRE(f.voiced);
        CHECK(std::abs(*f.period_s - 0.01) <= 6.25e-5 + 1e-15);
        CHECK(*f.peak_amplitude <= 0.5);
        CHECK(*f.peak_amplitude > 0.49);
    }
}

TEST_CASE("pitch period within one sample across the speech band") {
    for (int sr : {8000, 16000, 44100}) {
        for (double f0 = 60.0; f0 <= 400.0; f0 += 7.0) {
            const auto s = synth::sine(f0, 0.4, 0.125, sr, 0.3);
            for (const auto& fr : pitch_track(s.samples, sr)) {
                REQUIRE(fr.voiced);
                CHECK(std::abs(*fr.period_s * sr - sr / f0) <= 1.0);
            }
        }
    }
}

TEST_CASE("noise and silence are unvoiced") {
    const auto n = synth::white_noise(0.5, 0.125, 3);
    for (const auto& f : pitch_track(n.samples, 16000)) {
        CHECK_FALSE(f.voiced);
        CHECK_FALSE(f.period_s);
        CHECK_FALSE(f.peak_amplitude);
    }
    for (const auto& f : pitch_track(synth::silence(0.125).samples, 16000)) {
        CHECK_FALSE(f.voiced);
        CHECK(f.loudness == 0.0);
    }
    // Below the RMS gate even a clean tone is unvoiced.
    for (const auto& f : pitch_track(synth::sine(150, 5e-5, 0.125).samples, 16000)) {
        CHECK_FALSE(f.voiced);
    }
}

TEST_CASE("jitter and shimmer on hand-built frames") {
    std::vector<FrameFeatures> same(5, voiced(0.01, 0.5));
    CHECK(jitter(same) == 0.0);
    CHECK(shimmer(same) == 0.0);

    std::vector<FrameFeatures> alt{voiced(0.010, 1.0), voiced(0.0105, 0.8), voiced(0.010, 1.0),
                                   voiced(0.0105, 0.8)};
    CHECK(std::abs(jitter(alt) - 0.5 / 10.25) < 1e-6);
    CHECK(std::abs(shimmer(alt) - 0.2 / 0.9) < 1e-6);

    std::vector<FrameFeatures> one{voiced(0.01, 0.5), FrameFeatures{}, FrameFeatures{}};
    CHECK(jitter(one) == 0.0);
    CHECK(shimmer(std::vector<FrameFeatures>(4)) == 0.0);

    // Unvoiced frames are skipped, not treated as gaps.
    std::vector<FrameFeatures> gap{voiced(0.010, 1.0), FrameFeatures{}, voiced(0.0105, 0.8)};
    CHECK(std::abs(jitter(gap) - 0.5 / 10.25) < 1e-6);
}

TEST_CASE("jitter and shimmer match the perturbation oracle on random tracks") {
    std::mt19937 rng(8);
    for (int t = 0; t < 150; ++t) {
        std::vector<FrameFeatures> fs;
        std::vector<double> periods, amps;
        for (int i = 0; i < 11; ++i) {
            if (rng() % 4 == 0) {
                fs.emplace_back();
                continue;
            }
            const double p = 0.0025 + 0.014 * synth::unit(rng);
            const double a = 0.01 + synth::unit(rng);
            fs.push_back(voiced(p, a));
            periods.push_back(p);
            amps.push_back(a);
        }
        CHECK(err(jitter(fs), synth::oracle_perturbation(periods)) < 1e-9);
        CHECK(err(shimmer(fs), synth::oracle_perturbation(amps)) < 1e-9);
    }
}

TEST_CASE("prosody vector of a constant recording") {
    // One 80-sample period tiled: the period divides both hop and window, so
    // every frame is bit-identical.
    const auto cycle = synth::sine(200.0, 0.5, 0.005, 16000, 0.3);
    AudioBuffer s{VectorXd(8000), 16000};
    for (Index i = 0; i < s.size(); ++i) {
        s.samples[i] = cycle.samples[i % 80];
    }
    const auto v = prosody_vector(s, keep_all(s));
    for (auto d : {Descriptor::LoudnessStd, Descriptor::LoudnessSkew, Descriptor::LoudnessSlope,
                   Descriptor::ZcrStd, Descriptor::ZcrSkew, Descriptor::ZcrSlope,
                   Descriptor::JitterMean, Descriptor::JitterStd, Descriptor::JitterSkew,
                   Descriptor::JitterSlope, Descriptor::ShimmerMean, Descriptor::ShimmerStd,
                   Descriptor::ShimmerSkew, Descriptor::ShimmerSlope}) {
        CHECK(v[d] == 0.0);
    }
    CHECK(v[Descriptor::ZcrMin] == v[Descriptor::ZcrMean]);
    CHECK(v[Descriptor::ZcrMax] == v[Descriptor::ZcrMean]);
}

TEST_CASE("prosody vector averages window descriptors") {
    // Two windows of square waves with different rates.
    auto square = [](int period, Index n) {
        VectorXd x(n);
        for (Index i = 0; i < n; ++i) {
            x(i) = (i / period) % 2 ? -0.5 : 0.5;
        }
        return x;
    };
    AudioBuffer b{VectorXd(4000), 16000};
    b.samples << square(40, 2000), square(8, 2000);
    const auto v = prosody_vector(b, keep_all(b));
    auto window_zcr_mean = [&](Index off) {
        double s = 0;
        for (int k = 0; k < 11; ++k) {
            s += synth::oracle_zcr(synth::to_vector(b.samples.segment(off + 160 * k, 400)));
        }
        return s / 11.0;
    };
    const double expected = (window_zcr_mean(0) + window_zcr_mean(2000)) / 2.0;
    CHECK(err(v[Descriptor::ZcrMean], expected) < 1e-12);

    // Dropping the second window leaves only the first.
    auto mask = keep_all(b);
    mask.retained[1] = false;
    CHECK(err(prosody_vector(b, mask)[Descriptor::ZcrMean], window_zcr_mean(0)) < 1e-12);

    mask.retained[0] = false;
    CHECK_THROWS_AS(prosody_vector(b, mask), NoSpeechRetained);
}

TEST_CASE("rising zcr within every window gives the per-window OLS slope") {
    // Each 125 ms window is a chirp from 200 Hz to 3 kHz.
    const int sr = 16000;
    const Index win = 2000;
    AudioBuffer b{VectorXd(4 * win), sr};
    for (Index w = 0; w < 4; ++w) {
        double phase = 0.3 * w;
        for (Index i = 0; i < win; ++i) {
            const double f = 200.0 + 2800.0 * i / win;
            phase += 2.0 * std::numbers::pi * f / sr;
            b.samples(w * win + i) = 0.4 * std::sin(phase);
        }
    }
    const auto v = prosody_vector(b, keep_all(b));

    double slope = 0.0, lo = 0.0, hi = 0.0;
    for (Index w = 0; w < 4; ++w) {
        std::vector<double> z;
        for (int k = 0; k < 11; ++k) {
            z.push_back(synth::oracle_zcr(synth::to_vector(b.samples.segment(w * win + 160 * k, 400))));
        }
        slope += synth::oracle_stats(z).slope / 4.0;
        lo += *std::min_element(z.begin(), z.end()) / 4.0;
        hi += *std::max_element(z.begin(), z.end()) / 4.0;
    }
    CHECK(v[Descriptor::ZcrSlope] > 0.0);
    CHECK(err(v[Descriptor::ZcrSlope], slope) < 1e-9);
    CHECK(err(v[Descriptor::ZcrMin], lo) < 1e-12);
    CHECK(err(v[Descriptor::ZcrMax], hi) < 1e-12);

    ProsodyOptions global;
    global.zcr_extrema = ZcrExtremaMode::Global;
    const auto g = prosody_vector(b, keep_all(b), global);
    CHECK(g[Descriptor::ZcrMin] <= v[Descriptor::ZcrMin]);
    CHECK(g[Descriptor::ZcrMax] >= v[Descriptor::ZcrMax]);
    CHECK(g[Descriptor::ZcrMean] == v[Descriptor::ZcrMean]);
}

TEST_CASE("amplitude scaling leaves zcr, jitter and shimmer unchanged") {
    synth::VoiceSpec spec;
    spec.jitter = 0.04;
    spec.shimmer = 0.1;
    const auto b = synth::voice(spec, 1.0, 17);
    const auto base = prosody_vector(b, keep_all(b));
    CHECK(base[Descriptor::JitterMean] > 0.0);
    CHECK(base[Descriptor::ShimmerMean] > 0.0);
    for (double c : {1.0, 0.5, 0.25, 0.73, 0.31}) {
        AudioBuffer scaled{b.samples * c, b.sample_rate_hz};
        const auto v = prosody_vector(scaled, keep_all(scaled));
        for (auto d : {Descriptor::ZcrMean, Descriptor::ZcrStd, Descriptor::ZcrSkew,
                       Descriptor::ZcrSlope, Descriptor::ZcrMin, Descriptor::ZcrMax,
                       Descriptor::JitterMean, Descriptor::JitterStd, Descriptor::JitterSkew,
                       Descriptor::JitterSlope}) {
            CHECK(v[d] == base[d]);
        }
        CHECK(err(v[Descriptor::LoudnessMean], c * base[Descriptor::LoudnessMean]) < 1e-12);
        for (auto d : {Descriptor::ShimmerMean, Descriptor::ShimmerStd, Descriptor::ShimmerSlope}) {
            CHECK(err(v[d], base[d]) < 1e-9);
        }
    }
}

TEST_CASE("descriptor names are stable") {
    CHECK(kDescriptorNames.size() == 18);
    CHECK(kDescriptorNames[0] == "loudness_mean");
    CHECK(kDescriptorNames[4] == "zcr_mean");
    CHECK(kDescriptorNames[8] == "jitter_mean");
    CHECK(kDescriptorNames[12] == "shimmer_mean");
    CHECK(kDescriptorNames[16] == "zcr_min");
    CHECK(kDescriptorNames[17] == "zcr_max");
    CHECK(descriptor_from_name("shimmer_slope") == Descriptor::ShimmerSlope);
    CHECK_FALSE(descriptor_from_name("pitch_mean"));
}
