#include "vlogcues/audio.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

namespace vlogcues {

std::vector<Window> windows(Index n_samples, int sample_rate_hz, double window_ms) {
    if (!(window_ms > 0.0) || sample_rate_hz <= 0) {
        throw InvalidInput("windows: window_ms and sample rate must be positive");
    }
    const Index len = std::max<Index>(1, ms_to_samples(window_ms, sample_rate_hz));
    std::vector<Window> out;
    const Index count = n_samples / len;
    out.reserve(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) {
        out.push_back({static_cast<std::size_t>(i), i * len, len,
                       1000.0 * static_cast<double>(i * len) / sample_rate_hz});
    }
    return out;
}

AudioBuffer slice(const AudioBuffer& buffer, Index begin, Index end) {
    begin = std::clamp<Index>(begin, 0, buffer.size());
    end = std::clamp<Index>(end, begin, buffer.size());
    return {buffer.samples.segment(begin, end - begin), buffer.sample_rate_hz};
}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
    }
}

double decode_sample(const unsigned char* p, std::uint16_t format, std::uint16_t bits) {
    if (format == kFormatFloat) {
        float f;
        std::uint32_t raw = read_u32(p);
        std::memcpy(&f, &raw, sizeof(f));
        if (!std::isfinite(f)) {
            throw DecodeError(DecodeErrorKind::Malformed, "non-finite float sample");
        }
        return std::clamp(static_cast<double>(f), -1.0, 1.0);
    }
    switch (bits) {
    case 8:
        return (static_cast<double>(p[0]) - 128.0) / 128.0;
    case 16:
        return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    case 24: {
        std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
        if (v & 0x800000) {
            v -= 0x1000000;
        }
        return v / 8388608.0;
    }
    case 32:
        return static_cast<std::int32_t>(read_u32(p)) / 2147483648.0;
    default:
        throw DecodeError(DecodeErrorKind::UnsupportedFormat, "unsupported bit depth");
    }
}

}  // namespace

AudioBuffer decode_wav(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw DecodeError(DecodeErrorKind::UnsupportedFormat, "not a RIFF/WAVE file");
    }
    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        const std::uint32_t size = read_u32(hdr + 4);
        const std::size_t body = pos + 8;
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (size < 16 || body + size > bytes.size()) {
                throw DecodeError(DecodeErrorKind::Truncated, "truncated fmt chunk");
            }
            const unsigned char* f = bytes.data() + body;
            format = read_u16(f);
            channels = read_u16(f + 2);
            rate = read_u32(f + 4);
            bits = read_u16(f + 14);
            if (format == kFormatExtensible) {
                if (size < 40) {
                    throw DecodeError(DecodeErrorKind::Truncated, "truncated extensible fmt");
                }
                format = read_u16(f + 24);  // first two bytes of the subformat GUID
            }
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            if (!have_fmt) {
                throw DecodeError(DecodeErrorKind::Malformed, "data chunk before fmt chunk");
            }
            const bool pcm_ok = format == kFormatPcm &&
                                (bits == 8 || bits == 16 || bits == 24 || bits == 32);
            const bool float_ok = format == kFormatFloat && bits == 32;
            if (!pcm_ok && !float_ok) {
                throw DecodeError(DecodeErrorKind::UnsupportedFormat,
                                  "unsupported codec (format " + std::to_string(format) +
                                      ", " + std::to_string(bits) + " bits)");
            }
            if (channels == 0 || rate == 0) {
                throw DecodeError(DecodeErrorKind::Malformed, "zero channels or sample rate");
            }
            if (body + size > bytes.size()) {
                throw DecodeError(DecodeErrorKind::Truncated, "data chunk runs past end of file");
            }
            const std::size_t width = bits / 8;
            const std::size_t block = width * channels;
            if (size % block != 0) {
                throw DecodeError(DecodeErrorKind::Truncated, "partial sample frame in data chunk");
            }
            const std::size_t n = size / block;
            AudioBuffer out;
            out.sample_rate_hz = static_cast<int>(rate);
            out.samples.resize(static_cast<Index>(n));
            const unsigned char* d = bytes.data() + body;
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t c = 0; c < channels; ++c) {
                    acc += decode_sample(d + i * block + c * width, format, bits);
                }
                out.samples[static_cast<Index>(i)] = acc / channels;
            }
            return out;
        }
        pos = body + size + (size & 1u);
    }
    throw DecodeError(have_fmt ? DecodeErrorKind::Truncated : DecodeErrorKind::Malformed,
                      have_fmt ? "missing data chunk" : "missing fmt chunk");
}

AudioBuffer load_audio(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DecodeError(DecodeErrorKind::MissingFile, "cannot open '" + path.string() + "'");
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return decode_wav(bytes);
}

std::vector<unsigned char> encode_wav16(const AudioBuffer& buffer) {
    if (buffer.sample_rate_hz <= 0) {
        throw InvalidInput("encode_wav16: sample rate must be positive");
    }
    const auto n = static_cast<std::uint32_t>(buffer.size());
    std::vector<unsigned char> out;
    out.reserve(44 + 2 * n);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    put_u32(out, 36 + 2 * n);
    out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    put_u32(out, 16);
    put_u16(out, kFormatPcm);
    put_u16(out, 1);
    put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate_hz));
    put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate_hz) * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    put_u32(out, 2 * n);
    for (Index i = 0; i < buffer.size(); ++i) {
        const double x = std::clamp(buffer.samples[i], -1.0, 1.0);
        const long v = std::clamp(std::lround(x * 32768.0), -32768L, 32767L);
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    }
    return out;
}

void save_wav16(const std::filesystem::path& path, const AudioBuffer& buffer) {
    const auto bytes = encode_wav16(buffer);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace vlogcues
