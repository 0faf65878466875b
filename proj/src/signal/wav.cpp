#include "emofuse/signal/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "emofuse/errors.hpp"

namespace emofuse::signal {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatIeeeFloat = 0x0003;

struct Cursor {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    std::size_t remaining() const { return bytes.size() - pos; }

    void require(std::size_t n, const char* what) const {
        if (remaining() < n) {
            throw DecodeError(std::string("wav: truncated ") + what +
                              " at byte offset " + std::to_string(pos));
        }
    }

    std::uint32_t u32(const char* what) {
        require(4, what);
        std::uint32_t v = 0;
        std::memcpy(&v, bytes.data() + pos, 4);
        pos += 4;
        return v;
    }

    std::uint16_t u16(const char* what) {
        require(2, what);
        std::uint16_t v = 0;
        std::memcpy(&v, bytes.data() + pos, 2);
        pos += 2;
        return v;
    }

    void fourcc(char out[4], const char* what) {
        require(4, what);
        std::memcpy(out, bytes.data() + pos, 4);
        pos += 4;
    }
};

struct FmtInfo {
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits = 0;
};

double decode_sample(const std::uint8_t* p, const FmtInfo& fmt) {
    switch (fmt.format) {
        case kFormatPcm:
            if (fmt.bits == 8) {
                // 8-bit PCM is unsigned, midpoint 128.
                return (static_cast<int>(*p) - 128) / 128.0;
            } else {
                std::int16_t v = 0;
                std::memcpy(&v, p, 2);
                return v / 32768.0;
            }
        case kFormatIeeeFloat: {
            float v = 0.0f;
            std::memcpy(&v, p, 4);
            return std::clamp(static_cast<double>(v), -1.0, 1.0);
        }
        default:
            throw InternalError("wav: unreachable sample format");
    }
}

}  // namespace

AudioBuffer load_wav(std::span<const std::uint8_t> bytes) {
    Cursor cur{bytes};

    char id[4];
    cur.fourcc(id, "RIFF header");
    if (std::memcmp(id, "RIFF", 4) != 0) {
        throw DecodeError("wav: missing RIFF tag at byte offset 0");
    }
    cur.u32("RIFF size");
    cur.fourcc(id, "WAVE tag");
    if (std::memcmp(id, "WAVE", 4) != 0) {
        throw DecodeError("wav: missing WAVE tag at byte offset 8");
    }

    FmtInfo fmt;
    bool have_fmt = false;
    std::span<const std::uint8_t> data;
    bool have_data = false;

    while (cur.remaining() >= 8) {
        cur.fourcc(id, "chunk id");
        const std::uint32_t size = cur.u32("chunk size");
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (size < 16) {
                throw DecodeError("wav: fmt chunk too small (" +
                                  std::to_string(size) + " bytes)");
            }
            const std::size_t fmt_end = cur.pos + size;
            fmt.format = cur.u16("fmt tag");
            fmt.channels = cur.u16("channel count");
            fmt.sample_rate = cur.u32("sample rate");
            cur.u32("byte rate");
            cur.u16("block align");
            fmt.bits = cur.u16("bits per sample");
            cur.require(fmt_end - cur.pos, "fmt chunk");
            cur.pos = fmt_end;
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            if (cur.remaining() < size) {
                throw DecodeError("wav: truncated data chunk, declared " +
                                  std::to_string(size) + " bytes but only " +
                                  std::to_string(cur.remaining()) +
                                  " remain");
            }
            data = bytes.subspan(cur.pos, size);
            cur.pos += size;
            have_data = true;
        } else {
            cur.require(size, "chunk body");
            cur.pos += size;
        }
        if (cur.pos % 2 == 1 && cur.remaining() > 0) {
            ++cur.pos;  // RIFF chunks are word-aligned
        }
    }

    if (!have_fmt) {
        throw DecodeError("wav: no fmt chunk");
    }
    if (!have_data) {
        throw DecodeError("wav: no data chunk");
    }

    const bool supported =
        (fmt.format == kFormatPcm && (fmt.bits == 8 || fmt.bits == 16)) ||
        (fmt.format == kFormatIeeeFloat && fmt.bits == 32);
    if (!supported) {
        throw UnsupportedFormatError(
            "wav: unsupported codec (format tag " +
            std::to_string(fmt.format) + ", " + std::to_string(fmt.bits) +
            " bits per sample)");
    }
    if (fmt.channels != 1 && fmt.channels != 2) {
        throw UnsupportedFormatError("wav: unsupported channel count " +
                                     std::to_string(fmt.channels));
    }
    if (fmt.sample_rate < 8000) {
        throw UnsupportedFormatError("wav: sample rate " +
                                     std::to_string(fmt.sample_rate) +
                                     " below the 8000 Hz minimum");
    }

    const std::size_t bytes_per_sample = fmt.bits / 8;
    const std::size_t stride = bytes_per_sample * fmt.channels;
    if (stride == 0 || data.size() % stride != 0) {
        throw DecodeError("wav: data chunk size " +
                          std::to_string(data.size()) +
                          " is not a whole number of sample frames");
    }
    const std::size_t n_frames = data.size() / stride;

    AudioBuffer out;
    out.sample_rate = static_cast<int>(fmt.sample_rate);
    out.samples.resize(static_cast<Eigen::Index>(n_frames));
    for (std::size_t i = 0; i < n_frames; ++i) {
        const std::uint8_t* p = data.data() + i * stride;
        double v = decode_sample(p, fmt);
        if (fmt.channels == 2) {
            v = 0.5 * (v + decode_sample(p + bytes_per_sample, fmt));
        }
        out.samples(static_cast<Eigen::Index>(i)) = v;
    }
    return out;
}

AudioBuffer load_wav_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DecodeError("wav: cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return load_wav(bytes);
}

std::vector<std::uint8_t> encode_wav_pcm16(const AudioBuffer& buf) {
    const std::uint32_t n = static_cast<std::uint32_t>(buf.samples.size());
    const std::uint32_t data_size = n * 2;
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_size);

    auto push_u32 = [&out](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    };
    auto push_u16 = [&out](std::uint16_t v) {
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
    };
    auto push_tag = [&out](const char* tag) {
        out.insert(out.end(), tag, tag + 4);
    };

    push_tag("RIFF");
    push_u32(36 + data_size);
    push_tag("WAVE");
    push_tag("fmt ");
    push_u32(16);
    push_u16(kFormatPcm);
    push_u16(1);
    push_u32(static_cast<std::uint32_t>(buf.sample_rate));
    push_u32(static_cast<std::uint32_t>(buf.sample_rate) * 2);
    push_u16(2);
    push_u16(16);
    push_tag("data");
    push_u32(data_size);
    for (Eigen::Index i = 0; i < buf.samples.size(); ++i) {
        const double clamped = std::clamp(buf.samples(i), -1.0, 1.0);
        const auto v =
            static_cast<std::int16_t>(std::lrint(clamped * 32767.0));
        push_u16(static_cast<std::uint16_t>(v));
    }
    return out;
}

void save_wav_file(const AudioBuffer& buf,
                   const std::filesystem::path& path) {
    const auto bytes = encode_wav_pcm16(buf);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DecodeError("wav: cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

AudioBuffer AudioBuffer::slice(double begin_s, double end_s) const {
    const auto n = samples.size();
    auto to_index = [&](double t) {
        const auto i = static_cast<Eigen::Index>(std::llround(t * sample_rate));
        return std::clamp<Eigen::Index>(i, 0, n);
    };
    const Eigen::Index b = to_index(begin_s);
    const Eigen::Index e = to_index(end_s);
    AudioBuffer out;
    out.sample_rate = sample_rate;
    out.samples = samples.segment(b, std::max<Eigen::Index>(0, e - b));
    return out;
}

}  // namespace emofuse::signal
