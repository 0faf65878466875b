#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace emofuse::signal {

/// Mono sample stream. Samples live in [-1, 1]; sample_rate >= 8000.
struct AudioBuffer {
    Eigen::VectorXd samples;
    int sample_rate = 0;

    double duration_s() const {
        return sample_rate > 0
                   ? static_cast<double>(samples.size()) / sample_rate
                   : 0.0;
    }

    /// Copy of samples in [begin_s, end_s), clamped to the buffer.
    AudioBuffer slice(double begin_s, double end_s) const;
};

/// Decodes a RIFF/WAVE byte stream.
///
/// Accepts PCM 8-bit unsigned, PCM 16-bit signed, and IEEE float 32-bit,
/// 1 or 2 channels. Stereo is averaged to mono. Integer samples are scaled
/// by the type's max magnitude (128 for 8-bit, 32768 for 16-bit); float
/// samples are clamped to [-1, 1]. Unknown chunks are skipped.
///
/// Throws DecodeError (with the byte offset or the chunk name) on malformed
/// input, UnsupportedFormatError on codecs or layouts outside the above.
AudioBuffer load_wav(std::span<const std::uint8_t> bytes);

AudioBuffer load_wav_file(const std::filesystem::path& path);

/// Serializes mono 16-bit PCM. Samples are clamped to [-1, 1] then scaled
/// by 32767.
std::vector<std::uint8_t> encode_wav_pcm16(const AudioBuffer& buf);

void save_wav_file(const AudioBuffer& buf, const std::filesystem::path& path);

}  // namespace emofuse::signal
