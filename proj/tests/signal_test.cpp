#include <doctest.h>

#include <cmath>

#include "emofuse/errors.hpp"
#include "emofuse/signal/features.hpp"
#include "emofuse/signal/fft.hpp"
#include "emofuse/signal/wav.hpp"
#include "oracles.hpp"

using namespace emofuse;
using namespace emofuse::signal;

namespace {

std::vector<std::uint8_t> wav_header(std::uint16_t format,
                                     std::uint16_t channels,
                                     std::uint32_t rate, std::uint16_t bits,
                                     std::uint32_t data_size) {
    std::vector<std::uint8_t> b;
    auto u32 = [&b](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
    };
    auto u16 = [&b](std::uint16_t v) {
        b.push_back(v & 0xff);
        b.push_back(v >> 8);
    };
    auto tag = [&b](const char* t) { b.insert(b.end(), t, t + 4); };
    tag("RIFF");
    u32(36 + data_size);
    tag("WAVE");
    tag("fmt ");
    u32(16);
    u16(format);
    u16(channels);
    u32(rate);
    u32(rate * channels * bits / 8);
    u16(channels * bits / 8);
    u16(bits);
    tag("data");
    u32(data_size);
    return b;
}

AudioBuffer tone(double hz, double seconds, int rate = 16000,
                 double amp = 0.5) {
    AudioBuffer buf;
    buf.sample_rate = rate;
    const auto n = static_cast<Eigen::Index>(seconds * rate);
    buf.samples.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        buf.samples(i) = amp * std::sin(2.0 * M_PI * hz * i / rate);
    }
    return buf;
}

AudioBuffer silence(double seconds, int rate = 16000) {
    AudioBuffer buf;
    buf.sample_rate = rate;
    buf.samples =
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(seconds * rate));
    return buf;
}

}  // namespace

TEST_CASE("load_wav decodes 16-bit mono at full scale") {
    auto bytes = wav_header(1, 1, 16000, 16, 4);
    bytes.insert(bytes.end(), {0xff, 0x7f, 0x00, 0x80});  // 32767, -32768
    const AudioBuffer buf = load_wav(bytes);
    REQUIRE(buf.samples.size() == 2);
    CHECK(buf.sample_rate == 16000);
    CHECK(buf.samples(0) == doctest::Approx(32767.0 / 32768.0));
    CHECK(buf.samples(1) == doctest::Approx(-1.0));
}

TEST_CASE("load_wav averages stereo to mono") {
    auto bytes = wav_header(3, 2, 16000, 32, 8);
    const float l = 0.5f, r = -0.5f;
    const auto* lp = reinterpret_cast<const std::uint8_t*>(&l);
    const auto* rp = reinterpret_cast<const std::uint8_t*>(&r);
    bytes.insert(bytes.end(), lp, lp + 4);
    bytes.insert(bytes.end(), rp, rp + 4);
    const AudioBuffer buf = load_wav(bytes);
    REQUIRE(buf.samples.size() == 1);
    CHECK(buf.samples(0) == doctest::Approx(0.0));
}

TEST_CASE("load_wav decodes 8-bit unsigned PCM") {
    auto bytes = wav_header(1, 1, 16000, 8, 3);
    bytes.insert(bytes.end(), {0, 128, 255});
    const AudioBuffer buf = load_wav(bytes);
    CHECK(buf.samples(0) == doctest::Approx(-1.0));
    CHECK(buf.samples(1) == doctest::Approx(0.0));
    CHECK(buf.samples(2) == doctest::Approx(127.0 / 128.0));
}

TEST_CASE("load_wav error paths") {
    SUBCASE("truncated data chunk names the chunk") {
        auto bytes = wav_header(1, 1, 16000, 16, 100);  // declares 100 bytes
        bytes.insert(bytes.end(), {0x00, 0x00});        // delivers 2
        CHECK_THROWS_WITH_AS(load_wav(bytes),
                             doctest::Contains("data chunk"), DecodeError);
    }
    SUBCASE("garbage header") {
        const std::vector<std::uint8_t> bytes = {'N', 'O', 'P', 'E', 0, 0,
                                                 0,   0,   'W', 'A', 'V', 'E'};
        CHECK_THROWS_AS(load_wav(bytes), DecodeError);
    }
    SUBCASE("unsupported codec") {
        const auto bytes = wav_header(2, 1, 16000, 16, 0);  // ADPCM
        CHECK_THROWS_AS(load_wav(bytes), UnsupportedFormatError);
    }
    SUBCASE("sample rate below 8 kHz") {
        const auto bytes = wav_header(1, 1, 4000, 16, 0);
        CHECK_THROWS_AS(load_wav(bytes), UnsupportedFormatError);
    }
}

TEST_CASE("wav pcm16 round trip") {
    const AudioBuffer buf = tone(440.0, 0.1);
    const AudioBuffer back = load_wav(encode_wav_pcm16(buf));
    REQUIRE(back.samples.size() == buf.samples.size());
    CHECK((back.samples - buf.samples).cwiseAbs().maxCoeff() < 1.0 / 32000.0);
}

TEST_CASE("frame_signal arithmetic and windows") {
    AudioBuffer buf;
    buf.sample_rate = 16000;
    buf.samples = Eigen::VectorXd::Ones(1000);
    FrameSpec spec{400, 200, Window::Rectangular};

    SUBCASE("frame count follows the floor formula") {
        CHECK(frame_signal(buf, spec).rows() == 4);
    }
    SUBCASE("rectangular frames are verbatim slices") {
        SplitMix64 rng(1);
        buf.samples = oracles::random_vector(rng, 1000);
        const Eigen::MatrixXd frames = frame_signal(buf, spec);
        CHECK((frames.row(2).transpose() - buf.samples.segment(400, 400))
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    }
    SUBCASE("hann window on ones reproduces the hann curve") {
        spec.window = Window::Hann;
        const Eigen::MatrixXd frames = frame_signal(buf, spec);
        for (int i = 0; i < 400; ++i) {
            const double expected =
                0.5 * (1.0 - std::cos(2.0 * M_PI * i / 400.0));
            CHECK(frames(0, i) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    SUBCASE("buffer shorter than one frame") {
        buf.samples = Eigen::VectorXd::Zero(100);
        CHECK_THROWS_AS(frame_signal(buf, spec), InsufficientDataError);
    }
    SUBCASE("bad hop") {
        spec.hop_len = 0;
        CHECK_THROWS_AS(frame_signal(buf, spec), ParameterError);
    }
}

TEST_CASE("fft matches closed forms") {
    SUBCASE("impulse is flat") {
        VectorXcd x = VectorXcd::Zero(4);
        x(0) = 1.0;
        const VectorXcd spectrum = fft(x);
        for (int k = 0; k < 4; ++k) {
            CHECK(std::abs(spectrum(k) - 1.0) < 1e-12);
        }
    }
    SUBCASE("constant signal is DC only") {
        const VectorXcd spectrum = fft(VectorXcd::Ones(8));
        CHECK(std::abs(spectrum(0) - 8.0) < 1e-12);
        for (int k = 1; k < 8; ++k) {
            CHECK(std::abs(spectrum(k)) < 1e-12);
        }
    }
    SUBCASE("non-power-of-two length") {
        CHECK_THROWS_AS(fft(VectorXcd::Zero(12)), ShapeError);
    }
}

TEST_CASE("fft agrees with the naive DFT on random input") {
    SplitMix64 rng(42);
    VectorXcd x(512);
    for (int i = 0; i < 512; ++i) {
        x(i) = {2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0};
    }
    const VectorXcd fast = fft(x);
    const VectorXcd slow = oracles::naive_dft(x);
    CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("fft round trip and Parseval over all sizes") {
    SplitMix64 rng(7);
    for (Eigen::Index n = 2; n <= 4096; n *= 2) {
        VectorXcd x(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            x(i) = {2.0 * rng.next_double() - 1.0,
                    2.0 * rng.next_double() - 1.0};
        }
        const VectorXcd spectrum = fft(x);
        CHECK((ifft(spectrum) - x).cwiseAbs().maxCoeff() <= 1e-9);
        const double time_energy = x.cwiseAbs2().sum();
        const double freq_energy =
            spectrum.cwiseAbs2().sum() / static_cast<double>(n);
        CHECK(std::abs(time_energy - freq_energy) <=
              1e-9 * std::max(1.0, time_energy));
    }
}

TEST_CASE("stft localizes a bin-aligned tone") {
    // bin 64 of a 1024-point transform at 16 kHz is exactly 1000 Hz
    const AudioBuffer buf = tone(1000.0, 0.5);
    const Spectrogram sg = stft(buf, FrameSpec{});
    CHECK(sg.bin_hz == doctest::Approx(16000.0 / 1024.0));
    CHECK(sg.bins() == 513);
    for (Eigen::Index f = 0; f < sg.frames(); ++f) {
        Eigen::Index argmax = 0;
        sg.magnitudes.row(f).maxCoeff(&argmax);
        CHECK(argmax == 64);
    }
}

TEST_CASE("stft of silence is zero") {
    const Spectrogram sg = stft(silence(0.5), FrameSpec{});
    CHECK(sg.magnitudes.maxCoeff() == 0.0);
}

TEST_CASE("amplitude_series takes pre-window peaks") {
    FrameSpec spec{400, 200, Window::Hann};
    SUBCASE("silence and constants") {
        CHECK(amplitude_series(silence(0.5), spec).maxCoeff() == 0.0);
        AudioBuffer buf;
        buf.sample_rate = 16000;
        buf.samples = Eigen::VectorXd::Constant(1000, 0.3);
        const Eigen::VectorXd peaks = amplitude_series(buf, spec);
        for (Eigen::Index i = 0; i < peaks.size(); ++i) {
            CHECK(peaks(i) == doctest::Approx(0.3));
        }
    }
    SUBCASE("ramp peaks at the end") {
        AudioBuffer buf;
        buf.sample_rate = 16000;
        buf.samples = Eigen::VectorXd::LinSpaced(1000, 0.0, 1.0);
        const Eigen::VectorXd peaks = amplitude_series(buf, spec);
        CHECK(peaks(peaks.size() - 1) == doctest::Approx(1.0));
    }
}

TEST_CASE("zero crossing rate") {
    Eigen::VectorXd alternating(4);
    alternating << 1, -1, 1, -1;
    CHECK(zero_crossing_rate(alternating) == 1.0);
    CHECK(zero_crossing_rate(Eigen::VectorXd::Constant(4, 5.0)) == 0.0);
    Eigen::VectorXd mixed(5);
    mixed << 1, 2, -3, 4, 5;
    CHECK(zero_crossing_rate(mixed) == 0.5);
    CHECK_THROWS_AS(zero_crossing_rate(Eigen::VectorXd::Ones(1)),
                    InsufficientDataError);
}

TEST_CASE("rms") {
    Eigen::VectorXd v(4);
    v << 3, -4, 0, 0;
    CHECK(rms(v) == doctest::Approx(2.5));
    CHECK(rms(Eigen::VectorXd::Zero(8)) == 0.0);
    CHECK(rms(Eigen::VectorXd::Constant(5, -0.7)) == doctest::Approx(0.7));
    CHECK_THROWS_AS(rms(Eigen::VectorXd()), InsufficientDataError);

    // homogeneity: rms(a x) = |a| rms(x)
    SplitMix64 rng(3);
    const Eigen::VectorXd x = oracles::random_vector(rng, 64);
    CHECK(rms(-2.5 * x) == doctest::Approx(2.5 * rms(x)));
}

TEST_CASE("mel scale and filterbank") {
    CHECK(hz_to_mel(0.0) == 0.0);
    CHECK(hz_to_mel(700.0) ==
          doctest::Approx(2595.0 * std::log10(2.0)).epsilon(1e-12));

    const MelFilterbank fb = mel_filterbank(40, 1024, 16000, 0.0, 8000.0);
    REQUIRE(fb.n_mels() == 40);
    REQUIRE(fb.triangles.cols() == 513);

    SUBCASE("rows are non-negative with contiguous support") {
        for (int m = 0; m < fb.n_mels(); ++m) {
            int first = -1, last = -1;
            for (int k = 0; k < fb.triangles.cols(); ++k) {
                CHECK(fb.triangles(m, k) >= 0.0);
                CHECK(fb.triangles(m, k) <= 1.0);
                if (fb.triangles(m, k) > 0.0) {
                    if (first < 0) first = k;
                    last = k;
                }
            }
            REQUIRE(first >= 0);
            for (int k = first; k <= last; ++k) {
                CHECK(fb.triangles(m, k) > 0.0);
            }
        }
    }
    SUBCASE("triangle peaks step monotonically through the bins") {
        Eigen::Index prev = -1;
        for (int m = 0; m < fb.n_mels(); ++m) {
            Eigen::Index peak = 0;
            fb.triangles.row(m).maxCoeff(&peak);
            CHECK(peak >= prev);
            prev = peak;
        }
    }
    SUBCASE("invalid frequency range") {
        CHECK_THROWS_AS(mel_filterbank(40, 1024, 16000, 4000.0, 2000.0),
                        ParameterError);
        CHECK_THROWS_AS(mel_filterbank(40, 1024, 16000, 0.0, 9000.0),
                        ParameterError);
    }
}

TEST_CASE("mel spectrogram localizes a 1 kHz tone") {
    const AudioBuffer buf = tone(1000.0, 0.5);
    const Eigen::MatrixXd mel = mel_spectrogram(buf, FrameSpec{}, 40);
    CHECK(mel.minCoeff() >= 0.0);

    // band centers are the interior mel grid points
    const double lo = hz_to_mel(0.0);
    const double hi = hz_to_mel(8000.0);
    for (Eigen::Index f = 0; f < mel.rows(); ++f) {
        Eigen::Index band = 0;
        mel.row(f).maxCoeff(&band);
        const double center_hz =
            mel_to_hz(lo + (hi - lo) * static_cast<double>(band + 1) / 41.0);
        const double next_hz =
            mel_to_hz(lo + (hi - lo) * static_cast<double>(band + 2) / 41.0);
        CHECK(std::abs(center_hz - 1000.0) <= next_hz - center_hz);
    }
    CHECK(mel_spectrogram(silence(0.5), FrameSpec{}, 40).maxCoeff() == 0.0);
}

TEST_CASE("mfcc of silence isolates coefficient zero") {
    const Eigen::MatrixXd coeffs = mfcc(silence(0.5), FrameSpec{}, 40, 13);
    const double c0 = std::sqrt(40.0) * std::log(1e-10);
    for (Eigen::Index f = 0; f < coeffs.rows(); ++f) {
        CHECK(coeffs(f, 0) == doctest::Approx(c0).epsilon(1e-9));
        for (int k = 1; k < 13; ++k) {
            CHECK(std::abs(coeffs(f, k)) < 1e-9);
        }
        CHECK((coeffs.row(f) - coeffs.row(0)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("mfcc matches the direct-definition oracle") {
    SplitMix64 rng(11);
    AudioBuffer buf;
    buf.sample_rate = 16000;
    buf.samples = oracles::random_vector(rng, 3000, 0.8);
    const FrameSpec spec{1024, 512, Window::Hann};
    const Eigen::MatrixXd fast = mfcc(buf, spec, 40, 13);
    const Eigen::MatrixXd slow = oracles::direct_mfcc(buf, spec, 40, 13);
    REQUIRE(fast.rows() == slow.rows());
    CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK_THROWS_AS(mfcc(buf, spec, 40, 41), ParameterError);
}

TEST_CASE("chroma vector folds pitch correctly") {
    SUBCASE("440 Hz lands on pitch class A") {
        const Spectrogram sg = stft(tone(440.0, 0.3), FrameSpec{});
        const Eigen::VectorXd chroma =
            chroma_vector(sg.magnitudes.row(0), sg.bin_hz);
        Eigen::Index argmax = 0;
        chroma.maxCoeff(&argmax);
        CHECK(argmax == 9);
        CHECK(chroma.sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("octaves fold to the same class") {
        const Spectrogram low = stft(tone(220.0, 0.3), FrameSpec{});
        const Spectrogram high = stft(tone(440.0, 0.3), FrameSpec{});
        Eigen::Index a = 0, b = 0;
        chroma_vector(low.magnitudes.row(0), low.bin_hz).maxCoeff(&a);
        chroma_vector(high.magnitudes.row(0), high.bin_hz).maxCoeff(&b);
        CHECK(a == b);
    }
    SUBCASE("silence returns the declared uniform value") {
        const Eigen::VectorXd chroma =
            chroma_vector(Eigen::VectorXd::Zero(513), 16000.0 / 1024.0);
        for (int i = 0; i < 12; ++i) {
            CHECK(chroma(i) == doctest::Approx(1.0 / 12.0));
        }
    }
}

TEST_CASE("chroma deviation") {
    SUBCASE("uniform frames have zero deviation") {
        CHECK(chroma_deviation(
                  Eigen::MatrixXd::Constant(5, 12, 1.0 / 12.0)) == 0.0);
    }
    SUBCASE("one-hot frame has the closed-form deviation") {
        Eigen::MatrixXd frames = Eigen::MatrixXd::Zero(1, 12);
        frames(0, 3) = 1.0;
        CHECK(chroma_deviation(frames) ==
              doctest::Approx(std::sqrt(11.0) / 12.0).epsilon(1e-12));
    }
    SUBCASE("constant frames equal the single-frame value") {
        Eigen::MatrixXd one = Eigen::MatrixXd::Zero(1, 12);
        one(0, 3) = 1.0;
        const Eigen::MatrixXd many = one.replicate(7, 1);
        CHECK(chroma_deviation(many) == doctest::Approx(chroma_deviation(one)));
    }
    SUBCASE("empty series") {
        CHECK_THROWS_AS(chroma_deviation(Eigen::MatrixXd(0, 12)),
                        InsufficientDataError);
    }
}

TEST_CASE("extract_features summarizes a clip") {
    const FrameSpec spec;
    const FeatureConfig config;

    SUBCASE("silence") {
        const AudioFeatureVector fv =
            extract_features(silence(0.5), spec, config);
        CHECK(fv.zcr_mean == 0.0);
        CHECK(fv.rms_mean == 0.0);
        for (int i = 0; i < 12; ++i) {
            CHECK(fv.chroma(i) == doctest::Approx(1.0 / 12.0));
        }
    }
    SUBCASE("1 kHz tone crosses zero at twice its frequency") {
        const AudioFeatureVector fv =
            extract_features(tone(1000.0, 0.5), spec, config);
        CHECK(fv.zcr_mean ==
              doctest::Approx(2.0 * 1000.0 / 16000.0).epsilon(0.1));
    }
    SUBCASE("flattened vector has the fixed schema length") {
        const AudioFeatureVector fv =
            extract_features(tone(440.0, 0.2), spec, config);
        // zcr, rms, 12 chroma, chroma_dev, then the MFCC means
        CHECK(fv.flatten().size() == 15 + config.n_mfcc);
    }
    SUBCASE("deterministic") {
        const AudioBuffer buf = tone(523.0, 0.3);
        const auto a = extract_features(buf, spec, config).flatten();
        const auto b = extract_features(buf, spec, config).flatten();
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("feature csv header is pinned") {
    CHECK(feature_csv_header(2) ==
          "clip_id,zcr,rms,chroma_0,chroma_1,chroma_2,chroma_3,chroma_4,"
          "chroma_5,chroma_6,chroma_7,chroma_8,chroma_9,chroma_10,chroma_11,"
          "chroma_dev,mfcc_0,mfcc_1");
}
