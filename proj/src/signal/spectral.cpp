#include "emofuse/signal/spectral.hpp"

#include <cmath>

#include "emofuse/errors.hpp"
#include "emofuse/signal/fft.hpp"

namespace emofuse::signal {

Spectrogram stft(const AudioBuffer& buf, const FrameSpec& spec) {
    if (!is_power_of_two(spec.frame_len)) {
        throw ShapeError("stft: frame_len " + std::to_string(spec.frame_len) +
                         " is not a power of two");
    }
    const Eigen::MatrixXd frames = frame_signal(buf, spec);
    const Eigen::Index bins = spec.frame_len / 2 + 1;

    Spectrogram sg;
    sg.bin_hz = static_cast<double>(buf.sample_rate) / spec.frame_len;
    sg.magnitudes.resize(frames.rows(), bins);
    VectorXcd frame(spec.frame_len);
    for (Eigen::Index i = 0; i < frames.rows(); ++i) {
        frame.real() = frames.row(i);
        frame.imag().setZero();
        const VectorXcd spectrum = fft(frame);
        sg.magnitudes.row(i) = spectrum.head(bins).cwiseAbs();
    }
    return sg;
}

double hz_to_mel(double hz) {
    return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double mel_to_hz(double mel) {
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank mel_filterbank(int n_mels, int frame_len, int sample_rate,
                             double fmin, double fmax) {
    if (n_mels <= 0) {
        throw ParameterError("mel filterbank: n_mels must be positive");
    }
    if (!(0.0 <= fmin && fmin < fmax && fmax <= sample_rate / 2.0)) {
        throw ParameterError("mel filterbank: need 0 <= fmin < fmax <= "
                             "sample_rate/2, got fmin " +
                             std::to_string(fmin) + ", fmax " +
                             std::to_string(fmax));
    }

    const int bins = frame_len / 2 + 1;
    const double bin_hz = static_cast<double>(sample_rate) / frame_len;

    // n_mels + 2 edge points equally spaced in mel; triangle m spans
    // edges [m, m+2] and peaks at edge m+1.
    const double mel_lo = hz_to_mel(fmin);
    const double mel_hi = hz_to_mel(fmax);
    Eigen::VectorXd edges_hz(n_mels + 2);
    for (int i = 0; i < n_mels + 2; ++i) {
        edges_hz(i) =
            mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));
    }

    MelFilterbank fb;
    fb.fmin = fmin;
    fb.fmax = fmax;
    fb.triangles = Eigen::MatrixXd::Zero(n_mels, bins);
    for (int m = 0; m < n_mels; ++m) {
        const double left = edges_hz(m);
        const double center = edges_hz(m + 1);
        const double right = edges_hz(m + 2);
        for (int k = 0; k < bins; ++k) {
            const double f = k * bin_hz;
            double w = 0.0;
            if (f > left && f < right) {
                w = f <= center ? (f - left) / (center - left)
                                : (right - f) / (right - center);
            }
            fb.triangles(m, k) = w;
        }
    }
    return fb;
}

Eigen::MatrixXd mel_spectrogram(const AudioBuffer& buf, const FrameSpec& spec,
                                int n_mels) {
    const Spectrogram sg = stft(buf, spec);
    const MelFilterbank fb = mel_filterbank(n_mels, spec.frame_len,
                                            buf.sample_rate, 0.0,
                                            buf.sample_rate / 2.0);
    // power spectrogram through the triangles
    return sg.magnitudes.array().square().matrix() * fb.triangles.transpose();
}

Eigen::MatrixXd mfcc(const AudioBuffer& buf, const FrameSpec& spec,
                     int n_mels, int n_mfcc) {
    if (n_mfcc <= 0 || n_mfcc > n_mels) {
        throw ParameterError("mfcc: need 0 < n_mfcc <= n_mels");
    }
    const Eigen::MatrixXd mel = mel_spectrogram(buf, spec, n_mels);
    const Eigen::MatrixXd log_mel =
        (mel.array() + kMfccLogFloor).log().matrix();

    // Orthonormal DCT-II basis, coefficients k = 0..n_mfcc-1.
    Eigen::MatrixXd basis(n_mels, n_mfcc);
    for (int k = 0; k < n_mfcc; ++k) {
        const double scale =
            k == 0 ? std::sqrt(1.0 / n_mels) : std::sqrt(2.0 / n_mels);
        for (int n = 0; n < n_mels; ++n) {
            basis(n, k) = scale * std::cos(M_PI * k * (2 * n + 1) /
                                           (2.0 * n_mels));
        }
    }
    return log_mel * basis;
}

Eigen::VectorXd chroma_vector(const Eigen::VectorXd& magnitude_frame,
                              double bin_hz) {
    if (bin_hz <= 0.0) {
        throw ParameterError("chroma: bin_hz must be positive");
    }
    Eigen::VectorXd chroma = Eigen::VectorXd::Zero(12);
    for (Eigen::Index k = 0; k < magnitude_frame.size(); ++k) {
        const double f = k * bin_hz;
        if (f < 20.0) {
            continue;
        }
        const auto pitch =
            static_cast<long>(std::lround(12.0 * std::log2(f / kChromaRefHz)));
        const int pc = static_cast<int>(((pitch % 12) + 12) % 12);
        chroma(pc) += magnitude_frame(k);
    }
    const double total = chroma.sum();
    if (total <= 0.0) {
        return Eigen::VectorXd::Constant(12, 1.0 / 12.0);  // declared silence
    }
    return chroma / total;
}

double chroma_deviation(const Eigen::MatrixXd& chroma_frames) {
    if (chroma_frames.rows() == 0) {
        throw InsufficientDataError("chroma deviation: empty series");
    }
    if (chroma_frames.cols() != 12) {
        throw ShapeError("chroma deviation: expected 12 columns, got " +
                         std::to_string(chroma_frames.cols()));
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < chroma_frames.rows(); ++i) {
        const Eigen::VectorXd row = chroma_frames.row(i);
        const double mean = row.mean();
        acc += std::sqrt((row.array() - mean).square().mean());
    }
    return acc / static_cast<double>(chroma_frames.rows());
}

}  // namespace emofuse::signal
