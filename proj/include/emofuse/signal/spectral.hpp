#pragma once

#include <Eigen/Dense>

#include "emofuse/signal/framing.hpp"

namespace emofuse::signal {

/// Magnitude short-time spectrum. One row per frame, frame_len/2 + 1 bins,
/// bin k centered at k * bin_hz.
struct Spectrogram {
    Eigen::MatrixXd magnitudes;  // frames x bins, non-negative
    double bin_hz = 0.0;

    Eigen::Index frames() const { return magnitudes.rows(); }
    Eigen::Index bins() const { return magnitudes.cols(); }
};

Spectrogram stft(const AudioBuffer& buf, const FrameSpec& spec);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular mel filters. Rows are weights over the spectrogram bins;
/// centers are equally spaced in mel between fmin and fmax and every
/// triangle peaks at 1 (no area normalization). Row support is contiguous.
struct MelFilterbank {
    Eigen::MatrixXd triangles;  // n_mels x bins
    double fmin = 0.0;
    double fmax = 0.0;

    int n_mels() const { return static_cast<int>(triangles.rows()); }
};

MelFilterbank mel_filterbank(int n_mels, int frame_len, int sample_rate,
                             double fmin, double fmax);

/// Power spectrogram (|magnitude|^2) pushed through the filterbank.
/// Returns frames x n_mels energies. Filters span 0..sample_rate/2.
Eigen::MatrixXd mel_spectrogram(const AudioBuffer& buf, const FrameSpec& spec,
                                int n_mels);

/// Orthonormal DCT-II of log(mel energy + 1e-10); the first n_mfcc
/// coefficients are kept. Requires n_mfcc <= n_mels.
Eigen::MatrixXd mfcc(const AudioBuffer& buf, const FrameSpec& spec,
                     int n_mels, int n_mfcc);

inline constexpr double kMfccLogFloor = 1e-10;

/// Reference pitch for the chroma map: C4.
inline constexpr double kChromaRefHz = 261.63;

/// Folds one magnitude frame into the 12 pitch classes
/// round(12 log2(f / C4)) mod 12, considering bins at >= 20 Hz, and
/// normalizes to unit sum. An all-zero frame returns the declared silence
/// value, uniform 1/12.
Eigen::VectorXd chroma_vector(const Eigen::VectorXd& magnitude_frame,
                              double bin_hz);

/// Mean over frames of the per-frame population standard deviation across
/// the 12 chroma bins. Throws InsufficientDataError on an empty series.
double chroma_deviation(const Eigen::MatrixXd& chroma_frames);

}  // namespace emofuse::signal
