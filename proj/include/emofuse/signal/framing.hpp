#pragma once

#include <Eigen/Dense>

#include "emofuse/signal/wav.hpp"

namespace emofuse::signal {

enum class Window {
    Rectangular,
    Hann,
};

/// Analysis framing. frame_len must be a power of two when the frames feed
/// the fast transform; hop_len in (0, frame_len].
struct FrameSpec {
    int frame_len = 1024;
    int hop_len = 512;
    Window window = Window::Hann;

    void validate() const;
};

/// Periodic Hann curve, w[n] = 0.5 (1 - cos(2 pi n / N)).
Eigen::VectorXd hann_window(int n);

/// Slices the buffer into floor((len - frame_len) / hop_len) + 1 frames
/// (one per matrix row) with the window applied elementwise.
/// Throws InsufficientDataError when the buffer is shorter than one frame.
Eigen::MatrixXd frame_signal(const AudioBuffer& buf, const FrameSpec& spec);

/// Per-frame peak amplitude max |sample|, taken before windowing.
Eigen::VectorXd amplitude_series(const AudioBuffer& buf,
                                 const FrameSpec& spec);

}  // namespace emofuse::signal
