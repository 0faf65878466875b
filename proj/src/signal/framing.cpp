#include "emofuse/signal/framing.hpp"

#include <cmath>

#include "emofuse/errors.hpp"

namespace emofuse::signal {

void FrameSpec::validate() const {
    if (frame_len <= 0 || hop_len <= 0 || hop_len > frame_len) {
        throw ParameterError("frame spec: need 0 < hop_len <= frame_len, got "
                             "hop " + std::to_string(hop_len) + ", frame " +
                             std::to_string(frame_len));
    }
}

Eigen::VectorXd hann_window(int n) {
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
        w(i) = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / n));
    }
    return w;
}

namespace {

Eigen::Index frame_count(const AudioBuffer& buf, const FrameSpec& spec) {
    spec.validate();
    if (buf.samples.size() < spec.frame_len) {
        throw InsufficientDataError(
            "framing: buffer of " + std::to_string(buf.samples.size()) +
            " samples is shorter than one frame (" +
            std::to_string(spec.frame_len) + ")");
    }
    return (buf.samples.size() - spec.frame_len) / spec.hop_len + 1;
}

}  // namespace

Eigen::MatrixXd frame_signal(const AudioBuffer& buf, const FrameSpec& spec) {
    const Eigen::Index n = frame_count(buf, spec);
    Eigen::MatrixXd frames(n, spec.frame_len);
    for (Eigen::Index i = 0; i < n; ++i) {
        frames.row(i) = buf.samples.segment(i * spec.hop_len, spec.frame_len);
    }
    if (spec.window == Window::Hann) {
        const Eigen::VectorXd w = hann_window(spec.frame_len);
        frames.array().rowwise() *= w.transpose().array();
    }
    return frames;
}

Eigen::VectorXd amplitude_series(const AudioBuffer& buf,
                                 const FrameSpec& spec) {
    const Eigen::Index n = frame_count(buf, spec);
    Eigen::VectorXd peaks(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        peaks(i) = buf.samples.segment(i * spec.hop_len, spec.frame_len)
                       .cwiseAbs()
                       .maxCoeff();
    }
    return peaks;
}

}  // namespace emofuse::signal
