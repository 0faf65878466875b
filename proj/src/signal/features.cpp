#include "emofuse/signal/features.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emofuse/errors.hpp"

namespace emofuse::signal {

double zero_crossing_rate(const Eigen::VectorXd& frame) {
    if (frame.size() < 2) {
        throw InsufficientDataError(
            "zcr: need at least 2 samples, got " +
            std::to_string(frame.size()));
    }
    auto positive = [](double x) { return x >= 0.0; };  // sign(0) = +
    Eigen::Index changes = 0;
    for (Eigen::Index i = 1; i < frame.size(); ++i) {
        if (positive(frame(i)) != positive(frame(i - 1))) {
            ++changes;
        }
    }
    return static_cast<double>(changes) /
           static_cast<double>(frame.size() - 1);
}

double rms(const Eigen::VectorXd& frame) {
    if (frame.size() == 0) {
        throw InsufficientDataError("rms: empty frame");
    }
    return std::sqrt(frame.array().square().mean());
}

Eigen::VectorXd AudioFeatureVector::flatten() const {
    Eigen::VectorXd v(2 + chroma.size() + 1 + mfcc_means.size());
    v(0) = zcr_mean;
    v(1) = rms_mean;
    v.segment(2, chroma.size()) = chroma;
    v(2 + chroma.size()) = chroma_deviation;
    v.tail(mfcc_means.size()) = mfcc_means;
    return v;
}

AudioFeatureVector extract_features(const AudioBuffer& buf,
                                    const FrameSpec& spec,
                                    const FeatureConfig& config) {
    // ZCR and peak-based features read raw frames; spectral features the
    // windowed ones.
    FrameSpec raw = spec;
    raw.window = Window::Rectangular;
    const Eigen::MatrixXd raw_frames = frame_signal(buf, raw);
    const Eigen::Index n_frames = raw_frames.rows();

    AudioFeatureVector fv;
    for (Eigen::Index i = 0; i < n_frames; ++i) {
        const Eigen::VectorXd frame = raw_frames.row(i);
        fv.zcr_mean += zero_crossing_rate(frame);
        fv.rms_mean += rms(frame);
    }
    fv.zcr_mean /= static_cast<double>(n_frames);
    fv.rms_mean /= static_cast<double>(n_frames);

    const Spectrogram sg = stft(buf, spec);
    Eigen::MatrixXd chroma_frames(sg.frames(), 12);
    for (Eigen::Index i = 0; i < sg.frames(); ++i) {
        chroma_frames.row(i) = chroma_vector(sg.magnitudes.row(i), sg.bin_hz);
    }
    fv.chroma = chroma_frames.colwise().mean();
    fv.chroma_deviation = chroma_deviation(chroma_frames);

    const Eigen::MatrixXd coeffs =
        mfcc(buf, spec, config.n_mels, config.n_mfcc);
    fv.mfcc_means = coeffs.colwise().mean();
    return fv;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string feature_csv_header(int n_mfcc) {
    std::ostringstream os;
    os << "clip_id,zcr,rms";
    for (int i = 0; i < 12; ++i) {
        os << ",chroma_" << i;
    }
    os << ",chroma_dev";
    for (int i = 0; i < n_mfcc; ++i) {
        os << ",mfcc_" << i;
    }
    return os.str();
}

std::string feature_csv_row(const std::string& clip_id,
                            const AudioFeatureVector& fv) {
    std::ostringstream os;
    os << clip_id;
    const Eigen::VectorXd flat = fv.flatten();
    for (Eigen::Index i = 0; i < flat.size(); ++i) {
        os << ',' << fmt_double(flat(i));
    }
    return os.str();
}

std::string feature_json(const std::string& clip_id,
                         const AudioFeatureVector& fv) {
    nlohmann::json j;
    j["clip_id"] = clip_id;
    j["zcr_mean"] = fv.zcr_mean;
    j["rms_mean"] = fv.rms_mean;
    j["chroma"] = std::vector<double>(fv.chroma.begin(), fv.chroma.end());
    j["chroma_deviation"] = fv.chroma_deviation;
    j["mfcc_means"] =
        std::vector<double>(fv.mfcc_means.begin(), fv.mfcc_means.end());
    return j.dump(2);
}

}  // namespace emofuse::signal
