#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>

#include "emofuse/signal/spectral.hpp"

namespace emofuse::signal {

/// Count of consecutive sign changes divided by (N - 1); sign(0) counts as
/// positive. Needs at least two samples.
double zero_crossing_rate(const Eigen::VectorXd& frame);

/// sqrt(mean of squares). Needs a non-empty frame.
double rms(const Eigen::VectorXd& frame);

struct FeatureConfig {
    int n_mels = 40;
    int n_mfcc = 13;
};

/// Clip-level summary of the six features; per-frame series reduced by
/// arithmetic mean.
struct AudioFeatureVector {
    double zcr_mean = 0.0;
    double rms_mean = 0.0;
    Eigen::VectorXd chroma;       // 12 entries, unit sum
    double chroma_deviation = 0.0;
    Eigen::VectorXd mfcc_means;   // n_mfcc entries

    /// zcr, rms, chroma x12, chroma_dev, then the mfcc means.
    Eigen::VectorXd flatten() const;
};

AudioFeatureVector extract_features(const AudioBuffer& buf,
                                    const FrameSpec& spec,
                                    const FeatureConfig& config = {});

/// Fixed CSV header: clip_id,zcr,rms,chroma_0..11,chroma_dev,mfcc_0..N-1.
std::string feature_csv_header(int n_mfcc);
std::string feature_csv_row(const std::string& clip_id,
                            const AudioFeatureVector& fv);

std::string feature_json(const std::string& clip_id,
                         const AudioFeatureVector& fv);

}  // namespace emofuse::signal
