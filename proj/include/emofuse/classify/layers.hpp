#pragma once

#include <cstdint>

#include "emofuse/classify/tensor.hpp"
#include "emofuse/emotions.hpp"

namespace emofuse::classify {

/// 3x3 convolution kernels, out_ch x in_ch x 3 x 3 row-major, plus
/// per-channel bias and inference batch-norm statistics.
struct ConvBlockParams {
    int in_channels = 0;
    int out_channels = 0;
    Eigen::VectorXd kernels;  // out*in*9 row-major
    Eigen::VectorXd bias;     // out
    Eigen::VectorXd bn_gamma;
    Eigen::VectorXd bn_beta;
    Eigen::VectorXd bn_mean;
    Eigen::VectorXd bn_var;
    double bn_eps = 1e-5;
    double dropout_p = 0.25;

    double kernel(int oc, int ic, int ky, int kx) const {
        return kernels(((static_cast<Eigen::Index>(oc) * in_channels + ic) * 3 +
                        ky) *
                           3 +
                       kx);
    }
};

/// Cross-correlation, stride 1, zero padding 1 (same-size output), bias
/// added per output channel. Kernel in-channels must match the input.
Tensor conv2d(const Tensor& input, const ConvBlockParams& block);

/// y = gamma (x - mean) / sqrt(var + eps) + beta, per channel, using the
/// stored running statistics.
Tensor batchnorm_infer(const Tensor& input, const ConvBlockParams& block);

Tensor relu(const Tensor& input);

/// Non-overlapping 2x2 max; a trailing odd row or column is dropped.
Tensor maxpool2d(const Tensor& input);

enum class DropoutMode {
    Inference,
    Train,
};

/// Inference mode is the identity. Train mode zeroes each element with
/// probability p and scales survivors by 1/(1-p), on the seeded stream.
/// p must be < 1.
Tensor dropout(const Tensor& input, double p, DropoutMode mode,
               std::uint64_t seed);

/// Numerically stable exp-normalization of 7 logits.
EmotionDistribution softmax(const Vector7d& logits);

}  // namespace emofuse::classify
