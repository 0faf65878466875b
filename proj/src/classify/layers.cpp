#include "emofuse/classify/layers.hpp"

#include <cmath>
#include <cstring>

#include "emofuse/errors.hpp"
#include "emofuse/rng.hpp"

namespace emofuse::classify {

namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

Tensor conv2d(const Tensor& input, const ConvBlockParams& block) {
    if (input.channels != block.in_channels) {
        throw ShapeError("conv2d: input has " +
                         std::to_string(input.channels) +
                         " channels, kernel expects " +
                         std::to_string(block.in_channels));
    }
    const int h = input.height;
    const int w = input.width;
    const int cin = input.channels;
    const int cout = block.out_channels;

    // im2col with patch columns ordered (ky, kx, ic) so each input pixel's
    // channel run copies contiguously; the kernel matrix is permuted to
    // match once per call.
    RowMat patches = RowMat::Zero(static_cast<Eigen::Index>(h) * w,
                                  9 * static_cast<Eigen::Index>(cin));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double* row = patches.row(static_cast<Eigen::Index>(y) * w + x)
                              .data();
            for (int ky = 0; ky < 3; ++ky) {
                const int sy = y + ky - 1;
                if (sy < 0 || sy >= h) {
                    continue;  // zero padding
                }
                for (int kx = 0; kx < 3; ++kx) {
                    const int sx = x + kx - 1;
                    if (sx < 0 || sx >= w) {
                        continue;
                    }
                    const double* src =
                        input.data.data() +
                        (static_cast<Eigen::Index>(sy) * w + sx) * cin;
                    std::memcpy(row + (ky * 3 + kx) * cin, src,
                                sizeof(double) * static_cast<std::size_t>(cin));
                }
            }
        }
    }

    RowMat kernel_mat(cout, 9 * static_cast<Eigen::Index>(cin));
    for (int oc = 0; oc < cout; ++oc) {
        for (int ic = 0; ic < cin; ++ic) {
            for (int ky = 0; ky < 3; ++ky) {
                for (int kx = 0; kx < 3; ++kx) {
                    kernel_mat(oc, (ky * 3 + kx) * cin + ic) =
                        block.kernel(oc, ic, ky, kx);
                }
            }
        }
    }

    Tensor out(h, w, cout);
    Eigen::Map<RowMat> out_mat(out.data.data(),
                               static_cast<Eigen::Index>(h) * w, cout);
    out_mat.noalias() = patches * kernel_mat.transpose();
    out_mat.rowwise() += block.bias.transpose();
    return out;
}

Tensor batchnorm_infer(const Tensor& input, const ConvBlockParams& block) {
    if (input.channels != block.out_channels) {
        throw ShapeError("batchnorm: input has " +
                         std::to_string(input.channels) +
                         " channels, parameters expect " +
                         std::to_string(block.out_channels));
    }
    const int c = input.channels;
    Eigen::VectorXd scale(c);
    Eigen::VectorXd shift(c);
    for (int i = 0; i < c; ++i) {
        scale(i) = block.bn_gamma(i) / std::sqrt(block.bn_var(i) + block.bn_eps);
        shift(i) = block.bn_beta(i) - block.bn_mean(i) * scale(i);
    }

    Tensor out = input;
    Eigen::Map<RowMat> mat(out.data.data(),
                           static_cast<Eigen::Index>(input.height) *
                               input.width,
                           c);
    mat.array().rowwise() *= scale.transpose().array();
    mat.array().rowwise() += shift.transpose().array();
    return out;
}

Tensor relu(const Tensor& input) {
    Tensor out = input;
    out.data = out.data.cwiseMax(0.0);
    return out;
}

Tensor maxpool2d(const Tensor& input) {
    const int oh = input.height / 2;
    const int ow = input.width / 2;
    if (oh == 0 || ow == 0) {
        throw ShapeError("maxpool2d: input " + input.shape_str() +
                         " smaller than the 2x2 pool");
    }
    Tensor out(oh, ow, input.channels);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            for (int c = 0; c < input.channels; ++c) {
                const double a = input(2 * y, 2 * x, c);
                const double b = input(2 * y, 2 * x + 1, c);
                const double d = input(2 * y + 1, 2 * x, c);
                const double e = input(2 * y + 1, 2 * x + 1, c);
                out(y, x, c) = std::max(std::max(a, b), std::max(d, e));
            }
        }
    }
    return out;
}

Tensor dropout(const Tensor& input, double p, DropoutMode mode,
               std::uint64_t seed) {
    if (p < 0.0 || p >= 1.0) {
        throw ParameterError("dropout: p must be in [0, 1), got " +
                             std::to_string(p));
    }
    if (mode == DropoutMode::Inference || p == 0.0) {
        return input;
    }
    Tensor out = input;
    SplitMix64 rng(seed);
    const double scale = 1.0 / (1.0 - p);
    for (Eigen::Index i = 0; i < out.data.size(); ++i) {
        out.data(i) = rng.next_double() < p ? 0.0 : out.data(i) * scale;
    }
    return out;
}

EmotionDistribution softmax(const Vector7d& logits) {
    const double max_logit = logits.maxCoeff();
    EmotionDistribution d;
    // std::exp keeps exp(-inf) an exact zero, which Eigen's vectorized
    // exp does not guarantee.
    for (int i = 0; i < kNumEmotions; ++i) {
        d.p(i) = std::exp(logits(i) - max_logit);
    }
    d.p /= d.p.sum();
    return d;
}

}  // namespace emofuse::classify
