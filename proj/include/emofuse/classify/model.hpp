#pragma once

#include <array>
#include <filesystem>
#include <string>

#include "emofuse/classify/layers.hpp"
#include "emofuse/vision/image.hpp"

namespace emofuse::classify {

inline constexpr std::array<int, 3> kBlockWidths = {64, 128, 256};
inline constexpr int kInputSide = 48;
/// 48 -> 24 -> 12 -> 6 across the three pool stages.
inline constexpr int kHeadSpatial = 6;
inline constexpr int kHeadFeatures =
    kHeadSpatial * kHeadSpatial * kBlockWidths[2];

/// The three-block architecture with a dense softmax head.
struct ModelSpec {
    std::array<ConvBlockParams, 3> blocks;
    Eigen::MatrixXd head_weight;  // kHeadFeatures x 7
    Vector7d head_bias;

    void validate() const;
};

/// Spatial sizes the forward pass visits, for shape reporting.
struct ForwardTrace {
    std::array<int, 3> spatial_after_pool = {0, 0, 0};
};

/// Full inference pass: (conv -> batchnorm -> relu -> maxpool ->
/// dropout[inference]) x3, flatten, dense head, softmax. The image must be
/// 48x48 with values already scaled to [0, 1].
EmotionDistribution forward(const ModelSpec& model, const Tensor& image,
                            ForwardTrace* trace = nullptr);

/// Converts a 48x48 gray image ([0,255] reals) to the [0,1] input tensor.
Tensor image_to_input(const vision::GrayImage& img);

/// Model file: {"format_version":1, "arch":{...}, "tensors":{name:
/// {"shape":[...], "data":[...]}}} with tensors
/// block{1,2,3}.{kernel,bias,bn_gamma,bn_beta,bn_mean,bn_var} and
/// head.{weight,bias}. Shapes are validated against the architecture and
/// every value must be finite.
ModelSpec load_model(const std::string& json_text);
ModelSpec load_model_file(const std::filesystem::path& path);

std::string model_json(const ModelSpec& model);
void save_model_file(const ModelSpec& model,
                     const std::filesystem::path& path);

/// All-zero weights and pass-through batch norm; forward gives exactly
/// uniform output. Useful as a smoke fixture.
ModelSpec zero_model();

}  // namespace emofuse::classify
