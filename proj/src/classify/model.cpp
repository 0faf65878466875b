#include "emofuse/classify/model.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "emofuse/errors.hpp"

namespace emofuse::classify {

void ModelSpec::validate() const {
    int in_ch = 1;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& blk = blocks[b];
        const std::string name = "block" + std::to_string(b + 1);
        if (blk.out_channels != kBlockWidths[b]) {
            throw ShapeError("model: " + name + ".out_channels is " +
                             std::to_string(blk.out_channels) +
                             ", expected " + std::to_string(kBlockWidths[b]));
        }
        if (blk.in_channels != in_ch) {
            throw ShapeError("model: " + name + ".in_channels is " +
                             std::to_string(blk.in_channels) + ", expected " +
                             std::to_string(in_ch));
        }
        const Eigen::Index kernel_size =
            static_cast<Eigen::Index>(blk.out_channels) * blk.in_channels * 9;
        if (blk.kernels.size() != kernel_size) {
            throw ShapeError("model: " + name + ".kernel has " +
                             std::to_string(blk.kernels.size()) +
                             " values, expected " +
                             std::to_string(kernel_size));
        }
        for (const auto* v :
             {&blk.bias, &blk.bn_gamma, &blk.bn_beta, &blk.bn_mean,
              &blk.bn_var}) {
            if (v->size() != blk.out_channels) {
                throw ShapeError("model: " + name +
                                 " per-channel tensor has " +
                                 std::to_string(v->size()) +
                                 " values, expected " +
                                 std::to_string(blk.out_channels));
            }
        }
        if ((blk.bn_var.array() < 0.0).any()) {
            throw ShapeError("model: " + name + ".bn_var has a negative "
                             "entry");
        }
        if (!(blk.dropout_p >= 0.0 && blk.dropout_p < 1.0)) {
            throw ShapeError("model: " + name + ".dropout_p out of [0,1)");
        }
        const bool finite = blk.kernels.allFinite() && blk.bias.allFinite() &&
                            blk.bn_gamma.allFinite() &&
                            blk.bn_beta.allFinite() &&
                            blk.bn_mean.allFinite() && blk.bn_var.allFinite();
        if (!finite) {
            throw ShapeError("model: " + name + " contains a non-finite "
                             "value");
        }
        in_ch = blk.out_channels;
    }
    if (head_weight.rows() != kHeadFeatures || head_weight.cols() != 7) {
        throw ShapeError("model: head.weight is " +
                         std::to_string(head_weight.rows()) + "x" +
                         std::to_string(head_weight.cols()) + ", expected " +
                         std::to_string(kHeadFeatures) + "x7");
    }
    if (!head_weight.allFinite() || !head_bias.allFinite()) {
        throw ShapeError("model: head contains a non-finite value");
    }
}

Tensor image_to_input(const vision::GrayImage& img) {
    if (img.width() != kInputSide || img.height() != kInputSide) {
        throw ShapeError("forward: input image is " +
                         std::to_string(img.width()) + "x" +
                         std::to_string(img.height()) + ", expected 48x48");
    }
    Tensor t(kInputSide, kInputSide, 1);
    for (int y = 0; y < kInputSide; ++y) {
        for (int x = 0; x < kInputSide; ++x) {
            t(y, x, 0) = img.values(y, x) / 255.0;
        }
    }
    return t;
}

EmotionDistribution forward(const ModelSpec& model, const Tensor& image,
                            ForwardTrace* trace) {
    if (image.height != kInputSide || image.width != kInputSide ||
        image.channels != 1) {
        throw ShapeError("forward: input tensor is " + image.shape_str() +
                         ", expected 48x48x1");
    }

    Tensor t = image;
    for (std::size_t b = 0; b < model.blocks.size(); ++b) {
        t = conv2d(t, model.blocks[b]);
        t = batchnorm_infer(t, model.blocks[b]);
        t = relu(t);
        t = maxpool2d(t);
        t = dropout(t, model.blocks[b].dropout_p, DropoutMode::Inference, 0);
        if (trace != nullptr) {
            trace->spatial_after_pool[b] = t.height;
        }
    }

    if (t.size() != kHeadFeatures) {
        throw ShapeError("forward: head expects " +
                         std::to_string(kHeadFeatures) + " features, got " +
                         std::to_string(t.size()) + " from the conv stack");
    }
    const Vector7d logits =
        model.head_weight.transpose() * t.data + model.head_bias;
    return softmax(logits);
}

namespace {

Eigen::VectorXd require_tensor(const nlohmann::json& tensors,
                               const std::string& name,
                               const std::vector<int>& shape) {
    if (!tensors.contains(name)) {
        throw ShapeError("model: missing tensor \"" + name + "\"");
    }
    const auto& t = tensors.at(name);
    if (!t.contains("shape") || !t.contains("data")) {
        throw ShapeError("model: tensor \"" + name +
                         "\" needs \"shape\" and \"data\"");
    }
    const auto got_shape = t.at("shape").get<std::vector<int>>();
    if (got_shape != shape) {
        auto fmt = [](const std::vector<int>& s) {
            std::string out;
            for (std::size_t i = 0; i < s.size(); ++i) {
                out += (i ? "x" : "") + std::to_string(s[i]);
            }
            return out;
        };
        throw ShapeError("model: tensor \"" + name + "\" has shape " +
                         fmt(got_shape) + ", expected " + fmt(shape));
    }
    Eigen::Index n = 1;
    for (int d : shape) {
        n *= d;
    }
    const auto& data = t.at("data");
    if (!data.is_array() ||
        static_cast<Eigen::Index>(data.size()) != n) {
        throw ShapeError("model: tensor \"" + name + "\" data length " +
                         std::to_string(data.size()) + " does not match its "
                         "shape");
    }
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!data[static_cast<std::size_t>(i)].is_number()) {
            throw ShapeError("model: tensor \"" + name +
                             "\" has a non-numeric entry");
        }
        v(i) = data[static_cast<std::size_t>(i)].get<double>();
        if (!std::isfinite(v(i))) {
            throw ShapeError("model: tensor \"" + name +
                             "\" has a non-finite entry at index " +
                             std::to_string(i));
        }
    }
    return v;
}

}  // namespace

ModelSpec load_model(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DecodeError(std::string("model: bad JSON: ") + e.what());
    }
    if (j.value("format_version", 0) != 1) {
        throw DecodeError("model: unsupported format_version");
    }
    if (j.contains("arch")) {
        const auto& arch = j.at("arch");
        const auto widths = arch.value("blocks", std::vector<int>{});
        if (widths != std::vector<int>{64, 128, 256}) {
            // Width mismatches get reported against the first bad block.
            for (std::size_t b = 0; b < widths.size() && b < 3; ++b) {
                if (widths[b] != kBlockWidths[b]) {
                    throw ShapeError(
                        "model: block" + std::to_string(b + 1) +
                        ".out_channels is " + std::to_string(widths[b]) +
                        ", expected " + std::to_string(kBlockWidths[b]));
                }
            }
            throw ShapeError("model: arch.blocks must be [64,128,256]");
        }
        if (arch.value("kernel", 3) != 3 || arch.value("pool", 2) != 2 ||
            arch.value("classes", 7) != 7) {
            throw ShapeError("model: arch must declare kernel 3, pool 2, "
                             "classes 7");
        }
    }
    if (!j.contains("tensors")) {
        throw DecodeError("model: missing \"tensors\" object");
    }
    const auto& tensors = j.at("tensors");

    ModelSpec m;
    int in_ch = 1;
    for (int b = 0; b < 3; ++b) {
        const std::string prefix = "block" + std::to_string(b + 1);
        auto& blk = m.blocks[static_cast<std::size_t>(b)];
        blk.in_channels = in_ch;
        blk.out_channels = kBlockWidths[static_cast<std::size_t>(b)];
        blk.kernels = require_tensor(tensors, prefix + ".kernel",
                                     {blk.out_channels, in_ch, 3, 3});
        blk.bias =
            require_tensor(tensors, prefix + ".bias", {blk.out_channels});
        blk.bn_gamma =
            require_tensor(tensors, prefix + ".bn_gamma", {blk.out_channels});
        blk.bn_beta =
            require_tensor(tensors, prefix + ".bn_beta", {blk.out_channels});
        blk.bn_mean =
            require_tensor(tensors, prefix + ".bn_mean", {blk.out_channels});
        blk.bn_var =
            require_tensor(tensors, prefix + ".bn_var", {blk.out_channels});
        in_ch = blk.out_channels;
    }
    const Eigen::VectorXd w =
        require_tensor(tensors, "head.weight", {kHeadFeatures, 7});
    m.head_weight.resize(kHeadFeatures, 7);
    for (int i = 0; i < kHeadFeatures; ++i) {
        for (int c = 0; c < 7; ++c) {
            m.head_weight(i, c) = w(static_cast<Eigen::Index>(i) * 7 + c);
        }
    }
    m.head_bias = require_tensor(tensors, "head.bias", {7});
    m.validate();
    return m;
}

ModelSpec load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DecodeError("model: cannot open " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return load_model(text);
}

namespace {

nlohmann::json tensor_json(const std::vector<int>& shape,
                           const Eigen::VectorXd& data) {
    nlohmann::json t;
    t["shape"] = shape;
    t["data"] = std::vector<double>(data.begin(), data.end());
    return t;
}

}  // namespace

std::string model_json(const ModelSpec& model) {
    model.validate();
    nlohmann::json j;
    j["format_version"] = 1;
    j["arch"] = {{"blocks", {64, 128, 256}},
                 {"kernel", 3},
                 {"pool", 2},
                 {"classes", 7}};
    nlohmann::json tensors;
    for (int b = 0; b < 3; ++b) {
        const auto& blk = model.blocks[static_cast<std::size_t>(b)];
        const std::string prefix = "block" + std::to_string(b + 1);
        tensors[prefix + ".kernel"] = tensor_json(
            {blk.out_channels, blk.in_channels, 3, 3}, blk.kernels);
        tensors[prefix + ".bias"] = tensor_json({blk.out_channels}, blk.bias);
        tensors[prefix + ".bn_gamma"] =
            tensor_json({blk.out_channels}, blk.bn_gamma);
        tensors[prefix + ".bn_beta"] =
            tensor_json({blk.out_channels}, blk.bn_beta);
        tensors[prefix + ".bn_mean"] =
            tensor_json({blk.out_channels}, blk.bn_mean);
        tensors[prefix + ".bn_var"] =
            tensor_json({blk.out_channels}, blk.bn_var);
    }
    Eigen::VectorXd w(static_cast<Eigen::Index>(kHeadFeatures) * 7);
    for (int i = 0; i < kHeadFeatures; ++i) {
        for (int c = 0; c < 7; ++c) {
            w(static_cast<Eigen::Index>(i) * 7 + c) = model.head_weight(i, c);
        }
    }
    tensors["head.weight"] = tensor_json({kHeadFeatures, 7}, w);
    Eigen::VectorXd bias = model.head_bias;
    tensors["head.bias"] = tensor_json({7}, bias);
    j["tensors"] = std::move(tensors);
    return j.dump();
}

void save_model_file(const ModelSpec& model,
                     const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DecodeError("model: cannot write " + path.string());
    }
    out << model_json(model);
}

ModelSpec zero_model() {
    ModelSpec m;
    int in_ch = 1;
    for (int b = 0; b < 3; ++b) {
        auto& blk = m.blocks[static_cast<std::size_t>(b)];
        blk.in_channels = in_ch;
        blk.out_channels = kBlockWidths[static_cast<std::size_t>(b)];
        blk.kernels = Eigen::VectorXd::Zero(
            static_cast<Eigen::Index>(blk.out_channels) * in_ch * 9);
        blk.bias = Eigen::VectorXd::Zero(blk.out_channels);
        blk.bn_gamma = Eigen::VectorXd::Ones(blk.out_channels);
        blk.bn_beta = Eigen::VectorXd::Zero(blk.out_channels);
        blk.bn_mean = Eigen::VectorXd::Zero(blk.out_channels);
        blk.bn_var = Eigen::VectorXd::Ones(blk.out_channels);
        in_ch = blk.out_channels;
    }
    m.head_weight = Eigen::MatrixXd::Zero(kHeadFeatures, 7);
    m.head_bias.setZero();
    return m;
}

}  // namespace emofuse::classify
