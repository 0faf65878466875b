#include "emofuse/classify/baseline.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "emofuse/classify/layers.hpp"
#include "emofuse/errors.hpp"

namespace emofuse::classify {

namespace {

// Row-wise softmax of the logit matrix X W + 1 b^T.
Eigen::MatrixXd probabilities(const BaselineModel& model,
                              const Eigen::MatrixXd& x) {
    Eigen::MatrixXd logits = x * model.weight;
    logits.rowwise() += model.bias.transpose();
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        logits.row(i) = (logits.row(i).array() - m).exp();
        logits.row(i) /= logits.row(i).sum();
    }
    return logits;
}

void check_inputs(const BaselineModel& model, const Eigen::MatrixXd& x,
                  const std::vector<Emotion>& labels) {
    if (x.rows() == 0) {
        throw InsufficientDataError("baseline: no training rows");
    }
    if (static_cast<Eigen::Index>(labels.size()) != x.rows()) {
        throw ShapeError("baseline: " + std::to_string(x.rows()) +
                         " feature rows but " + std::to_string(labels.size()) +
                         " labels");
    }
    if (x.cols() != model.weight.rows()) {
        throw ShapeError("baseline: feature dimension " +
                         std::to_string(x.cols()) + " does not match model (" +
                         std::to_string(model.weight.rows()) + ")");
    }
    if (!x.allFinite()) {
        throw ParameterError("baseline: non-finite feature value");
    }
}

Eigen::MatrixXd one_hot(const std::vector<Emotion>& labels) {
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(
        static_cast<Eigen::Index>(labels.size()), kNumEmotions);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        y(static_cast<Eigen::Index>(i), static_cast<int>(labels[i])) = 1.0;
    }
    return y;
}

}  // namespace

EmotionDistribution predict_baseline(const BaselineModel& model,
                                     const Eigen::VectorXd& features) {
    if (features.size() != model.weight.rows()) {
        throw ShapeError("baseline: feature vector of " +
                         std::to_string(features.size()) +
                         " does not match model (" +
                         std::to_string(model.weight.rows()) + ")");
    }
    if (!features.allFinite()) {
        throw ParameterError("baseline: non-finite feature value");
    }
    const Vector7d logits = model.weight.transpose() * features + model.bias;
    return softmax(logits);
}

double baseline_loss(const BaselineModel& model, const Eigen::MatrixXd& x,
                     const std::vector<Emotion>& labels) {
    check_inputs(model, x, labels);
    const Eigen::MatrixXd p = probabilities(model, x);
    double loss = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        loss -= std::log(std::max(
            p(static_cast<Eigen::Index>(i), static_cast<int>(labels[i])),
            1e-300));
    }
    return loss / static_cast<double>(labels.size());
}

Eigen::VectorXd baseline_gradient(const BaselineModel& model,
                                  const Eigen::MatrixXd& x,
                                  const std::vector<Emotion>& labels) {
    check_inputs(model, x, labels);
    const double n = static_cast<double>(x.rows());
    const Eigen::MatrixXd delta = probabilities(model, x) - one_hot(labels);
    const Eigen::MatrixXd grad_w = x.transpose() * delta / n;
    const Eigen::VectorXd grad_b = delta.colwise().mean();

    Eigen::VectorXd flat(grad_w.size() + grad_b.size());
    flat.head(grad_w.size()) =
        Eigen::Map<const Eigen::VectorXd>(grad_w.data(), grad_w.size());
    flat.tail(grad_b.size()) = grad_b;
    return flat;
}

TrainResult train_baseline(const Eigen::MatrixXd& x,
                           const std::vector<Emotion>& labels, int epochs,
                           const AdamState& adam_template,
                           std::uint64_t /*seed*/) {
    // Zero init keeps the run deterministic; the seed parameter is part of
    // the call contract for interchangeable trainers.
    const Eigen::Index d = x.cols();
    const Eigen::Index n_params = d * kNumEmotions + kNumEmotions;

    Eigen::VectorXd params = Eigen::VectorXd::Zero(n_params);
    AdamState state(n_params);
    state.lr = adam_template.lr;
    state.beta1 = adam_template.beta1;
    state.beta2 = adam_template.beta2;
    state.epsilon = adam_template.epsilon;

    BaselineModel model;
    model.weight.resize(d, kNumEmotions);

    TrainResult result;
    result.loss_per_epoch.reserve(static_cast<std::size_t>(epochs));
    for (int e = 0; e < epochs; ++e) {
        model.weight =
            Eigen::Map<const Eigen::MatrixXd>(params.data(), d, kNumEmotions);
        model.bias = params.tail(kNumEmotions);
        result.loss_per_epoch.push_back(baseline_loss(model, x, labels));
        const Eigen::VectorXd grads = baseline_gradient(model, x, labels);
        adam_step(params, grads, state);
    }
    model.weight =
        Eigen::Map<const Eigen::MatrixXd>(params.data(), d, kNumEmotions);
    model.bias = params.tail(kNumEmotions);
    result.model = std::move(model);
    return result;
}

BaselineModel load_baseline(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DecodeError(std::string("baseline: bad JSON: ") + e.what());
    }
    if (j.value("format_version", 0) != 1) {
        throw DecodeError("baseline: unsupported format_version");
    }
    const auto d = j.value("n_features", -1);
    if (d <= 0) {
        throw DecodeError("baseline: bad n_features");
    }
    const auto w = j.value("weight", std::vector<double>{});
    const auto b = j.value("bias", std::vector<double>{});
    if (static_cast<Eigen::Index>(w.size()) !=
        static_cast<Eigen::Index>(d) * kNumEmotions) {
        throw ShapeError("baseline: weight has " + std::to_string(w.size()) +
                         " values, expected " +
                         std::to_string(d * kNumEmotions));
    }
    if (b.size() != kNumEmotions) {
        throw ShapeError("baseline: bias has " + std::to_string(b.size()) +
                         " values, expected 7");
    }
    BaselineModel model;
    model.weight.resize(d, kNumEmotions);
    for (int i = 0; i < d; ++i) {
        for (int c = 0; c < kNumEmotions; ++c) {
            model.weight(i, c) = w[static_cast<std::size_t>(i) * kNumEmotions +
                                   static_cast<std::size_t>(c)];
        }
    }
    for (int c = 0; c < kNumEmotions; ++c) {
        model.bias(c) = b[static_cast<std::size_t>(c)];
    }
    if (!model.weight.allFinite() || !model.bias.allFinite()) {
        throw ShapeError("baseline: non-finite weight");
    }
    return model;
}

BaselineModel load_baseline_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DecodeError("baseline: cannot open " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return load_baseline(text);
}

std::string baseline_json(const BaselineModel& model) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["n_features"] = static_cast<int>(model.weight.rows());
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(model.weight.size()));
    for (Eigen::Index i = 0; i < model.weight.rows(); ++i) {
        for (Eigen::Index c = 0; c < model.weight.cols(); ++c) {
            w.push_back(model.weight(i, c));
        }
    }
    j["weight"] = w;
    j["bias"] = std::vector<double>(model.bias.begin(), model.bias.end());
    return j.dump();
}

void save_baseline_file(const BaselineModel& model,
                        const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DecodeError("baseline: cannot write " + path.string());
    }
    out << baseline_json(model);
}

}  // namespace emofuse::classify
