#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

#include "emofuse/classify/optim.hpp"
#include "emofuse/emotions.hpp"

namespace emofuse::classify {

/// Softmax regression over fixed feature vectors: the desk-scale trainable
/// stand-in for the speech classifier.
struct BaselineModel {
    Eigen::MatrixXd weight;  // n_features x 7
    Vector7d bias = Vector7d::Zero();

    Eigen::Index n_features() const { return weight.rows(); }
};

EmotionDistribution predict_baseline(const BaselineModel& model,
                                     const Eigen::VectorXd& features);

/// Mean cross-entropy of the softmax predictions against integer labels.
double baseline_loss(const BaselineModel& model, const Eigen::MatrixXd& x,
                     const std::vector<Emotion>& labels);

/// Analytic full-batch gradient of baseline_loss with respect to
/// (weight, bias), flattened column-by-column with bias last. Shared by
/// training and the finite-difference oracle checks.
Eigen::VectorXd baseline_gradient(const BaselineModel& model,
                                  const Eigen::MatrixXd& x,
                                  const std::vector<Emotion>& labels);

struct TrainResult {
    BaselineModel model;
    std::vector<double> loss_per_epoch;
};

/// Full-batch Adam on cross-entropy from zero-initialized weights.
/// Deterministic for a given seed. Throws on non-finite features.
TrainResult train_baseline(const Eigen::MatrixXd& x,
                           const std::vector<Emotion>& labels, int epochs,
                           const AdamState& adam_template = AdamState(),
                           std::uint64_t seed = 0);

/// Weights file: {"format_version":1, "n_features":D,
/// "weight":[D*7 row-major], "bias":[7]}.
BaselineModel load_baseline(const std::string& json_text);
BaselineModel load_baseline_file(const std::filesystem::path& path);
std::string baseline_json(const BaselineModel& model);
void save_baseline_file(const BaselineModel& model,
                        const std::filesystem::path& path);

}  // namespace emofuse::classify
