#pragma once

#include <Eigen/Dense>

#include <string>

namespace emofuse::classify {

/// Row-major H x W x C activation tensor backed by a dense Eigen vector;
/// element (y, x, c) lives at ((y * W) + x) * C + c.
struct Tensor {
    int height = 0;
    int width = 0;
    int channels = 0;
    Eigen::VectorXd data;

    Tensor() = default;
    Tensor(int h, int w, int c)
        : height(h), width(w), channels(c),
          data(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h) * w * c)) {}

    Eigen::Index size() const { return data.size(); }

    double operator()(int y, int x, int c) const {
        return data((static_cast<Eigen::Index>(y) * width + x) * channels + c);
    }
    double& operator()(int y, int x, int c) {
        return data((static_cast<Eigen::Index>(y) * width + x) * channels + c);
    }

    std::string shape_str() const {
        return std::to_string(height) + "x" + std::to_string(width) + "x" +
               std::to_string(channels);
    }

    bool all_finite() const { return data.allFinite(); }
};

}  // namespace emofuse::classify
