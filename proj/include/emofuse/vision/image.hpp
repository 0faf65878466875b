#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace emofuse::vision {

/// Row-major interleaved 8-bit RGB.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // 3 * width * height bytes

    void validate() const;
};

/// Grayscale plane kept as reals in [0, 255]; quantization happens only at
/// image export. pixel(x, y) addresses column x, row y.
struct GrayImage {
    Eigen::MatrixXd values;  // height x width

    int width() const { return static_cast<int>(values.cols()); }
    int height() const { return static_cast<int>(values.rows()); }

    double pixel(int x, int y) const { return values(y, x); }
    double& pixel(int x, int y) { return values(y, x); }
};

/// Luminosity conversion 0.3 R + 0.59 G + 0.11 B.
GrayImage to_grayscale(const RgbImage& img);

/// Bilinear resampling with destination pixel centers mapped into the
/// source on the half-pixel convention.
GrayImage resize_bilinear(const GrayImage& img, int out_width,
                          int out_height);

inline GrayImage resize_48(const GrayImage& img) {
    return resize_bilinear(img, 48, 48);
}

/// Horizontal mirror, (x, y) -> (width-1-x, y).
GrayImage flip_horizontal(const GrayImage& img);

}  // namespace emofuse::vision
