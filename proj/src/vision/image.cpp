#include "emofuse/vision/image.hpp"

#include <algorithm>
#include <cmath>

#include "emofuse/errors.hpp"

namespace emofuse::vision {

void RgbImage::validate() const {
    if (width <= 0 || height <= 0) {
        throw ShapeError("rgb image: non-positive dimensions " +
                         std::to_string(width) + "x" + std::to_string(height));
    }
    const std::size_t expect =
        3u * static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (pixels.size() != expect) {
        throw ShapeError("rgb image: expected " + std::to_string(expect) +
                         " bytes, got " + std::to_string(pixels.size()));
    }
}

GrayImage to_grayscale(const RgbImage& img) {
    img.validate();
    GrayImage out;
    out.values.resize(img.height, img.width);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::size_t i =
                3u * (static_cast<std::size_t>(y) * img.width + x);
            out.values(y, x) = 0.3 * img.pixels[i] + 0.59 * img.pixels[i + 1] +
                               0.11 * img.pixels[i + 2];
        }
    }
    return out;
}

GrayImage resize_bilinear(const GrayImage& img, int out_width,
                          int out_height) {
    if (img.width() < 1 || img.height() < 1) {
        throw ShapeError("resize: empty source image");
    }
    if (out_width < 1 || out_height < 1) {
        throw ParameterError("resize: non-positive target size");
    }

    GrayImage out;
    out.values.resize(out_height, out_width);
    const double sx = static_cast<double>(img.width()) / out_width;
    const double sy = static_cast<double>(img.height()) / out_height;

    for (int y = 0; y < out_height; ++y) {
        const double src_y =
            std::clamp((y + 0.5) * sy - 0.5, 0.0,
                       static_cast<double>(img.height() - 1));
        const int y0 = static_cast<int>(std::floor(src_y));
        const int y1 = std::min(y0 + 1, img.height() - 1);
        const double fy = src_y - y0;
        for (int x = 0; x < out_width; ++x) {
            const double src_x =
                std::clamp((x + 0.5) * sx - 0.5, 0.0,
                           static_cast<double>(img.width() - 1));
            const int x0 = static_cast<int>(std::floor(src_x));
            const int x1 = std::min(x0 + 1, img.width() - 1);
            const double fx = src_x - x0;
            const double top = (1.0 - fx) * img.values(y0, x0) +
                               fx * img.values(y0, x1);
            const double bottom = (1.0 - fx) * img.values(y1, x0) +
                                  fx * img.values(y1, x1);
            out.values(y, x) = (1.0 - fy) * top + fy * bottom;
        }
    }
    return out;
}

GrayImage flip_horizontal(const GrayImage& img) {
    GrayImage out;
    out.values = img.values.rowwise().reverse();
    return out;
}

}  // namespace emofuse::vision
