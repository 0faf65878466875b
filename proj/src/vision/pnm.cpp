#include "emofuse/vision/pnm.hpp"

#include <cmath>
#include <fstream>

#include "emofuse/errors.hpp"

namespace emofuse::vision {

namespace {

struct Reader {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    // Skips whitespace and '#' comment lines between header tokens.
    void skip_separators() {
        while (pos < bytes.size()) {
            const char c = static_cast<char>(bytes[pos]);
            if (c == '#') {
                while (pos < bytes.size() &&
                       static_cast<char>(bytes[pos]) != '\n') {
                    ++pos;
                }
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos;
            } else {
                break;
            }
        }
    }

    int read_int(const char* what) {
        skip_separators();
        if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
            throw DecodeError(std::string("pnm: expected ") + what +
                              " at byte offset " + std::to_string(pos));
        }
        long v = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos] - '0');
            if (v > 1 << 24) {
                throw DecodeError(std::string("pnm: ") + what +
                                  " out of range");
            }
            ++pos;
        }
        return static_cast<int>(v);
    }
};

}  // namespace

GrayImage load_image(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2) {
        throw DecodeError("pnm: input shorter than a magic number");
    }
    const char m0 = static_cast<char>(bytes[0]);
    const char m1 = static_cast<char>(bytes[1]);
    if (m0 != 'P' || (m1 != '5' && m1 != '6')) {
        throw DecodeError("pnm: unsupported magic number (want P5 or P6)");
    }
    const bool color = m1 == '6';

    Reader r{bytes, 2};
    const int width = r.read_int("width");
    const int height = r.read_int("height");
    const int maxval = r.read_int("maxval");
    if (width <= 0 || height <= 0) {
        throw DecodeError("pnm: non-positive dimensions");
    }
    if (maxval != 255) {
        throw UnsupportedFormatError("pnm: maxval " + std::to_string(maxval) +
                                     " unsupported (want 255)");
    }
    // One whitespace byte separates the header from the raster.
    if (r.pos >= bytes.size()) {
        throw DecodeError("pnm: missing raster");
    }
    ++r.pos;

    const std::size_t channels = color ? 3 : 1;
    const std::size_t expect = channels * static_cast<std::size_t>(width) *
                               static_cast<std::size_t>(height);
    if (bytes.size() - r.pos < expect) {
        throw DecodeError("pnm: truncated raster, expected " +
                          std::to_string(expect) + " bytes, got " +
                          std::to_string(bytes.size() - r.pos));
    }

    if (color) {
        RgbImage rgb;
        rgb.width = width;
        rgb.height = height;
        rgb.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(r.pos),
                          bytes.begin() +
                              static_cast<std::ptrdiff_t>(r.pos + expect));
        return to_grayscale(rgb);
    }

    GrayImage out;
    out.values.resize(height, width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            out.values(y, x) = bytes[r.pos + static_cast<std::size_t>(y) *
                                                 width +
                                     x];
        }
    }
    return out;
}

GrayImage load_image_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DecodeError("pnm: cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return load_image(bytes);
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
    const std::string header = "P5\n" + std::to_string(img.width()) + " " +
                               std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + static_cast<std::size_t>(img.width()) *
                                 static_cast<std::size_t>(img.height()));
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const long q = std::lrint(img.values(y, x));
            out.push_back(
                static_cast<std::uint8_t>(std::clamp(q, 0L, 255L)));
        }
    }
    return out;
}

void save_pgm_file(const GrayImage& img, const std::filesystem::path& path) {
    const auto bytes = encode_pgm(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DecodeError("pnm: cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace emofuse::vision
