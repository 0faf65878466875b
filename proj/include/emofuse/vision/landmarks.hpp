#pragma once

#include <Eigen/Dense>

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace emofuse::vision {

/// The standard 68-point facial layout, 1-indexed by convention:
/// jaw 1-17, right brow 18-22, left brow 23-27, nose 28-36,
/// right eye 37-42, left eye 43-48, mouth 49-68.
struct LandmarkSet {
    std::array<Eigen::Vector2d, 68> points;

    /// Access by the conventional 1-based index.
    const Eigen::Vector2d& at(int one_based) const {
        return points[static_cast<std::size_t>(one_based - 1)];
    }
    Eigen::Vector2d& at(int one_based) {
        return points[static_cast<std::size_t>(one_based - 1)];
    }

    void validate() const;
};

inline constexpr int kSelectedPoints = 64;

/// Selected-point ordering (64 points, fixed):
///   [0..16]  jaw 1-17
///   [17..26] brows 18-27
///   [27..34] eyes, 4 per eye: inner corner, outer corner, upper-lid
///            midpoint, lower-lid midpoint (right eye then left eye)
///   [35..43] nose 28-36 (the nine philtrum-region points)
///   [44..63] mouth 49-68
struct FaceFeatures {
    std::array<Eigen::Vector2d, kSelectedPoints> selected_points;
    Eigen::VectorXd normalized_vector;  // 128 reals once normalized
    double lip_gap = 0.0;
    double philtrum_len = 0.0;
};

/// Positions of specific source landmarks inside selected_points.
namespace selected_index {
inline constexpr int kRightEyeInner = 27;
inline constexpr int kRightEyeOuter = 28;
inline constexpr int kLeftEyeInner = 31;
inline constexpr int kLeftEyeOuter = 32;
inline constexpr int kNoseBase = 41;      // landmark 34
inline constexpr int kUpperLipTop = 47;   // landmark 52
inline constexpr int kInnerUpperLip = 57; // landmarks 62-64 start here
inline constexpr int kInnerLowerLip = 61; // landmarks 66-68 start here
}  // namespace selected_index

/// Reduces the 68 landmarks to the 64 tracked points (eyes collapse to
/// corner + lid-midpoint form). Throws ShapeError on non-finite input.
FaceFeatures select_landmarks(const LandmarkSet& lm);

/// Centers the selected points on their centroid, scales by the interocular
/// distance (between the two eye-corner midpoints), and flattens to 128
/// reals stored in normalized_vector. Throws DegenerateGeometryError when
/// the eye centers coincide.
void normalize_features(FaceFeatures& f);

/// lip_gap = mean |y| distance of the three inner-lip point pairs
/// (62/68, 63/67, 64/66); philtrum_len = distance from nose base (34) to
/// the upper-lip top (52). Both measured on the normalized points.
void mouth_metrics(FaceFeatures& f);

/// Landmarks interchange format: a JSON array of 68 [x, y] pairs.
LandmarkSet load_landmarks_json(const std::string& text);
LandmarkSet load_landmarks_file(const std::filesystem::path& path);
std::string landmarks_json(const LandmarkSet& lm);

std::string face_features_json(const FaceFeatures& f);

}  // namespace emofuse::vision
