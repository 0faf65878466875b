#include "emofuse/vision/landmarks.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "emofuse/errors.hpp"

namespace emofuse::vision {

void LandmarkSet::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].x()) || !std::isfinite(points[i].y())) {
            throw ShapeError("landmarks: point " + std::to_string(i + 1) +
                             " is not finite");
        }
    }
}

FaceFeatures select_landmarks(const LandmarkSet& lm) {
    lm.validate();

    FaceFeatures f;
    int out = 0;
    auto push = [&](const Eigen::Vector2d& p) { f.selected_points[out++] = p; };
    auto mid = [&](int a, int b) {
        return Eigen::Vector2d(0.5 * (lm.at(a) + lm.at(b)));
    };

    for (int i = 1; i <= 17; ++i) {  // jaw
        push(lm.at(i));
    }
    for (int i = 18; i <= 27; ++i) {  // brows
        push(lm.at(i));
    }
    // Right eye 37-42: corners 40 (inner) and 37 (outer), lids 38/39 and
    // 41/42. Left eye 43-48: corners 43 (inner) and 46 (outer), lids 44/45
    // and 47/48. Each eye collapses to corner + lid-midpoint form.
    push(lm.at(40));
    push(lm.at(37));
    push(mid(38, 39));
    push(mid(41, 42));
    push(lm.at(43));
    push(lm.at(46));
    push(mid(44, 45));
    push(mid(47, 48));
    for (int i = 28; i <= 36; ++i) {  // nose / philtrum region
        push(lm.at(i));
    }
    for (int i = 49; i <= 68; ++i) {  // mouth
        push(lm.at(i));
    }
    if (out != kSelectedPoints) {
        throw InternalError("select_landmarks: produced " +
                            std::to_string(out) + " points");
    }
    return f;
}

void normalize_features(FaceFeatures& f) {
    namespace si = selected_index;
    const Eigen::Vector2d right_center =
        0.5 * (f.selected_points[si::kRightEyeInner] +
               f.selected_points[si::kRightEyeOuter]);
    const Eigen::Vector2d left_center =
        0.5 * (f.selected_points[si::kLeftEyeInner] +
               f.selected_points[si::kLeftEyeOuter]);
    const double interocular = (left_center - right_center).norm();
    if (interocular <= 0.0) {
        throw DegenerateGeometryError(
            "normalize_features: coincident eye centers");
    }

    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& p : f.selected_points) {
        centroid += p;
    }
    centroid /= static_cast<double>(kSelectedPoints);

    f.normalized_vector.resize(2 * kSelectedPoints);
    for (int i = 0; i < kSelectedPoints; ++i) {
        const Eigen::Vector2d q =
            (f.selected_points[static_cast<std::size_t>(i)] - centroid) /
            interocular;
        f.normalized_vector(2 * i) = q.x();
        f.normalized_vector(2 * i + 1) = q.y();
    }
}

namespace {

Eigen::Vector2d normalized_point(const FaceFeatures& f, int index) {
    return {f.normalized_vector(2 * index), f.normalized_vector(2 * index + 1)};
}

}  // namespace

void mouth_metrics(FaceFeatures& f) {
    if (f.normalized_vector.size() != 2 * kSelectedPoints) {
        throw ParameterError("mouth_metrics: features not normalized yet");
    }
    namespace si = selected_index;
    // Inner-lip pairs: 62/68, 63/67, 64/66 in landmark numbering.
    double gap = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector2d upper =
            normalized_point(f, si::kInnerUpperLip + i);
        const Eigen::Vector2d lower =
            normalized_point(f, si::kInnerLowerLip + (2 - i));
        gap += std::abs(upper.y() - lower.y());
    }
    f.lip_gap = gap / 3.0;
    f.philtrum_len = (normalized_point(f, si::kUpperLipTop) -
                      normalized_point(f, si::kNoseBase))
                         .norm();
}

LandmarkSet load_landmarks_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DecodeError(std::string("landmarks: bad JSON: ") + e.what());
    }
    if (!j.is_array() || j.size() != 68) {
        throw ShapeError("landmarks: expected a JSON array of 68 [x,y] "
                         "pairs, got " +
                         std::to_string(j.is_array() ? j.size() : 0));
    }
    LandmarkSet lm;
    for (std::size_t i = 0; i < 68; ++i) {
        const auto& pt = j[i];
        if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() ||
            !pt[1].is_number()) {
            throw ShapeError("landmarks: entry " + std::to_string(i) +
                             " is not an [x,y] pair");
        }
        lm.points[i] = {pt[0].get<double>(), pt[1].get<double>()};
    }
    lm.validate();
    return lm;
}

LandmarkSet load_landmarks_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DecodeError("landmarks: cannot open " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return load_landmarks_json(text);
}

std::string landmarks_json(const LandmarkSet& lm) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : lm.points) {
        j.push_back({p.x(), p.y()});
    }
    return j.dump();
}

std::string face_features_json(const FaceFeatures& f) {
    nlohmann::json j;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : f.selected_points) {
        pts.push_back({p.x(), p.y()});
    }
    j["selected_points"] = pts;
    j["normalized_vector"] = std::vector<double>(
        f.normalized_vector.begin(), f.normalized_vector.end());
    j["lip_gap"] = f.lip_gap;
    j["philtrum_len"] = f.philtrum_len;
    return j.dump(2);
}

}  // namespace emofuse::vision
