#include "emofuse/afme/wheel.hpp"

#include <cmath>

#include "emofuse/errors.hpp"

namespace emofuse::afme {

namespace {

// Indexed by Emotion ordinal; Neutral has no angle.
constexpr std::array<double, 6> kAngles = {
    270.0,  // Anger
    225.0,  // Disgust
    90.0,   // Fear
    0.0,    // Happy
    180.0,  // Sad
    135.0,  // Surprise
};

double circular_distance(double a, double b) {
    const double d = std::abs(a - b);
    return std::min(d, 360.0 - d);
}

}  // namespace

void PlutchikWheel::validate() const {
    for (double t : {sarcasm_threshold_deg, blend_threshold_deg}) {
        if (!(t > 0.0 && t <= 180.0)) {
            throw ParameterError("wheel: threshold " + std::to_string(t) +
                                 " outside (0, 180]");
        }
    }
}

double PlutchikWheel::angle_deg(Emotion e) const {
    if (e == Emotion::Neutral) {
        throw ParameterError("wheel: Neutral has no angle");
    }
    return kAngles[static_cast<std::size_t>(e)];
}

double wheel_distance(const PlutchikWheel& wheel, Emotion a, Emotion b) {
    return circular_distance(wheel.angle_deg(a), wheel.angle_deg(b));
}

Emotion blend_emotions(Emotion e1, double s1, Emotion e2, double s2,
                       const PlutchikWheel& wheel) {
    if (s1 < 0.0 || s2 < 0.0 || s1 + s2 <= 0.0) {
        throw ParameterError("blend: weights must be non-negative with a "
                             "positive sum");
    }
    const double a1 = wheel.angle_deg(e1) * M_PI / 180.0;
    const double a2 = wheel.angle_deg(e2) * M_PI / 180.0;
    const double x = s1 * std::cos(a1) + s2 * std::cos(a2);
    const double y = s1 * std::sin(a1) + s2 * std::sin(a2);

    auto prefer_input = [&]() {
        if (s1 != s2) {
            return s1 > s2 ? e1 : e2;
        }
        return static_cast<int>(e1) <= static_cast<int>(e2) ? e1 : e2;
    };

    // Antipodal equal-weight inputs cancel; fall back to the input
    // preference directly.
    if (std::hypot(x, y) < 1e-12) {
        return prefer_input();
    }
    double mean_deg = std::atan2(y, x) * 180.0 / M_PI;
    if (mean_deg < 0.0) {
        mean_deg += 360.0;
    }

    double best = 361.0;
    for (Emotion e : all_emotions()) {
        if (!wheel.is_mapped(e)) {
            continue;
        }
        best = std::min(best, circular_distance(wheel.angle_deg(e), mean_deg));
    }

    constexpr double kTieTol = 1e-9;
    Emotion result = Emotion::Neutral;
    bool found = false;
    for (Emotion e : all_emotions()) {  // ordinal order
        if (!wheel.is_mapped(e)) {
            continue;
        }
        if (circular_distance(wheel.angle_deg(e), mean_deg) > best + kTieTol) {
            continue;
        }
        // Equidistant candidates: inputs beat outsiders, the heavier input
        // beats the lighter, then the ordinal scan order decides.
        if (!found) {
            result = e;
            found = true;
            continue;
        }
        const bool e_is_input = e == e1 || e == e2;
        const bool r_is_input = result == e1 || result == e2;
        if (e_is_input && !r_is_input) {
            result = e;
        } else if (e_is_input && r_is_input) {
            result = prefer_input();
        }
    }
    return result;
}

}  // namespace emofuse::afme
