#pragma once

#include "emofuse/emotions.hpp"

namespace emofuse::afme {

/// Angular placement of the six affective classes on an eight-sector wheel
/// (45 degree spacing): Happy 0, Fear 90, Surprise 135, Sad 180,
/// Disgust 225, Anger 270. Happy/Sad sit antipodal; Neutral is unmapped.
/// Two classifier verdicts at or beyond sarcasm_threshold_deg apart count
/// as contrasting; anything closer blends.
struct PlutchikWheel {
    double sarcasm_threshold_deg = 90.0;
    double blend_threshold_deg = 90.0;  // exclusive upper bound for blending

    /// Throws ParameterError when a threshold leaves (0, 180].
    void validate() const;

    /// Angle of a mapped emotion in degrees; Neutral throws ParameterError.
    double angle_deg(Emotion e) const;

    bool is_mapped(Emotion e) const { return e != Emotion::Neutral; }
};

/// Circular distance min(|a-b|, 360-|a-b|) in [0, 180]. Both emotions must
/// be mapped.
double wheel_distance(const PlutchikWheel& wheel, Emotion a, Emotion b);

/// Confidence-weighted circular mean of the two angles; returns the mapped
/// emotion nearest the mean. Among equidistant candidates the inputs win,
/// the higher weight first, then the lower ordinal. Requires s1 + s2 > 0.
Emotion blend_emotions(Emotion e1, double s1, Emotion e2, double s2,
                       const PlutchikWheel& wheel);

}  // namespace emofuse::afme
