#include "emofuse/emotions.hpp"

#include <cmath>

#include "emofuse/errors.hpp"

namespace emofuse {

namespace {
constexpr std::array<std::string_view, kNumEmotions> kNames = {
    "Anger", "Disgust", "Fear", "Happy", "Sad", "Surprise", "Neutral"};
}

std::string_view emotion_name(Emotion e) {
    return kNames[static_cast<std::size_t>(e)];
}

std::optional<Emotion> emotion_from_name(std::string_view name) {
    for (int i = 0; i < kNumEmotions; ++i) {
        if (kNames[static_cast<std::size_t>(i)] == name) {
            return static_cast<Emotion>(i);
        }
    }
    return std::nullopt;
}

bool EmotionDistribution::valid(double tol) const {
    for (int i = 0; i < kNumEmotions; ++i) {
        if (!std::isfinite(p(i)) || p(i) < 0.0 || p(i) > 1.0 + tol) {
            return false;
        }
    }
    return std::abs(p.sum() - 1.0) <= tol;
}

Emotion EmotionDistribution::argmax() const {
    int best = 0;
    for (int i = 1; i < kNumEmotions; ++i) {
        if (p(i) > p(best)) {
            best = i;
        }
    }
    return static_cast<Emotion>(best);
}

EmotionDistribution EmotionDistribution::from_probabilities(
    const Vector7d& probs, double tol) {
    for (int i = 0; i < kNumEmotions; ++i) {
        if (!std::isfinite(probs(i)) || probs(i) < -tol) {
            throw ParameterError("emotion distribution entry " +
                                 std::to_string(i) + " out of range");
        }
    }
    const double sum = probs.sum();
    if (std::abs(sum - 1.0) > tol) {
        throw ParameterError("emotion distribution sums to " +
                             std::to_string(sum) + ", expected 1");
    }
    EmotionDistribution d;
    d.p = probs.cwiseMax(0.0) / probs.cwiseMax(0.0).sum();
    return d;
}

EmotionDistribution EmotionDistribution::uniform() {
    EmotionDistribution d;
    d.p.setConstant(1.0 / kNumEmotions);
    return d;
}

}  // namespace emofuse
