#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace emofuse {

/// The seven emotion classes. Ordinal values are part of the contract:
/// every tie in the fusion and PMF logic breaks toward the lower ordinal.
enum class Emotion : std::uint8_t {
    Anger = 0,
    Disgust = 1,
    Fear = 2,
    Happy = 3,
    Sad = 4,
    Surprise = 5,
    Neutral = 6,
};

inline constexpr int kNumEmotions = 7;

inline constexpr std::array<Emotion, kNumEmotions> all_emotions() {
    return {Emotion::Anger, Emotion::Disgust, Emotion::Fear,  Emotion::Happy,
            Emotion::Sad,   Emotion::Surprise, Emotion::Neutral};
}

std::string_view emotion_name(Emotion e);

/// Case-sensitive name lookup ("Anger", ..., "Neutral").
std::optional<Emotion> emotion_from_name(std::string_view name);

using Vector7d = Eigen::Matrix<double, kNumEmotions, 1>;

/// Probability vector over the seven classes. Entries in [0,1],
/// sum within 1e-9 of 1.
struct EmotionDistribution {
    Vector7d p = Vector7d::Zero();

    double operator[](Emotion e) const { return p(static_cast<int>(e)); }
    double& operator[](Emotion e) { return p(static_cast<int>(e)); }

    bool valid(double tol = 1e-9) const;

    /// Argmax class; exact ties break toward the lower ordinal.
    Emotion argmax() const;

    /// Validating constructor for externally supplied probabilities.
    /// Accepts sums within `tol` of 1 and renormalizes to machine
    /// precision; throws ParameterError otherwise.
    static EmotionDistribution from_probabilities(const Vector7d& probs,
                                                  double tol = 1e-6);

    static EmotionDistribution uniform();
};

}  // namespace emofuse
