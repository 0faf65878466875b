#pragma once

#include <cstdint>
#include <filesystem>

#include "emofuse/classify/baseline.hpp"
#include "emofuse/classify/model.hpp"

namespace emofuse::pipeline {

enum class FixtureRegime {
    Agree,     // both modalities planted with the same emotion everywhere
    Contrast,  // one window planted happy-faced / angry-voiced -> sarcasm
    Mixed,     // sarcasm, neutral-fallback, and blend windows in one set
};

FixtureRegime regime_from_name(const std::string& name);

struct FixtureSpec {
    FixtureRegime regime = FixtureRegime::Agree;
    std::uint64_t seed = 0;
    int n_clips = 12;
    double clip_duration_s = 12.0;
    int frames_per_window = 4;
};

/// Writes a complete synthetic clip set under out_dir: clips/<id>/ with
/// tone WAVs, constant-intensity 48x48 frames, landmark files and a
/// clip.json each, plus model.json, baseline.json, config.json, truth.csv
/// and manifest.csv at the root. The planted model maps frame intensity
/// levels to emotions and the baseline maps tone pitch classes to designed
/// score orderings, so the pipeline reproduces the planted verdicts
/// exactly. Identical spec -> identical bytes.
void synth_fixture(const FixtureSpec& spec,
                   const std::filesystem::path& out_dir);

/// The planted CNN: intensity level k*36/255 classifies as emotion k with
/// the designed logit envelope.
classify::ModelSpec fixture_model();

/// The planted speech baseline over the default 28-dim feature vector:
/// a pure tone at pitch class pc(k) yields the designed top-3 ordering for
/// emotion k.
classify::BaselineModel fixture_baseline();

/// Pixel value encoding emotion k in fixture frames.
inline int fixture_intensity(int emotion_ordinal) {
    return emotion_ordinal * 36;
}

/// Tone frequency (an exact 1024-point bin at 16 kHz) for emotion k.
double fixture_tone_hz(int emotion_ordinal);

}  // namespace emofuse::pipeline
