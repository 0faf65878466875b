#include "emofuse/pipeline/fixture.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "emofuse/afme/wheel.hpp"
#include "emofuse/errors.hpp"
#include "emofuse/eval/balance.hpp"
#include "emofuse/pipeline/config.hpp"
#include "emofuse/rng.hpp"
#include "emofuse/signal/wav.hpp"
#include "emofuse/vision/landmarks.hpp"
#include "emofuse/vision/pnm.hpp"

namespace emofuse::pipeline {

namespace {

constexpr int kSampleRate = 16000;
constexpr int kFftLen = 1024;

// Major-scale pitch classes, one per emotion ordinal.
constexpr std::array<int, 7> kPitchClasses = {0, 2, 4, 5, 7, 9, 11};

// Designed speech top-3 orderings per planted emotion (by ordinal):
// index 0 is the winner. The remaining four classes fall in ordinal order
// beneath.
constexpr std::array<std::array<int, 3>, 7> kSpeechOrdering = {{
    {0, 1, 2},  // Anger   -> Anger, Disgust, Fear
    {1, 0, 2},  // Disgust -> Disgust, Anger, Fear
    {2, 4, 1},  // Fear    -> Fear, Sad, Disgust
    {3, 5, 6},  // Happy   -> Happy, Surprise, Neutral
    {4, 1, 2},  // Sad     -> Sad, Disgust, Fear
    {5, 3, 6},  // Surprise-> Surprise, Happy, Neutral
    {6, 0, 1},  // Neutral -> Neutral, Anger, Disgust
}};

// Logit envelope slope: a frame of constant intensity level c_k = 36k/255
// gets logits beta*(j*c - j^2*delta/2), whose argmax over j is exactly k.
constexpr double kEnvelopeBeta = 40.0;
constexpr double kLevelDelta = 36.0 / 255.0;

// Flat feature layout of signal::AudioFeatureVector with n_mfcc = 13.
constexpr int kChromaOffset = 2;
constexpr int kFeatureDim = 28;

}  // namespace

double fixture_tone_hz(int emotion_ordinal) {
    const double target =
        523.25 *
        std::pow(2.0, kPitchClasses[static_cast<std::size_t>(
                          emotion_ordinal)] /
                          12.0);
    const double bin_hz = static_cast<double>(kSampleRate) / kFftLen;
    return std::round(target / bin_hz) * bin_hz;
}

classify::ModelSpec fixture_model() {
    classify::ModelSpec m = classify::zero_model();
    // Channel 0 carries the input intensity untouched through all three
    // blocks: a centre-tap kernel on in-channel 0 and pass-through batch
    // norm (var chosen so sqrt(var + eps) is exactly 1).
    for (auto& blk : m.blocks) {
        blk.bn_var.setConstant(1.0 - blk.bn_eps);
        // kernel(oc=0, ic=0, ky=1, kx=1) = 1
        blk.kernels(1 * 3 + 1) = 1.0;
    }
    const int positions = classify::kHeadSpatial * classify::kHeadSpatial;
    for (int j = 0; j < kNumEmotions; ++j) {
        for (int p = 0; p < positions; ++p) {
            // channel 0 of every spatial position
            m.head_weight(p * classify::kBlockWidths[2], j) =
                kEnvelopeBeta * j / positions;
        }
        m.head_bias(j) = -kEnvelopeBeta * j * j * kLevelDelta / 2.0;
    }
    return m;
}

classify::BaselineModel fixture_baseline() {
    classify::BaselineModel model;
    model.weight = Eigen::MatrixXd::Zero(kFeatureDim, kNumEmotions);
    model.bias.setZero();
    for (int k = 0; k < kNumEmotions; ++k) {
        const auto& order = kSpeechOrdering[static_cast<std::size_t>(k)];
        Vector7d logits;
        logits.setConstant(-1.0);
        constexpr std::array<double, 3> kRankLogit = {12.0, 9.0, 7.0};
        for (std::size_t r = 0; r < order.size(); ++r) {
            logits(order[r]) = kRankLogit[r];
        }
        // Remaining classes descend in ordinal order well below rank 3.
        double low = 4.0;
        for (int j = 0; j < kNumEmotions; ++j) {
            if (logits(j) < 0.0) {
                logits(j) = low;
                low -= 1.0;
            }
        }
        const int row =
            kChromaOffset + kPitchClasses[static_cast<std::size_t>(k)];
        model.weight.row(row) = logits.transpose();
    }
    return model;
}

namespace {

struct WindowPlan {
    // Frame emotions voted inside the window, in order.
    std::vector<int> frame_emotions;
    int speech_emotion = 0;
    std::string truth;  // emotion name or "Sarcasm"
};

std::vector<int> all_frames(int emotion, int n) {
    return std::vector<int>(static_cast<std::size_t>(n), emotion);
}

WindowPlan agree_plan(int emotion, int frames_per_window) {
    WindowPlan plan;
    plan.frame_emotions = all_frames(emotion, frames_per_window);
    plan.speech_emotion = emotion;
    plan.truth = emotion_name(static_cast<Emotion>(emotion));
    return plan;
}

// Happy-dominated face against an angry voice; top-3 sets
// {Happy,Sad,Surprise} vs {Anger,Disgust,Fear} are disjoint and the top-1
// pair sits 90 degrees apart.
WindowPlan sarcasm_plan(int frames_per_window) {
    WindowPlan plan;
    plan.frame_emotions = all_frames(3, frames_per_window);
    if (frames_per_window >= 3) {
        plan.frame_emotions[static_cast<std::size_t>(frames_per_window) - 2] =
            5;  // Surprise
        plan.frame_emotions[static_cast<std::size_t>(frames_per_window) - 1] =
            4;  // Sad
    }
    plan.speech_emotion = 0;  // Anger
    plan.truth = "Sarcasm";
    return plan;
}

// Affective face, Neutral-led voice, disjoint sets: the image verdict
// carries the window.
WindowPlan neutral_fallback_plan(int frames_per_window) {
    WindowPlan plan = sarcasm_plan(frames_per_window);
    plan.speech_emotion = 6;  // Neutral
    plan.truth = emotion_name(Emotion::Happy);
    return plan;
}

// Fear-led face against a Surprise-led voice: disjoint, 45 degrees apart,
// so the wheel blends.
WindowPlan blend_plan(int frames_per_window) {
    WindowPlan plan;
    plan.frame_emotions = all_frames(2, frames_per_window);  // Fear
    if (frames_per_window >= 3) {
        plan.frame_emotions[static_cast<std::size_t>(frames_per_window) - 2] =
            0;  // Anger
        plan.frame_emotions[static_cast<std::size_t>(frames_per_window) - 1] =
            1;  // Disgust
    }
    plan.speech_emotion = 5;  // Surprise

    // The blend outcome depends on the realized scores; resolve it with
    // the wheel itself so the planted truth matches the verdict.
    const double image_top1_mass =
        frames_per_window >= 3
            ? static_cast<double>(frames_per_window - 2) / frames_per_window
            : 1.0;
    // Speech top-1 softmax score for the designed logit gaps (12, 9, 7,
    // 4, 3, 2, 1).
    const std::array<double, 7> logits = {12, 9, 7, 4, 3, 2, 1};
    double z = 0.0;
    for (double l : logits) {
        z += std::exp(l - 12.0);
    }
    const double speech_top1_score = 1.0 / z;
    const Emotion blended = afme::blend_emotions(
        Emotion::Surprise, speech_top1_score, Emotion::Fear, image_top1_mass,
        afme::PlutchikWheel{});
    plan.truth = emotion_name(blended);
    return plan;
}

struct ClipPlan {
    std::string clip_id;
    std::vector<WindowPlan> windows;
};

std::vector<ClipPlan> plan_fixture(const FixtureSpec& spec) {
    const int windows_per_clip = static_cast<int>(
        spec.clip_duration_s / 6.0);  // target-length tiling, no remainder
    std::vector<ClipPlan> clips;
    clips.reserve(static_cast<std::size_t>(spec.n_clips));
    for (int c = 0; c < spec.n_clips; ++c) {
        ClipPlan clip;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "clip%02d", c);
        clip.clip_id = buf;
        for (int w = 0; w < windows_per_clip; ++w) {
            clip.windows.push_back(
                agree_plan((c + w) % kNumEmotions, spec.frames_per_window));
        }
        clips.push_back(std::move(clip));
    }

    auto plant = [&](int clip, int window, WindowPlan plan) {
        if (clip < spec.n_clips && window < windows_per_clip) {
            clips[static_cast<std::size_t>(clip)]
                .windows[static_cast<std::size_t>(window)] = std::move(plan);
        }
    };
    switch (spec.regime) {
        case FixtureRegime::Agree:
            break;
        case FixtureRegime::Contrast:
            plant(0, 1, sarcasm_plan(spec.frames_per_window));
            break;
        case FixtureRegime::Mixed:
            plant(0, 1, sarcasm_plan(spec.frames_per_window));
            plant(5, 1, sarcasm_plan(spec.frames_per_window));
            plant(2, 0, neutral_fallback_plan(spec.frames_per_window));
            plant(3, 0, blend_plan(spec.frames_per_window));
            break;
    }
    return clips;
}

vision::LandmarkSet synth_landmarks(SplitMix64& rng) {
    // A schematic frontal face in 48x48 coordinates.
    vision::LandmarkSet lm;
    auto set = [&lm](int idx, double x, double y) {
        lm.at(idx) = {x, y};
    };
    for (int i = 0; i < 17; ++i) {  // jaw arc
        const double t = M_PI * (1.0 - i / 16.0);
        set(1 + i, 24.0 + 16.0 * std::cos(t), 26.0 + 18.0 * std::sin(t));
    }
    for (int i = 0; i < 5; ++i) {  // brows
        set(18 + i, 12.0 + 3.0 * i, 16.0 - (i == 2 ? 1.0 : 0.0));
        set(23 + i, 24.0 + 3.0 * i, 16.0 - (i == 2 ? 1.0 : 0.0));
    }
    for (int i = 0; i < 4; ++i) {  // nose bridge 28-31
        set(28 + i, 24.0, 18.0 + 2.0 * i);
    }
    for (int i = 0; i < 5; ++i) {  // nostril line 32-36
        set(32 + i, 21.0 + 1.5 * i, 27.0);
    }
    // Right eye 37-42 (image left), left eye 43-48.
    set(37, 13.0, 20.0);
    set(38, 15.0, 19.0);
    set(39, 17.0, 19.0);
    set(40, 19.0, 20.0);
    set(41, 17.0, 21.0);
    set(42, 15.0, 21.0);
    set(43, 29.0, 20.0);
    set(44, 31.0, 19.0);
    set(45, 33.0, 19.0);
    set(46, 35.0, 20.0);
    set(47, 33.0, 21.0);
    set(48, 31.0, 21.0);
    for (int i = 0; i < 12; ++i) {  // outer lip ring 49-60
        const double t = 2.0 * M_PI * i / 12.0;
        set(49 + i, 24.0 - 6.0 * std::cos(t), 34.0 + 2.5 * std::sin(t));
    }
    for (int i = 0; i < 8; ++i) {  // inner lip ring 61-68
        const double t = 2.0 * M_PI * i / 8.0;
        set(61 + i, 24.0 - 3.5 * std::cos(t), 34.0 + 1.2 * std::sin(t));
    }
    for (auto& p : lm.points) {  // sub-pixel jitter
        p.x() += 0.2 * (rng.next_double() - 0.5);
        p.y() += 0.2 * (rng.next_double() - 0.5);
    }
    return lm;
}

signal::AudioBuffer synth_clip_audio(const ClipPlan& clip,
                                     double window_len_s) {
    signal::AudioBuffer buf;
    buf.sample_rate = kSampleRate;
    const auto window_samples =
        static_cast<Eigen::Index>(window_len_s * kSampleRate);
    buf.samples.resize(window_samples *
                       static_cast<Eigen::Index>(clip.windows.size()));
    for (std::size_t w = 0; w < clip.windows.size(); ++w) {
        const double hz = fixture_tone_hz(clip.windows[w].speech_emotion);
        for (Eigen::Index n = 0; n < window_samples; ++n) {
            buf.samples(static_cast<Eigen::Index>(w) * window_samples + n) =
                0.5 * std::sin(2.0 * M_PI * hz * n / kSampleRate);
        }
    }
    return buf;
}

}  // namespace

FixtureRegime regime_from_name(const std::string& name) {
    if (name == "agree") {
        return FixtureRegime::Agree;
    }
    if (name == "contrast") {
        return FixtureRegime::Contrast;
    }
    if (name == "mixed") {
        return FixtureRegime::Mixed;
    }
    throw ParameterError("fixture: unknown regime \"" + name + "\"");
}

void synth_fixture(const FixtureSpec& spec,
                   const std::filesystem::path& out_dir) {
    if (spec.n_clips <= 0 || spec.frames_per_window < 1 ||
        spec.clip_duration_s < 6.0 ||
        std::abs(std::remainder(spec.clip_duration_s, 6.0)) > 1e-9) {
        throw ParameterError("fixture: need n_clips > 0, frames_per_window "
                             ">= 1, and a clip duration that is a positive "
                             "multiple of the 6 s window");
    }
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "clips");

    const double window_len_s = 6.0;
    const auto clips = plan_fixture(spec);

    classify::save_model_file(fixture_model(), out_dir / "model.json");
    classify::save_baseline_file(fixture_baseline(),
                                 out_dir / "baseline.json");

    PipelineConfig config;
    config.frame.window = signal::Window::Rectangular;
    config.seed = spec.seed;
    config.model_path = "model.json";
    config.baseline_path = "baseline.json";
    save_config_file(config, out_dir / "config.json");

    std::string truth_csv = "key,label\n";
    eval::DatasetManifest manifest;

    for (std::size_t c = 0; c < clips.size(); ++c) {
        const ClipPlan& clip = clips[c];
        const fs::path clip_dir = out_dir / "clips" / clip.clip_id;
        fs::create_directories(clip_dir / "frames");
        fs::create_directories(clip_dir / "landmarks");

        signal::save_wav_file(synth_clip_audio(clip, window_len_s),
                              clip_dir / "audio.wav");

        SplitMix64 rng(spec.seed ^ fnv1a64_str(clip.clip_id.c_str()));
        nlohmann::json frames_json = nlohmann::json::array();
        int frame_no = 0;
        for (std::size_t w = 0; w < clip.windows.size(); ++w) {
            const WindowPlan& plan = clip.windows[w];
            truth_csv += clip.clip_id + ":" + std::to_string(w) + "," +
                         plan.truth + "\n";
            for (std::size_t f = 0; f < plan.frame_emotions.size(); ++f) {
                const int emotion = plan.frame_emotions[f];
                const double t =
                    static_cast<double>(w) * window_len_s + 1.0 +
                    static_cast<double>(f) * (window_len_s - 2.0) /
                        static_cast<double>(plan.frame_emotions.size());
                char name[32];
                std::snprintf(name, sizeof(name), "f%03d.pgm", frame_no);
                char lm_name[32];
                std::snprintf(lm_name, sizeof(lm_name), "f%03d.json",
                              frame_no);
                ++frame_no;

                vision::GrayImage img;
                img.values = Eigen::MatrixXd::Constant(
                    48, 48, fixture_intensity(emotion));
                vision::save_pgm_file(img, clip_dir / "frames" / name);

                std::ofstream lm_out(clip_dir / "landmarks" / lm_name);
                lm_out << vision::landmarks_json(synth_landmarks(rng));

                nlohmann::json fj;
                fj["t"] = t;
                fj["image"] = std::string("frames/") + name;
                fj["landmarks"] = std::string("landmarks/") + lm_name;
                frames_json.push_back(std::move(fj));

                eval::ManifestRow row;
                row.path = clip.clip_id + "/frames/" + name;
                row.modality = eval::Modality::Image;
                row.label = static_cast<Emotion>(emotion);
                row.split = c % 2 == 0 ? eval::Split::Train
                                       : eval::Split::Test;
                row.clip_id = clip.clip_id;
                row.timestamp_s = t;
                manifest.rows.push_back(std::move(row));
            }
        }

        eval::ManifestRow audio_row;
        audio_row.path = clip.clip_id + "/audio.wav";
        audio_row.modality = eval::Modality::Audio;
        audio_row.label =
            static_cast<Emotion>(clip.windows.front().speech_emotion);
        audio_row.split = c % 2 == 0 ? eval::Split::Train : eval::Split::Test;
        audio_row.clip_id = clip.clip_id;
        audio_row.timestamp_s = 0.0;
        manifest.rows.push_back(std::move(audio_row));

        nlohmann::json clip_json;
        clip_json["clip_id"] = clip.clip_id;
        clip_json["audio"] = "audio.wav";
        clip_json["frames"] = std::move(frames_json);
        std::ofstream clip_out(clip_dir / "clip.json");
        clip_out << clip_json.dump(2) << '\n';
    }

    std::ofstream truth_out(out_dir / "truth.csv");
    truth_out << truth_csv;
    eval::write_manifest(manifest, out_dir / "manifest.csv");
}

}  // namespace emofuse::pipeline
