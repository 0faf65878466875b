#include "emofuse/pipeline/run.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "emofuse/classify/baseline.hpp"
#include "emofuse/classify/model.hpp"
#include "emofuse/errors.hpp"
#include "emofuse/eval/metrics.hpp"
#include "emofuse/rng.hpp"
#include "emofuse/signal/features.hpp"
#include "emofuse/signal/wav.hpp"
#include "emofuse/version.hpp"
#include "emofuse/vision/pnm.hpp"

namespace emofuse::pipeline {

namespace fs = std::filesystem;

ClipBundle load_clip_bundle(const fs::path& clip_dir) {
    const fs::path meta_path = clip_dir / "clip.json";
    std::ifstream in(meta_path);
    if (!in) {
        throw DecodeError("bundle: cannot open " + meta_path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw DecodeError("bundle: " + meta_path.string() + ": " + e.what());
    }

    ClipBundle bundle;
    bundle.clip_id = j.value("clip_id", clip_dir.filename().string());
    bundle.audio_path = clip_dir / j.value("audio", std::string("audio.wav"));
    if (!j.contains("frames") || !j.at("frames").is_array() ||
        j.at("frames").empty()) {
        throw DecodeError("bundle: " + meta_path.string() +
                          " lists no frames");
    }
    double prev_t = -1.0;
    for (const auto& f : j.at("frames")) {
        ClipBundle::FrameRef ref;
        ref.timestamp_s = f.value("t", -1.0);
        if (!(ref.timestamp_s >= 0.0) || ref.timestamp_s <= prev_t) {
            throw DecodeError("bundle: " + meta_path.string() +
                              ": frame timestamps must be strictly "
                              "increasing and non-negative");
        }
        prev_t = ref.timestamp_s;
        if (!f.contains("image")) {
            throw DecodeError("bundle: " + meta_path.string() +
                              ": frame entry lacks \"image\"");
        }
        ref.image_path = clip_dir / f.at("image").get<std::string>();
        if (f.contains("landmarks")) {
            ref.landmarks_path =
                clip_dir / f.at("landmarks").get<std::string>();
        }
        bundle.frames.push_back(std::move(ref));
    }
    return bundle;
}

std::vector<fs::path> discover_clips(const fs::path& root) {
    const fs::path clips_dir = root / "clips";
    if (!fs::is_directory(clips_dir)) {
        throw DecodeError("pipeline: no clips/ directory under " +
                          root.string());
    }
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(clips_dir)) {
        if (entry.is_directory()) {
            dirs.push_back(entry.path());
        }
    }
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty()) {
        throw DecodeError("pipeline: clips/ directory is empty");
    }
    return dirs;
}

namespace {

// Truth files in pipeline runs may label sarcasm windows; everything else
// must be one of the seven classes.
std::map<std::string, std::string> read_truth_with_sarcasm(
    const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DecodeError("truth: cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) ||
        (line != "key,label" && line != "key,label\r")) {
        throw DecodeError("truth: " + path.string() +
                          " must start with header \"key,label\"");
    }
    std::map<std::string, std::string> out;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw DecodeError("truth: bad row \"" + line + "\"");
        }
        const std::string key = line.substr(0, comma);
        const std::string label = line.substr(comma + 1);
        if (label != "Sarcasm" && !emotion_from_name(label)) {
            throw DecodeError("truth: unknown label \"" + label + "\"");
        }
        out[key] = label;
    }
    return out;
}

std::vector<afme::WindowVerdict> process_clip(const ClipBundle& bundle,
                                              const PipelineConfig& config,
                                              const classify::ModelSpec& model,
                                              const classify::BaselineModel&
                                                  baseline) {
    const signal::AudioBuffer audio =
        signal::load_wav_file(bundle.audio_path);
    const double duration = audio.duration_s();
    if (!bundle.frames.empty() &&
        bundle.frames.back().timestamp_s > duration) {
        throw AlignmentError("pipeline: clip " + bundle.clip_id +
                             ": last frame at " +
                             std::to_string(bundle.frames.back().timestamp_s) +
                             " s exceeds the audio duration " +
                             std::to_string(duration) + " s");
    }

    afme::FrameLabelStream stream;
    stream.entries.reserve(bundle.frames.size());
    for (const auto& frame : bundle.frames) {
        vision::GrayImage img = vision::load_image_file(frame.image_path);
        if (img.width() != classify::kInputSide ||
            img.height() != classify::kInputSide) {
            img = vision::resize_48(img);
        }
        afme::FrameLabelStream::Entry entry;
        entry.timestamp_s = frame.timestamp_s;
        entry.distribution =
            classify::forward(model, classify::image_to_input(img));
        stream.entries.push_back(std::move(entry));
    }

    const auto windows = afme::segment_windows(duration, config.window);
    std::vector<EmotionDistribution> speech;
    speech.reserve(windows.size());
    for (const auto& w : windows) {
        const signal::AudioBuffer chunk = audio.slice(w.start_s, w.end_s);
        const signal::AudioFeatureVector fv =
            signal::extract_features(chunk, config.frame, config.features);
        speech.push_back(
            classify::predict_baseline(baseline, fv.flatten()));
    }

    return afme::run_afme(stream, speech, duration, config.wheel,
                          config.window);
}

}  // namespace

PipelineResult run_pipeline(const fs::path& input_root,
                            const PipelineConfig& config,
                            const fs::path& out_dir) {
    const auto clip_dirs = discover_clips(input_root);
    const classify::ModelSpec model =
        classify::load_model_file(config.resolve(config.model_path));
    const classify::BaselineModel baseline = classify::load_baseline_file(
        config.resolve(config.baseline_path));

    fs::create_directories(out_dir / "verdicts");

    PipelineResult result;
    result.out_dir = out_dir;
    for (const auto& dir : clip_dirs) {
        ClipOutcome outcome;
        outcome.clip_id = dir.filename().string();
        try {
            const ClipBundle bundle = load_clip_bundle(dir);
            outcome.clip_id = bundle.clip_id;
            outcome.verdicts = process_clip(bundle, config, model, baseline);
            outcome.ok = true;
            std::ofstream verdict_out(out_dir / "verdicts" /
                                      (outcome.clip_id + ".json"));
            verdict_out << afme::verdicts_json(outcome.clip_id,
                                               outcome.verdicts)
                        << '\n';
        } catch (const Error& e) {
            outcome.ok = false;
            outcome.error = e.what();
            outcome.exit_code = e.exit_code();
            fs::create_directories(out_dir / "failures");
            std::ofstream marker(out_dir / "failures" /
                                 (outcome.clip_id + ".txt"));
            marker << e.what() << '\n';
        }
        result.clips.push_back(std::move(outcome));
    }

    // predictions.csv over the successful clips
    std::map<std::string, std::string> predictions;
    for (const auto& clip : result.clips) {
        for (std::size_t w = 0; w < clip.verdicts.size(); ++w) {
            const auto& v = clip.verdicts[w];
            predictions[clip.clip_id + ":" + std::to_string(w)] =
                v.sarcasm ? "Sarcasm"
                          : std::string(emotion_name(*v.emotion));
        }
    }
    {
        std::ofstream pred_out(out_dir / "predictions.csv");
        pred_out << "key,label\n";
        for (const auto& [key, label] : predictions) {
            pred_out << key << ',' << label << '\n';
        }
    }

    nlohmann::json aggregate;
    {
        nlohmann::json rule_counts = nlohmann::json::object();
        long n_windows = 0;
        nlohmann::json sarcasm_keys = nlohmann::json::array();
        for (const auto& clip : result.clips) {
            for (std::size_t w = 0; w < clip.verdicts.size(); ++w) {
                const auto& v = clip.verdicts[w];
                ++n_windows;
                const std::string rule{afme::fusion_rule_name(v.rule)};
                rule_counts[rule] = rule_counts.value(rule, 0) + 1;
                if (v.sarcasm) {
                    sarcasm_keys.push_back(clip.clip_id + ":" +
                                           std::to_string(w));
                }
            }
        }
        aggregate["n_clips"] = result.clips.size();
        aggregate["n_windows"] = n_windows;
        aggregate["verdicts_by_rule"] = std::move(rule_counts);
        aggregate["sarcasm_windows"] = std::move(sarcasm_keys);
    }

    const fs::path truth_path = input_root / "truth.csv";
    if (fs::exists(truth_path)) {
        const auto truth = read_truth_with_sarcasm(truth_path);
        std::map<std::string, Emotion> truth_emotions;
        std::map<std::string, Emotion> pred_emotions;
        long truth_sarcasm = 0, predicted_sarcasm = 0, matched_sarcasm = 0;
        std::set<std::string> ok_clips;
        for (const auto& clip : result.clips) {
            if (clip.ok) {
                ok_clips.insert(clip.clip_id);
            }
        }
        for (const auto& [key, label] : truth) {
            const std::string clip_id = key.substr(0, key.find(':'));
            if (!ok_clips.contains(clip_id)) {
                continue;  // failed clips are excluded from scoring
            }
            const auto pred = predictions.find(key);
            if (pred == predictions.end()) {
                throw AlignmentError(
                    "pipeline: truth key \"" + key +
                    "\" has no matching prediction window");
            }
            const bool truth_is_sarcasm = label == "Sarcasm";
            const bool pred_is_sarcasm = pred->second == "Sarcasm";
            truth_sarcasm += truth_is_sarcasm;
            predicted_sarcasm += pred_is_sarcasm;
            matched_sarcasm += truth_is_sarcasm && pred_is_sarcasm;
            if (!truth_is_sarcasm && !pred_is_sarcasm) {
                truth_emotions.emplace(key, *emotion_from_name(label));
                pred_emotions.emplace(key,
                                      *emotion_from_name(pred->second));
            }
        }
        nlohmann::json sarcasm;
        sarcasm["truth"] = truth_sarcasm;
        sarcasm["predicted"] = predicted_sarcasm;
        sarcasm["matched"] = matched_sarcasm;
        aggregate["sarcasm_scoring"] = std::move(sarcasm);
        if (!truth_emotions.empty()) {
            const eval::EvalReport report =
                eval::evaluate_pairs(truth_emotions, pred_emotions);
            aggregate["evaluation"] =
                nlohmann::json::parse(eval::report_json(report));
        } else {
            aggregate["evaluation"] = nullptr;
        }
    }
    {
        std::ofstream agg_out(out_dir / "aggregate_report.json");
        agg_out << aggregate.dump(2) << '\n';
    }

    // Run manifest: enough to reproduce the run, nothing time-dependent.
    {
        nlohmann::json manifest;
        manifest["tool"] = "emofuse";
        manifest["version"] = kVersion;
        const std::string canonical = config.canonical_json();
        char hash[32];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(
                          canonical.data(), canonical.size())));
        manifest["config_hash"] = hash;
        manifest["seed"] = config.seed;
        nlohmann::json clips = nlohmann::json::array();
        for (const auto& clip : result.clips) {
            nlohmann::json c;
            c["clip_id"] = clip.clip_id;
            c["status"] = clip.ok ? "ok" : "failed";
            if (!clip.ok) {
                c["error"] = clip.error;
            }
            clips.push_back(std::move(c));
        }
        manifest["clips"] = std::move(clips);
        std::ofstream mf_out(out_dir / "run_manifest.json");
        mf_out << manifest.dump(2) << '\n';
    }

    for (const auto& clip : result.clips) {
        if (!clip.ok) {
            result.exit_code = std::max(result.exit_code, clip.exit_code);
        }
    }
    return result;
}

}  // namespace emofuse::pipeline
