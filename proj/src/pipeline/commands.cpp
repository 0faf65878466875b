#include "emofuse/pipeline/commands.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "emofuse/classify/model.hpp"
#include "emofuse/errors.hpp"
#include "emofuse/eval/balance.hpp"
#include "emofuse/eval/metrics.hpp"
#include "emofuse/signal/features.hpp"
#include "emofuse/signal/wav.hpp"
#include "emofuse/vision/pnm.hpp"

namespace emofuse::pipeline {

namespace fs = std::filesystem;

std::string cmd_features(const FeaturesOptions& opts) {
    const signal::AudioBuffer buf = signal::load_wav_file(opts.audio);
    const signal::AudioFeatureVector fv =
        signal::extract_features(buf, opts.frame, opts.features);
    const std::string clip_id =
        opts.clip_id.empty() ? opts.audio.stem().string() : opts.clip_id;
    if (opts.format == "csv") {
        return signal::feature_csv_header(opts.features.n_mfcc) + "\n" +
               signal::feature_csv_row(clip_id, fv) + "\n";
    }
    if (opts.format == "json") {
        return signal::feature_json(clip_id, fv) + "\n";
    }
    throw ParameterError("features: unknown format \"" + opts.format + "\"");
}

std::vector<std::uint8_t> cmd_preprocess(const fs::path& image) {
    vision::GrayImage img = vision::load_image_file(image);
    if (img.width() != 48 || img.height() != 48) {
        img = vision::resize_48(img);
    }
    return vision::encode_pgm(img);
}

namespace {

// "face_t2.500.pgm" -> 2.5; nullopt when no _t<float> suffix is present.
std::optional<double> parse_frame_time(const std::string& stem) {
    const auto pos = stem.rfind("_t");
    if (pos == std::string::npos) {
        return std::nullopt;
    }
    try {
        std::size_t used = 0;
        const double t = std::stod(stem.substr(pos + 2), &used);
        if (used != stem.size() - pos - 2) {
            return std::nullopt;
        }
        return t;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

struct TimedFrame {
    double t;
    fs::path path;
};

std::vector<TimedFrame> collect_frames(const fs::path& input) {
    std::vector<TimedFrame> frames;
    if (fs::is_directory(input)) {
        if (fs::exists(input / "clip.json")) {
            const ClipBundle bundle = load_clip_bundle(input);
            for (const auto& f : bundle.frames) {
                frames.push_back({f.timestamp_s, f.image_path});
            }
            return frames;
        }
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(input)) {
            const auto ext = entry.path().extension();
            if (entry.is_regular_file() && (ext == ".pgm" || ext == ".ppm")) {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            throw DecodeError("classify: no .pgm/.ppm frames under " +
                              input.string());
        }
        for (std::size_t i = 0; i < files.size(); ++i) {
            const auto t = parse_frame_time(files[i].stem().string());
            frames.push_back(
                {t ? *t : static_cast<double>(i), files[i]});
        }
        std::sort(frames.begin(), frames.end(),
                  [](const TimedFrame& a, const TimedFrame& b) {
                      return a.t < b.t;
                  });
        return frames;
    }
    frames.push_back({0.0, input});
    return frames;
}

}  // namespace

std::string cmd_classify(const ClassifyOptions& opts) {
    const classify::ModelSpec model = classify::load_model_file(opts.model);
    nlohmann::json out = nlohmann::json::array();
    for (const auto& frame : collect_frames(opts.input)) {
        vision::GrayImage img = vision::load_image_file(frame.path);
        if (img.width() != 48 || img.height() != 48) {
            img = vision::resize_48(img);
        }
        const EmotionDistribution d =
            classify::forward(model, classify::image_to_input(img));
        out.push_back(
            {frame.t, std::vector<double>(d.p.begin(), d.p.end())});
    }
    return out.dump(2) + "\n";
}

namespace {

std::string read_text(const fs::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) {
        throw DecodeError(std::string(what) + ": cannot open " +
                          path.string());
    }
    return {std::istreambuf_iterator<char>(in),
            std::istreambuf_iterator<char>()};
}

}  // namespace

std::string cmd_fuse(const FuseOptions& opts) {
    const afme::FrameLabelStream image_stream =
        afme::parse_stream_json(read_text(opts.image_stream, "fuse"));
    const afme::FrameLabelStream speech_stream =
        afme::parse_stream_json(read_text(opts.speech_stream, "fuse"));

    const auto windows = afme::segment_windows(opts.duration_s, opts.window);
    // One speech distribution per window: the first entry inside it.
    std::vector<EmotionDistribution> speech;
    speech.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto it = std::find_if(
            speech_stream.entries.begin(), speech_stream.entries.end(),
            [&](const afme::FrameLabelStream::Entry& e) {
                return windows[i].contains(e.timestamp_s);
            });
        if (it == speech_stream.entries.end()) {
            throw AlignmentError(
                "fuse: no speech entry inside window " + std::to_string(i) +
                " [" + std::to_string(windows[i].start_s) + ", " +
                std::to_string(windows[i].end_s) + ")");
        }
        speech.push_back(it->distribution);
    }

    const auto verdicts = afme::run_afme(image_stream, speech,
                                         opts.duration_s, opts.wheel,
                                         opts.window);
    return afme::verdicts_json(opts.clip_id, verdicts) + "\n";
}

std::string cmd_evaluate(const EvaluateOptions& opts) {
    if (opts.audit) {
        const auto rows = eval::read_published_csv(*opts.audit);
        return eval::audit_json(eval::consistency_audit(rows)) + "\n";
    }
    const eval::EvalReport report =
        eval::evaluate_run(opts.truth, opts.predictions);
    if (opts.format == "csv") {
        return eval::report_csv(report);
    }
    if (opts.format == "json") {
        return eval::report_json(report) + "\n";
    }
    throw ParameterError("evaluate: unknown format \"" + opts.format + "\"");
}

std::string cmd_balance(const BalanceOptions& opts) {
    const eval::DatasetManifest manifest = eval::read_manifest(opts.manifest);
    if (opts.method == "oversample") {
        return eval::manifest_csv(
            eval::random_oversample(manifest, opts.seed));
    }
    if (opts.method == "reweight") {
        const auto counts = manifest.label_counts();
        if (std::all_of(counts.begin(), counts.end(),
                        [](long c) { return c == 0; })) {
            throw ParameterError("balance: manifest has no labeled rows");
        }
        return eval::class_weights_json(eval::class_weights(counts)) + "\n";
    }
    throw ParameterError("balance: unknown method \"" + opts.method + "\"");
}

int cmd_pipeline(const PipelineOptions& opts) {
    PipelineConfig config;
    if (opts.config_path) {
        config = load_config_file(*opts.config_path);
    } else if (fs::exists(opts.input_root / "config.json")) {
        config = load_config_file(opts.input_root / "config.json");
    } else {
        config.base_dir = opts.input_root;
    }
    if (opts.seed) {
        config.seed = *opts.seed;
    }
    const fs::path out_dir =
        opts.out_dir ? *opts.out_dir : fs::path(config.out_dir);
    fs::create_directories(out_dir);
    const PipelineResult result =
        run_pipeline(opts.input_root, config, out_dir);
    return result.exit_code;
}

void cmd_synth_fixture(const SynthFixtureOptions& opts) {
    FixtureSpec spec;
    spec.regime = regime_from_name(opts.regime);
    spec.seed = opts.seed;
    spec.n_clips = opts.n_clips;
    synth_fixture(spec, opts.out_dir);
}

}  // namespace emofuse::pipeline
