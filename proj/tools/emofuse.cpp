// emofuse — multimodal emotion recognition toolkit.
//
// Subcommands: features, preprocess, classify, fuse, evaluate, balance,
// pipeline, synth-fixture. Exit codes: 0 success, 2 input/format error,
// 3 data-alignment error, 4 internal invariant violation.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "emofuse/errors.hpp"
#include "emofuse/pipeline/commands.hpp"
#include "emofuse/version.hpp"

namespace {

namespace pl = emofuse::pipeline;

void write_output(const std::string& text,
                  const std::optional<std::filesystem::path>& out) {
    if (out) {
        std::ofstream f(*out, std::ios::binary);
        if (!f) {
            throw emofuse::DecodeError("cannot write " + out->string());
        }
        f << text;
    } else {
        std::cout << text;
    }
}

void write_bytes(const std::vector<std::uint8_t>& bytes,
                 const std::optional<std::filesystem::path>& out) {
    if (out) {
        std::ofstream f(*out, std::ios::binary);
        if (!f) {
            throw emofuse::DecodeError("cannot write " + out->string());
        }
        f.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
    } else {
        std::cout.write(reinterpret_cast<const char*>(bytes.data()),
                        static_cast<std::streamsize>(bytes.size()));
    }
}

std::optional<std::filesystem::path> env_config() {
    if (const char* env = std::getenv("EMOFUSE_CONFIG")) {
        return std::filesystem::path(env);
    }
    return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"emofuse — multimodal emotion recognition toolkit"};
    app.set_version_flag("--version", emofuse::kVersion);
    app.require_subcommand(1);

    std::optional<std::filesystem::path> out_path;
    auto add_out = [&out_path](CLI::App* sub) {
        sub->add_option("--out", out_path,
                        "Write primary output here instead of standard "
                        "output");
    };
    std::optional<std::filesystem::path> config_path;
    auto add_config = [&config_path](CLI::App* sub) {
        sub->add_option("--config", config_path,
                        "Pipeline config JSON supplying defaults "
                        "(EMOFUSE_CONFIG is the fallback)");
    };
    auto resolve_config =
        [&config_path]() -> std::optional<pl::PipelineConfig> {
        if (config_path) {
            return pl::load_config_file(*config_path);
        }
        if (auto env = env_config()) {
            return pl::load_config_file(*env);
        }
        return std::nullopt;
    };

    // features
    auto* features = app.add_subcommand(
        "features", "Extract audio features from a WAV file");
    pl::FeaturesOptions feat_opts;
    std::string frame_window = "hann";
    features->add_option("audio", feat_opts.audio, "Input WAV")->required();
    features->add_option("--clip-id", feat_opts.clip_id, "Clip id for the "
                                                         "output row");
    auto* feat_frame_len = features->add_option(
        "--frame-len", feat_opts.frame.frame_len, "Frame length in samples");
    auto* feat_hop_len = features->add_option(
        "--hop-len", feat_opts.frame.hop_len, "Hop length in samples");
    auto* feat_window = features->add_option(
        "--window", frame_window, "Analysis window: hann or rectangular");
    auto* feat_n_mels = features->add_option(
        "--n-mels", feat_opts.features.n_mels, "Mel band count");
    auto* feat_n_mfcc = features->add_option(
        "--n-mfcc", feat_opts.features.n_mfcc, "MFCC coefficient count");
    features->add_option("--format", feat_opts.format, "json or csv");
    add_out(features);
    add_config(features);

    // preprocess
    auto* preprocess = app.add_subcommand(
        "preprocess", "Convert an image (PGM/PPM) to 48x48 grayscale PGM");
    std::filesystem::path pre_image;
    preprocess->add_option("image", pre_image, "Input image")->required();
    add_out(preprocess);

    // classify
    auto* classify = app.add_subcommand(
        "classify", "Run the CNN over an image or a frame directory");
    pl::ClassifyOptions cls_opts;
    classify->add_option("--model", cls_opts.model, "Model JSON file")
        ->required();
    classify->add_option("input", cls_opts.input,
                         "Image file or frame directory")
        ->required();
    add_out(classify);

    // fuse
    auto* fuse = app.add_subcommand(
        "fuse", "Fuse image and speech emotion streams into verdicts");
    pl::FuseOptions fuse_opts;
    fuse->add_option("--image-stream", fuse_opts.image_stream,
                     "Image stream JSON")
        ->required();
    fuse->add_option("--speech-stream", fuse_opts.speech_stream,
                     "Speech stream JSON")
        ->required();
    fuse->add_option("--duration", fuse_opts.duration_s,
                     "Clip duration in seconds")
        ->required();
    fuse->add_option("--clip-id", fuse_opts.clip_id, "Clip id");
    auto* fuse_threshold = fuse->add_option(
        "--sarcasm-threshold", fuse_opts.wheel.sarcasm_threshold_deg,
        "Wheel distance (degrees) at which verdicts contrast");
    add_out(fuse);
    add_config(fuse);

    // evaluate
    auto* evaluate = app.add_subcommand(
        "evaluate", "Score predictions against truth, or audit published "
                    "metric rows");
    pl::EvaluateOptions eval_opts;
    std::filesystem::path audit_path;
    evaluate->add_option("--truth", eval_opts.truth, "Truth CSV (key,label)");
    evaluate->add_option("--predictions", eval_opts.predictions,
                         "Predictions CSV (key,label)");
    auto* audit_flag = evaluate->add_option(
        "--audit", audit_path,
        "Audit a published metrics CSV (class,precision,recall,f1)");
    evaluate->add_option("--format", eval_opts.format, "json or csv");
    add_out(evaluate);

    // balance
    auto* balance = app.add_subcommand(
        "balance", "Rebalance a dataset manifest");
    pl::BalanceOptions bal_opts;
    balance->add_option("manifest", bal_opts.manifest, "Manifest CSV")
        ->required();
    balance->add_option("--method", bal_opts.method,
                        "oversample or reweight");
    balance->add_option("--seed", bal_opts.seed, "Oversampling seed");
    add_out(balance);

    // pipeline
    auto* pipeline = app.add_subcommand(
        "pipeline", "Run the full per-clip pipeline over a bundle tree");
    pl::PipelineOptions pipe_opts;
    std::uint64_t pipe_seed = 0;
    pipeline->add_option("input", pipe_opts.input_root,
                         "Input root (contains clips/)")
        ->required();
    auto* seed_flag =
        pipeline->add_option("--seed", pipe_seed, "Override the config seed");
    add_out(pipeline);
    add_config(pipeline);

    // synth-fixture
    auto* synth = app.add_subcommand(
        "synth-fixture", "Generate a synthetic clip set with planted "
                         "verdicts");
    pl::SynthFixtureOptions synth_opts;
    synth->add_option("--regime", synth_opts.regime,
                      "agree, contrast or mixed");
    synth->add_option("--seed", synth_opts.seed, "Generation seed");
    synth->add_option("--clips", synth_opts.n_clips, "Clip count");
    synth->add_option("--out", synth_opts.out_dir, "Output directory")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*features) {
            if (const auto config = resolve_config()) {
                if (!*feat_frame_len) {
                    feat_opts.frame.frame_len = config->frame.frame_len;
                }
                if (!*feat_hop_len) {
                    feat_opts.frame.hop_len = config->frame.hop_len;
                }
                if (!*feat_window) {
                    frame_window = pl::window_kind_name(config->frame.window);
                }
                if (!*feat_n_mels) {
                    feat_opts.features.n_mels = config->features.n_mels;
                }
                if (!*feat_n_mfcc) {
                    feat_opts.features.n_mfcc = config->features.n_mfcc;
                }
            }
            feat_opts.frame.window = pl::window_kind_from_name(frame_window);
            write_output(pl::cmd_features(feat_opts), out_path);
        } else if (*preprocess) {
            write_bytes(pl::cmd_preprocess(pre_image), out_path);
        } else if (*classify) {
            write_output(pl::cmd_classify(cls_opts), out_path);
        } else if (*fuse) {
            if (const auto config = resolve_config()) {
                fuse_opts.window = config->window;
                if (!*fuse_threshold) {
                    fuse_opts.wheel = config->wheel;
                }
            }
            write_output(pl::cmd_fuse(fuse_opts), out_path);
        } else if (*evaluate) {
            if (*audit_flag) {
                eval_opts.audit = audit_path;
            } else if (eval_opts.truth.empty() ||
                       eval_opts.predictions.empty()) {
                std::cerr << "emofuse evaluate: need --truth and "
                             "--predictions (or --audit)\n";
                return 2;
            }
            write_output(pl::cmd_evaluate(eval_opts), out_path);
        } else if (*balance) {
            write_output(pl::cmd_balance(bal_opts), out_path);
        } else if (*pipeline) {
            if (config_path) {
                pipe_opts.config_path = config_path;
            } else if (auto env = env_config()) {
                pipe_opts.config_path = env;
            }
            if (*seed_flag) {
                pipe_opts.seed = pipe_seed;
            }
            if (out_path) {
                pipe_opts.out_dir = out_path;
            }
            return pl::cmd_pipeline(pipe_opts);
        } else if (*synth) {
            pl::cmd_synth_fixture(synth_opts);
        }
    } catch (const emofuse::Error& e) {
        std::cerr << "emofuse: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "emofuse: internal error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
