#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emofuse/pipeline/config.hpp"
#include "emofuse/pipeline/fixture.hpp"
#include "emofuse/pipeline/run.hpp"

namespace emofuse::pipeline {

/// Command implementations behind the CLI. Each throws emofuse::Error on
/// failure; the CLI maps Error::exit_code() to the process exit status.

struct FeaturesOptions {
    std::filesystem::path audio;
    std::string clip_id;  // defaults to the file stem when empty
    signal::FrameSpec frame;
    signal::FeatureConfig features;
    std::string format = "json";  // or "csv"
};

std::string cmd_features(const FeaturesOptions& opts);

std::vector<std::uint8_t> cmd_preprocess(const std::filesystem::path& image);

struct ClassifyOptions {
    std::filesystem::path model;
    /// Either one image file or a directory of frames. A clip.json in the
    /// directory names the frames; otherwise *.pgm/*.ppm files sort by
    /// name with timestamps parsed from a "_t<seconds>" stem suffix (frame
    /// index when absent).
    std::filesystem::path input;
};

/// Per-frame distributions as a stream JSON array of
/// [timestamp, [7 probabilities]] entries, ordered by timestamp. This is
/// the same shape cmd_fuse consumes.
std::string cmd_classify(const ClassifyOptions& opts);

struct FuseOptions {
    std::filesystem::path image_stream;
    std::filesystem::path speech_stream;
    double duration_s = 0.0;
    std::string clip_id = "clip";
    afme::PlutchikWheel wheel;
    afme::WindowConfig window;
};

std::string cmd_fuse(const FuseOptions& opts);

struct EvaluateOptions {
    std::filesystem::path truth;
    std::filesystem::path predictions;
    /// When set, ignore truth/predictions and audit this published-metrics
    /// CSV (class,precision,recall,f1) instead.
    std::optional<std::filesystem::path> audit;
    std::string format = "json";  // report as "json" or "csv"
};

std::string cmd_evaluate(const EvaluateOptions& opts);

struct BalanceOptions {
    std::filesystem::path manifest;
    std::string method = "oversample";  // or "reweight"
    std::uint64_t seed = 0;
};

std::string cmd_balance(const BalanceOptions& opts);

struct PipelineOptions {
    std::filesystem::path input_root;
    std::optional<std::filesystem::path> config_path;
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::uint64_t> seed;
};

/// Returns the process exit code (0 = every clip succeeded).
int cmd_pipeline(const PipelineOptions& opts);

struct SynthFixtureOptions {
    std::string regime = "agree";
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;
    int n_clips = 12;
};

void cmd_synth_fixture(const SynthFixtureOptions& opts);

}  // namespace emofuse::pipeline
