#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emofuse/afme/fusion.hpp"
#include "emofuse/pipeline/config.hpp"

namespace emofuse::pipeline {

/// One clip's inputs: an audio file plus timestamped frame images, with
/// optional per-frame landmark files. Loaded from a clip.json of the form
/// {"clip_id", "audio", "frames":[{"t", "image", "landmarks"?}, ...]}.
struct ClipBundle {
    std::string clip_id;
    std::filesystem::path audio_path;
    struct FrameRef {
        double timestamp_s = 0.0;
        std::filesystem::path image_path;
        std::optional<std::filesystem::path> landmarks_path;
    };
    std::vector<FrameRef> frames;
};

ClipBundle load_clip_bundle(const std::filesystem::path& clip_dir);

/// Clip directories under root/clips/, sorted by name.
std::vector<std::filesystem::path> discover_clips(
    const std::filesystem::path& root);

struct ClipOutcome {
    std::string clip_id;
    bool ok = false;
    std::string error;
    int exit_code = 0;
    std::vector<afme::WindowVerdict> verdicts;
};

struct PipelineResult {
    std::vector<ClipOutcome> clips;
    int exit_code = 0;
    std::filesystem::path out_dir;
};

/// Runs preprocess -> classify -> features+baseline -> fuse -> evaluate
/// over every clip under input_root, writing verdicts, predictions, the
/// aggregate report and a run manifest beneath out_dir. A failing clip
/// leaves a marker under failures/ and the run continues; any failure
/// makes the result exit code nonzero.
PipelineResult run_pipeline(const std::filesystem::path& input_root,
                            const PipelineConfig& config,
                            const std::filesystem::path& out_dir);

}  // namespace emofuse::pipeline
