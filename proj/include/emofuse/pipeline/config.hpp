#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "emofuse/afme/fusion.hpp"
#include "emofuse/signal/features.hpp"

namespace emofuse::pipeline {

/// Run configuration shared by the fuse and pipeline commands. Relative
/// model/baseline paths resolve against the directory the config file was
/// loaded from.
struct PipelineConfig {
    afme::WindowConfig window;
    afme::PlutchikWheel wheel;
    signal::FrameSpec frame;
    signal::FeatureConfig features;
    std::string model_path = "model.json";
    std::string baseline_path = "baseline.json";
    std::uint64_t seed = 0;
    std::string out_dir = "out";

    std::filesystem::path base_dir = ".";

    std::filesystem::path resolve(const std::string& p) const;

    /// Deterministic serialization (base_dir excluded); also what the run
    /// manifest's config hash is computed over.
    std::string canonical_json() const;
};

PipelineConfig load_config_file(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& json_text,
                            const std::filesystem::path& base_dir);
void save_config_file(const PipelineConfig& config,
                      const std::filesystem::path& path);

std::string window_kind_name(signal::Window w);
signal::Window window_kind_from_name(const std::string& name);

}  // namespace emofuse::pipeline
