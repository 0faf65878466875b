#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emofuse/emotions.hpp"
#include "emofuse/vision/image.hpp"

namespace emofuse::eval {

enum class Modality {
    Image,
    Audio,
};

enum class Split {
    Train,
    Test,
};

struct ManifestRow {
    std::string path;
    Modality modality = Modality::Image;
    std::optional<Emotion> label;  // empty = unlabeled
    Split split = Split::Test;
    std::string clip_id;
    double timestamp_s = 0.0;
};

/// Dataset manifest CSV with header
/// "path,modality,label,split,clip_id,timestamp_s"; label is an emotion
/// name or "unlabeled".
struct DatasetManifest {
    std::vector<ManifestRow> rows;

    std::array<long, kNumEmotions> label_counts() const;
};

DatasetManifest read_manifest(const std::filesystem::path& path);
std::string manifest_csv(const DatasetManifest& manifest);
void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path);

/// w_c = N_total / (K * N_c) over the K classes with positive counts;
/// zero-count classes get no weight.
std::array<std::optional<double>, kNumEmotions> class_weights(
    const std::array<long, kNumEmotions>& counts);

std::string class_weights_json(
    const std::array<std::optional<double>, kNumEmotions>& weights);

/// Appends seeded uniform-with-replacement duplicates of minority-class
/// rows until every labeled class matches the majority count. Original
/// rows (and unlabeled rows) stay in place. Throws on a manifest with no
/// labeled rows.
DatasetManifest random_oversample(const DatasetManifest& manifest,
                                  std::uint64_t seed);

/// Horizontal mirror of a 48x48 grayscale training image.
vision::GrayImage augment_flip(const vision::GrayImage& img);

}  // namespace emofuse::eval
