#include "emofuse/eval/balance.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emofuse/errors.hpp"
#include "emofuse/rng.hpp"

namespace emofuse::eval {

namespace {

std::string_view modality_name(Modality m) {
    return m == Modality::Image ? "image" : "audio";
}

std::string_view split_name(Split s) {
    return s == Split::Train ? "train" : "test";
}

Modality modality_from_name(const std::string& s) {
    if (s == "image") {
        return Modality::Image;
    }
    if (s == "audio") {
        return Modality::Audio;
    }
    throw DecodeError("manifest: unknown modality \"" + s + "\"");
}

Split split_from_name(const std::string& s) {
    if (s == "train") {
        return Split::Train;
    }
    if (s == "test") {
        return Split::Test;
    }
    throw DecodeError("manifest: unknown split \"" + s + "\"");
}

constexpr const char* kManifestHeader =
    "path,modality,label,split,clip_id,timestamp_s";

}  // namespace

std::array<long, kNumEmotions> DatasetManifest::label_counts() const {
    std::array<long, kNumEmotions> counts{};
    for (const auto& row : rows) {
        if (row.label) {
            ++counts[static_cast<std::size_t>(*row.label)];
        }
    }
    return counts;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DecodeError("manifest: cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DecodeError("manifest: " + path.string() + " is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kManifestHeader) {
        throw DecodeError("manifest: " + path.string() +
                          " must start with header \"" +
                          std::string(kManifestHeader) + "\"");
    }

    DatasetManifest manifest;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ss(line);
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        if (fields.size() != 6) {
            throw DecodeError("manifest: " + path.string() + " line " +
                              std::to_string(line_no) +
                              " does not have 6 fields");
        }
        ManifestRow row;
        row.path = fields[0];
        if (row.path.empty()) {
            throw DecodeError("manifest: " + path.string() + " line " +
                              std::to_string(line_no) + ": empty path");
        }
        row.modality = modality_from_name(fields[1]);
        if (fields[2] != "unlabeled") {
            const auto emotion = emotion_from_name(fields[2]);
            if (!emotion) {
                throw DecodeError("manifest: " + path.string() + " line " +
                                  std::to_string(line_no) +
                                  ": unknown label \"" + fields[2] + "\"");
            }
            row.label = *emotion;
        }
        row.split = split_from_name(fields[3]);
        row.clip_id = fields[4];
        try {
            row.timestamp_s = std::stod(fields[5]);
        } catch (const std::exception&) {
            throw DecodeError("manifest: " + path.string() + " line " +
                              std::to_string(line_no) +
                              ": non-numeric timestamp");
        }
        manifest.rows.push_back(std::move(row));
    }
    return manifest;
}

std::string manifest_csv(const DatasetManifest& manifest) {
    std::ostringstream os;
    os << kManifestHeader << '\n';
    for (const auto& row : manifest.rows) {
        char ts[32];
        std::snprintf(ts, sizeof(ts), "%.3f", row.timestamp_s);
        os << row.path << ',' << modality_name(row.modality) << ','
           << (row.label ? emotion_name(*row.label) : "unlabeled") << ','
           << split_name(row.split) << ',' << row.clip_id << ',' << ts
           << '\n';
    }
    return os.str();
}

void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DecodeError("manifest: cannot write " + path.string());
    }
    out << manifest_csv(manifest);
}

std::array<std::optional<double>, kNumEmotions> class_weights(
    const std::array<long, kNumEmotions>& counts) {
    long total = 0;
    int k = 0;
    for (long c : counts) {
        if (c < 0) {
            throw ParameterError("class_weights: negative count");
        }
        total += c;
        if (c > 0) {
            ++k;
        }
    }
    std::array<std::optional<double>, kNumEmotions> weights;
    if (k == 0) {
        return weights;
    }
    for (std::size_t i = 0; i < kNumEmotions; ++i) {
        if (counts[i] > 0) {
            weights[i] = static_cast<double>(total) /
                         (static_cast<double>(k) *
                          static_cast<double>(counts[i]));
        }
    }
    return weights;
}

std::string class_weights_json(
    const std::array<std::optional<double>, kNumEmotions>& weights) {
    nlohmann::json j;
    for (std::size_t i = 0; i < kNumEmotions; ++i) {
        if (weights[i]) {
            j[std::string(emotion_name(static_cast<Emotion>(i)))] =
                *weights[i];
        }
    }
    return j.dump(2);
}

DatasetManifest random_oversample(const DatasetManifest& manifest,
                                  std::uint64_t seed) {
    const auto counts = manifest.label_counts();
    long majority = 0;
    for (long c : counts) {
        majority = std::max(majority, c);
    }
    if (majority == 0) {
        throw ParameterError("oversample: manifest has no labeled rows");
    }

    std::array<std::vector<std::size_t>, kNumEmotions> by_class;
    for (std::size_t i = 0; i < manifest.rows.size(); ++i) {
        if (manifest.rows[i].label) {
            by_class[static_cast<std::size_t>(*manifest.rows[i].label)]
                .push_back(i);
        }
    }

    DatasetManifest out = manifest;
    SplitMix64 rng(seed);
    for (std::size_t c = 0; c < kNumEmotions; ++c) {
        const auto& members = by_class[c];
        if (members.empty()) {
            continue;
        }
        for (long need = majority - static_cast<long>(members.size());
             need > 0; --need) {
            const std::size_t pick = static_cast<std::size_t>(
                rng.next_below(members.size()));
            out.rows.push_back(manifest.rows[members[pick]]);
        }
    }
    return out;
}

vision::GrayImage augment_flip(const vision::GrayImage& img) {
    return vision::flip_horizontal(img);
}

}  // namespace emofuse::eval
