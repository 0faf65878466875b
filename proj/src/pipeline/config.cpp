#include "emofuse/pipeline/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "emofuse/errors.hpp"

namespace emofuse::pipeline {

std::string window_kind_name(signal::Window w) {
    return w == signal::Window::Hann ? "hann" : "rectangular";
}

signal::Window window_kind_from_name(const std::string& name) {
    if (name == "hann") {
        return signal::Window::Hann;
    }
    if (name == "rectangular") {
        return signal::Window::Rectangular;
    }
    throw ParameterError("config: unknown window kind \"" + name + "\"");
}

std::filesystem::path PipelineConfig::resolve(const std::string& p) const {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
}

std::string PipelineConfig::canonical_json() const {
    nlohmann::json j;
    j["window"] = {{"min_s", window.min_s},
                   {"max_s", window.max_s},
                   {"target_s", window.target_s}};
    j["wheel"] = {{"sarcasm_threshold_deg", wheel.sarcasm_threshold_deg},
                  {"blend_threshold_deg", wheel.blend_threshold_deg}};
    j["frame"] = {{"frame_len", frame.frame_len},
                  {"hop_len", frame.hop_len},
                  {"window", window_kind_name(frame.window)},
                  {"n_mels", features.n_mels},
                  {"n_mfcc", features.n_mfcc}};
    j["model"] = model_path;
    j["baseline"] = baseline_path;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    return j.dump(2);
}

PipelineConfig parse_config(const std::string& json_text,
                            const std::filesystem::path& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DecodeError(std::string("config: bad JSON: ") + e.what());
    }
    PipelineConfig c;
    c.base_dir = base_dir;
    try {
        if (j.contains("window")) {
            const auto& w = j.at("window");
            c.window.min_s = w.value("min_s", c.window.min_s);
            c.window.max_s = w.value("max_s", c.window.max_s);
            c.window.target_s = w.value("target_s", c.window.target_s);
        }
        if (j.contains("wheel")) {
            const auto& w = j.at("wheel");
            c.wheel.sarcasm_threshold_deg =
                w.value("sarcasm_threshold_deg", c.wheel.sarcasm_threshold_deg);
            c.wheel.blend_threshold_deg =
                w.value("blend_threshold_deg", c.wheel.blend_threshold_deg);
        }
        if (j.contains("frame")) {
            const auto& f = j.at("frame");
            c.frame.frame_len = f.value("frame_len", c.frame.frame_len);
            c.frame.hop_len = f.value("hop_len", c.frame.hop_len);
            c.frame.window = window_kind_from_name(
                f.value("window", window_kind_name(c.frame.window)));
            c.features.n_mels = f.value("n_mels", c.features.n_mels);
            c.features.n_mfcc = f.value("n_mfcc", c.features.n_mfcc);
        }
        c.model_path = j.value("model", c.model_path);
        c.baseline_path = j.value("baseline", c.baseline_path);
        c.seed = j.value("seed", c.seed);
        c.out_dir = j.value("out_dir", c.out_dir);
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError(std::string("config: ") + e.what());
    }
    c.window.validate();
    c.wheel.validate();
    c.frame.validate();
    return c;
}

PipelineConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DecodeError("config: cannot open " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_config(text, path.parent_path());
}

void save_config_file(const PipelineConfig& config,
                      const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DecodeError("config: cannot write " + path.string());
    }
    out << config.canonical_json() << '\n';
}

}  // namespace emofuse::pipeline
