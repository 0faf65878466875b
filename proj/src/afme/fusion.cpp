#include "emofuse/afme/fusion.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "emofuse/errors.hpp"

namespace emofuse::afme {

void FrameLabelStream::validate() const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i > 0 &&
            entries[i].timestamp_s <= entries[i - 1].timestamp_s) {
            throw ParameterError(
                "frame stream: timestamps not strictly increasing at entry " +
                std::to_string(i));
        }
        if (!entries[i].distribution.valid(1e-6)) {
            throw ParameterError("frame stream: entry " + std::to_string(i) +
                                 " is not a probability distribution");
        }
    }
}

void WindowConfig::validate() const {
    if (!(0.0 < min_s && min_s <= target_s && target_s <= max_s)) {
        throw ParameterError("window config: need 0 < min <= target <= max");
    }
}

std::vector<TimeWindow> segment_windows(double duration_s,
                                        const WindowConfig& config) {
    config.validate();
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
        throw ParameterError("segment_windows: duration must be positive");
    }

    std::vector<TimeWindow> windows;
    double start = 0.0;
    while (start + config.target_s <= duration_s) {
        windows.push_back({start, start + config.target_s});
        start += config.target_s;
    }
    const double remainder = duration_s - start;
    if (remainder > 1e-9) {
        if (remainder >= config.min_s || windows.empty()) {
            windows.push_back({start, duration_s});
        } else if (duration_s - windows.back().start_s <= config.max_s) {
            windows.back().end_s = duration_s;  // tail merge
        } else {
            windows.push_back({start, duration_s});  // short tail stands
        }
    } else if (windows.empty()) {
        windows.push_back({0.0, duration_s});
    }
    return windows;
}

FramePmf frame_pmf(const FrameLabelStream& stream, const TimeWindow& window) {
    stream.validate();
    Vector7d votes = Vector7d::Zero();
    Vector7d confidence_sum = Vector7d::Zero();
    long total = 0;
    for (const auto& entry : stream.entries) {
        if (!window.contains(entry.timestamp_s)) {
            continue;
        }
        const Emotion label = entry.distribution.argmax();
        const int idx = static_cast<int>(label);
        votes(idx) += 1.0;
        confidence_sum(idx) += entry.distribution[label];
        ++total;
    }
    if (total == 0) {
        throw InsufficientDataError(
            "frame_pmf: no frames inside window [" +
            std::to_string(window.start_s) + ", " +
            std::to_string(window.end_s) + ")");
    }
    FramePmf pmf;
    pmf.mass = votes / static_cast<double>(total);
    for (int i = 0; i < kNumEmotions; ++i) {
        pmf.mean_confidence(i) =
            votes(i) > 0.0 ? confidence_sum(i) / votes(i) : 0.0;
    }
    return pmf;
}

const ScoredEmotion& ScoredTopK::top1() const {
    if (count == 0) {
        throw InsufficientDataError("top-k: empty set");
    }
    return entries[0];
}

bool ScoredTopK::contains(Emotion e) const {
    for (int i = 0; i < count; ++i) {
        if (entries[static_cast<std::size_t>(i)].emotion == e) {
            return true;
        }
    }
    return false;
}

std::optional<double> ScoredTopK::score_of(Emotion e) const {
    for (int i = 0; i < count; ++i) {
        if (entries[static_cast<std::size_t>(i)].emotion == e) {
            return entries[static_cast<std::size_t>(i)].score;
        }
    }
    return std::nullopt;
}

void ScoredTopK::validate() const {
    if (count == 0) {
        throw InsufficientDataError("top-k: empty set");
    }
    if (count < 0 || count > 3) {
        throw ParameterError("top-k: count out of range");
    }
    for (int i = 0; i < count; ++i) {
        const auto& e = entries[static_cast<std::size_t>(i)];
        if (!(e.score >= 0.0 && e.score <= 1.0)) {
            throw ParameterError("top-k: score out of [0,1]");
        }
        if (i > 0 && entries[static_cast<std::size_t>(i - 1)].score <
                         e.score) {
            throw ParameterError("top-k: scores not descending");
        }
        for (int j = 0; j < i; ++j) {
            if (entries[static_cast<std::size_t>(j)].emotion == e.emotion) {
                throw ParameterError("top-k: duplicate emotion");
            }
        }
    }
}

namespace {

struct RankedLabel {
    Emotion emotion;
    double score;
    double tiebreak;
};

ScoredTopK take_top3(std::vector<RankedLabel> ranked, Source source) {
    if (ranked.empty()) {
        throw InsufficientDataError("top3: no label has mass");
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const RankedLabel& a, const RankedLabel& b) {
                  if (a.score != b.score) {
                      return a.score > b.score;
                  }
                  if (a.tiebreak != b.tiebreak) {
                      return a.tiebreak > b.tiebreak;
                  }
                  return static_cast<int>(a.emotion) <
                         static_cast<int>(b.emotion);
              });
    ScoredTopK out;
    out.source = source;
    out.count = static_cast<int>(std::min<std::size_t>(3, ranked.size()));
    for (int i = 0; i < out.count; ++i) {
        out.entries[static_cast<std::size_t>(i)] = {
            ranked[static_cast<std::size_t>(i)].emotion,
            ranked[static_cast<std::size_t>(i)].score};
    }
    return out;
}

}  // namespace

ScoredTopK top3(const FramePmf& pmf, Source source) {
    std::vector<RankedLabel> ranked;
    for (Emotion e : all_emotions()) {
        const int i = static_cast<int>(e);
        if (pmf.mass(i) > 0.0) {
            ranked.push_back({e, pmf.mass(i), pmf.mean_confidence(i)});
        }
    }
    return take_top3(std::move(ranked), source);
}

ScoredTopK top3_from_distribution(const EmotionDistribution& d,
                                  Source source) {
    std::vector<RankedLabel> ranked;
    for (Emotion e : all_emotions()) {
        const int i = static_cast<int>(e);
        if (d.p(i) > 0.0) {
            ranked.push_back({e, d.p(i), 0.0});
        }
    }
    return take_top3(std::move(ranked), source);
}

std::string_view fusion_rule_name(FusionRule rule) {
    switch (rule) {
        case FusionRule::Intersection:
            return "intersection";
        case FusionRule::Blend:
            return "blend";
        case FusionRule::NeutralFallback:
            return "neutral_fallback";
        case FusionRule::Sarcasm:
            return "sarcasm";
    }
    return "unknown";
}

WindowVerdict afme_fuse(const ScoredTopK& speech, const ScoredTopK& image,
                        const PlutchikWheel& wheel) {
    wheel.validate();
    speech.validate();
    image.validate();

    WindowVerdict verdict;
    verdict.speech_top3 = speech;
    verdict.image_top3 = image;

    // Rule 1: any common emotion wins; the ordinal scan makes score ties
    // break toward the lower ordinal.
    bool have_common = false;
    Emotion best_common = Emotion::Anger;
    double best_sum = -1.0;
    for (Emotion e : all_emotions()) {
        const auto s = speech.score_of(e);
        const auto i = image.score_of(e);
        if (s && i && *s + *i > best_sum) {
            best_sum = *s + *i;
            best_common = e;
            have_common = true;
        }
    }
    if (have_common) {
        verdict.emotion = best_common;
        verdict.confidence = best_sum / 2.0;
        verdict.rule = FusionRule::Intersection;
        return verdict;
    }

    const ScoredEmotion& s1 = speech.top1();
    const ScoredEmotion& i1 = image.top1();
    const bool s_neutral = s1.emotion == Emotion::Neutral;
    const bool i_neutral = i1.emotion == Emotion::Neutral;

    // Rule 2: a Neutral-led modality cannot contrast; defer to the other.
    if (s_neutral || i_neutral) {
        const ScoredEmotion& chosen =
            s_neutral && i_neutral ? (s1.score >= i1.score ? s1 : i1)
            : s_neutral            ? i1
                                   : s1;
        verdict.emotion = chosen.emotion;
        verdict.confidence = chosen.score;
        verdict.rule = FusionRule::NeutralFallback;
        return verdict;
    }

    // Rule 3: contrasting affects across the wheel.
    const double distance = wheel_distance(wheel, s1.emotion, i1.emotion);
    if (distance >= wheel.sarcasm_threshold_deg) {
        verdict.sarcasm = true;
        verdict.confidence = std::min(s1.score, i1.score);
        verdict.rule = FusionRule::Sarcasm;
        return verdict;
    }

    // Rule 4: nearby affects blend toward the weighted sector.
    verdict.emotion =
        blend_emotions(s1.emotion, s1.score, i1.emotion, i1.score, wheel);
    verdict.confidence = (s1.score + i1.score) / 2.0;
    verdict.rule = FusionRule::Blend;
    return verdict;
}

std::vector<WindowVerdict> run_afme(
    const FrameLabelStream& image_stream,
    const std::vector<EmotionDistribution>& speech_results,
    double duration_s, const PlutchikWheel& wheel,
    const WindowConfig& window_config) {
    image_stream.validate();
    const std::vector<TimeWindow> windows =
        segment_windows(duration_s, window_config);
    if (speech_results.size() < windows.size()) {
        const auto& w = windows[speech_results.size()];
        throw AlignmentError(
            "run_afme: no speech result for window " +
            std::to_string(speech_results.size()) + " [" +
            std::to_string(w.start_s) + ", " + std::to_string(w.end_s) + ")");
    }
    if (speech_results.size() > windows.size()) {
        throw AlignmentError(
            "run_afme: " + std::to_string(speech_results.size()) +
            " speech results for " + std::to_string(windows.size()) +
            " windows");
    }

    std::vector<WindowVerdict> verdicts;
    verdicts.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const ScoredTopK image_top =
            top3(frame_pmf(image_stream, windows[i]), Source::Image);
        const ScoredTopK speech_top =
            top3_from_distribution(speech_results[i], Source::Speech);
        WindowVerdict v = afme_fuse(speech_top, image_top, wheel);
        v.window = windows[i];
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

namespace {

nlohmann::json topk_json(const ScoredTopK& topk) {
    nlohmann::json arr = nlohmann::json::array();
    for (int i = 0; i < topk.count; ++i) {
        const auto& e = topk.entries[static_cast<std::size_t>(i)];
        arr.push_back({std::string(emotion_name(e.emotion)), e.score});
    }
    return arr;
}

}  // namespace

std::string verdicts_json(const std::string& clip_id,
                          const std::vector<WindowVerdict>& verdicts) {
    nlohmann::json j;
    j["clip_id"] = clip_id;
    nlohmann::json windows = nlohmann::json::array();
    for (const auto& v : verdicts) {
        nlohmann::json w;
        w["start_s"] = v.window.start_s;
        w["end_s"] = v.window.end_s;
        w["image_top3"] = topk_json(v.image_top3);
        w["speech_top3"] = topk_json(v.speech_top3);
        w["verdict"] = v.sarcasm ? "SARCASM"
                                 : std::string(emotion_name(*v.emotion));
        w["sarcasm"] = v.sarcasm;
        w["confidence"] = v.confidence;
        w["rule"] = std::string(fusion_rule_name(v.rule));
        windows.push_back(std::move(w));
    }
    j["windows"] = std::move(windows);
    return j.dump(2);
}

FrameLabelStream parse_stream_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DecodeError(std::string("stream: bad JSON: ") + e.what());
    }
    if (!j.is_array()) {
        throw DecodeError("stream: expected a JSON array of "
                          "[timestamp, [7 probabilities]] entries");
    }
    FrameLabelStream stream;
    stream.entries.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& entry = j[i];
        if (!entry.is_array() || entry.size() != 2 ||
            !entry[0].is_number() || !entry[1].is_array() ||
            entry[1].size() != kNumEmotions) {
            throw DecodeError("stream: entry " + std::to_string(i) +
                              " is not [timestamp, [7 probabilities]]");
        }
        Vector7d p;
        for (int c = 0; c < kNumEmotions; ++c) {
            if (!entry[1][static_cast<std::size_t>(c)].is_number()) {
                throw DecodeError("stream: entry " + std::to_string(i) +
                                  " has a non-numeric probability");
            }
            p(c) = entry[1][static_cast<std::size_t>(c)].get<double>();
        }
        FrameLabelStream::Entry e;
        e.timestamp_s = entry[0].get<double>();
        try {
            e.distribution = EmotionDistribution::from_probabilities(p);
        } catch (const ParameterError& err) {
            throw DecodeError("stream: entry " + std::to_string(i) + ": " +
                              err.what());
        }
        stream.entries.push_back(std::move(e));
    }
    stream.validate();
    return stream;
}

}  // namespace emofuse::afme
