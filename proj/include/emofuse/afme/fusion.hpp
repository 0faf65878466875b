#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "emofuse/afme/wheel.hpp"
#include "emofuse/emotions.hpp"

namespace emofuse::afme {

/// Timestamped per-frame classifier outputs, strictly increasing in time.
struct FrameLabelStream {
    struct Entry {
        double timestamp_s = 0.0;
        EmotionDistribution distribution;
    };
    std::vector<Entry> entries;

    void validate() const;
};

struct TimeWindow {
    double start_s = 0.0;
    double end_s = 0.0;

    double length_s() const { return end_s - start_s; }
    bool contains(double t) const { return t >= start_s && t < end_s; }
};

struct WindowConfig {
    double min_s = 5.0;
    double max_s = 8.0;
    double target_s = 6.0;

    void validate() const;
};

/// Greedy target-length tiling of [0, duration). A final remainder shorter
/// than min_s merges into the previous window when the merged length stays
/// within max_s, otherwise it stands as its own short window. A clip
/// shorter than min_s becomes a single window.
std::vector<TimeWindow> segment_windows(double duration_s,
                                        const WindowConfig& config = {});

/// Empirical label statistics of the frames inside one window: each frame
/// votes with its argmax; mass is the vote frequency and confidence the
/// mean argmax probability of the voting frames.
struct FramePmf {
    Vector7d mass = Vector7d::Zero();
    Vector7d mean_confidence = Vector7d::Zero();
};

FramePmf frame_pmf(const FrameLabelStream& stream, const TimeWindow& window);

enum class Source {
    Image,
    Speech,
};

struct ScoredEmotion {
    Emotion emotion = Emotion::Neutral;
    double score = 0.0;
};

/// Up to three distinct emotions, scores descending in [0, 1].
struct ScoredTopK {
    std::array<ScoredEmotion, 3> entries{};
    int count = 0;
    Source source = Source::Image;

    const ScoredEmotion& top1() const;
    bool contains(Emotion e) const;
    std::optional<double> score_of(Emotion e) const;
    void validate() const;
};

/// The labels of nonzero mass ranked by (mass desc, mean confidence desc,
/// ordinal asc), truncated to three. Throws InsufficientDataError when no
/// label has mass.
ScoredTopK top3(const FramePmf& pmf, Source source);

/// The three largest nonzero probabilities of a distribution, ties toward
/// the lower ordinal.
ScoredTopK top3_from_distribution(const EmotionDistribution& d,
                                  Source source);

enum class FusionRule {
    Intersection,
    Blend,
    NeutralFallback,
    Sarcasm,
};

std::string_view fusion_rule_name(FusionRule rule);

struct WindowVerdict {
    TimeWindow window;
    std::optional<Emotion> emotion;  // empty iff sarcasm
    bool sarcasm = false;
    double confidence = 0.0;
    ScoredTopK image_top3;
    ScoredTopK speech_top3;
    FusionRule rule = FusionRule::Intersection;
};

/// The fusion decision, in rule order:
///  1. top-3 sets intersect -> the common emotion with the largest score
///     sum (ties toward the lower ordinal), confidence = sum / 2;
///  2. disjoint with a Neutral-led modality -> the other modality's top-1;
///  3. disjoint, both top-1 affective, wheel distance at or beyond the
///     sarcasm threshold -> sarcasm, confidence = min of the top-1 scores;
///  4. otherwise -> blend of the two top-1s.
WindowVerdict afme_fuse(const ScoredTopK& speech, const ScoredTopK& image,
                        const PlutchikWheel& wheel);

/// Runs the full per-window pipeline: image top-3 from the frame PMF,
/// speech top-3 from that window's distribution, then the fusion rules.
/// speech_results[i] pairs with the i-th segmented window; a missing entry
/// raises AlignmentError naming the window.
std::vector<WindowVerdict> run_afme(
    const FrameLabelStream& image_stream,
    const std::vector<EmotionDistribution>& speech_results,
    double duration_s, const PlutchikWheel& wheel = {},
    const WindowConfig& window_config = {});

/// Verdict stream JSON: {"clip_id", "windows":[{"start_s","end_s",
/// "image_top3":[["Happy",0.8],...],"speech_top3":[...],"verdict",
/// "sarcasm","confidence","rule"}]}.
std::string verdicts_json(const std::string& clip_id,
                          const std::vector<WindowVerdict>& verdicts);

/// Parses a JSON array of [timestamp, [p0..p6]] entries.
FrameLabelStream parse_stream_json(const std::string& text);

}  // namespace emofuse::afme
