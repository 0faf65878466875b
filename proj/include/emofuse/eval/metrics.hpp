#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "emofuse/emotions.hpp"

namespace emofuse::eval {

/// 7x7 counts, rows = truth, columns = predicted.
struct ConfusionMatrix {
    Eigen::Matrix<long, kNumEmotions, kNumEmotions> counts =
        Eigen::Matrix<long, kNumEmotions, kNumEmotions>::Zero();

    long total() const { return counts.sum(); }
    long n_truth(Emotion e) const {
        return counts.row(static_cast<int>(e)).sum();
    }
    long n_classified(Emotion e) const {
        return counts.col(static_cast<int>(e)).sum();
    }
};

ConfusionMatrix confusion(
    const std::vector<std::pair<Emotion, Emotion>>& truth_predicted);

/// Ratios with a zero denominator are reported absent, not zero.
struct ClassMetrics {
    long n_truth = 0;
    long n_classified = 0;
    std::optional<double> accuracy;   // one-vs-rest (TP+TN)/total
    std::optional<double> precision;  // TP/(TP+FP)
    std::optional<double> recall;     // TP/(TP+FN)
    std::optional<double> f1;         // 2PR/(P+R)
};

std::array<ClassMetrics, kNumEmotions> class_metrics(
    const ConfusionMatrix& cm);

/// A published metric row as it appears in a results table.
struct PublishedRow {
    Emotion emotion = Emotion::Anger;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct AuditRow {
    Emotion emotion = Emotion::Anger;
    bool consistent = true;
    double recomputed_f1 = 0.0;
    double delta = 0.0;
};

inline constexpr double kAuditTolerance = 0.015;

/// Checks each row's published F1 against the harmonic mean of its
/// precision and recall; |recomputed - published| > 0.015 flags the row.
std::vector<AuditRow> consistency_audit(
    const std::vector<PublishedRow>& published);

struct MacroMetrics {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    double accuracy = 0.0;  // trace / total
};

struct EvalReport {
    ConfusionMatrix confusion;
    std::array<ClassMetrics, kNumEmotions> per_class;
    MacroMetrics macro;
};

EvalReport make_report(const ConfusionMatrix& cm);

/// Truth/prediction files are CSV with header "key,label". Keys must match
/// exactly between the two files; a mismatch raises AlignmentError listing
/// the missing keys.
std::map<std::string, Emotion> read_label_csv(
    const std::filesystem::path& path);

EvalReport evaluate_run(const std::filesystem::path& truth_csv,
                        const std::filesystem::path& prediction_csv);

EvalReport evaluate_pairs(const std::map<std::string, Emotion>& truth,
                          const std::map<std::string, Emotion>& predicted);

std::string report_json(const EvalReport& report);

/// CSV summary, one row per class:
/// class,n_truth,n_classified,accuracy,precision,recall,f1 (absent values
/// are empty fields).
std::string report_csv(const EvalReport& report);

std::string audit_json(const std::vector<AuditRow>& rows);

/// Audit input CSV: header "class,precision,recall,f1".
std::vector<PublishedRow> read_published_csv(
    const std::filesystem::path& path);

}  // namespace emofuse::eval
