#include "emofuse/eval/metrics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emofuse/errors.hpp"

namespace emofuse::eval {

ConfusionMatrix confusion(
    const std::vector<std::pair<Emotion, Emotion>>& truth_predicted) {
    ConfusionMatrix cm;
    for (const auto& [truth, predicted] : truth_predicted) {
        ++cm.counts(static_cast<int>(truth), static_cast<int>(predicted));
    }
    return cm;
}

std::array<ClassMetrics, kNumEmotions> class_metrics(
    const ConfusionMatrix& cm) {
    const long total = cm.total();
    if (total == 0) {
        throw InsufficientDataError("class_metrics: empty confusion matrix");
    }
    std::array<ClassMetrics, kNumEmotions> out;
    for (int c = 0; c < kNumEmotions; ++c) {
        ClassMetrics& m = out[static_cast<std::size_t>(c)];
        const long tp = cm.counts(c, c);
        m.n_truth = cm.n_truth(static_cast<Emotion>(c));
        m.n_classified = cm.n_classified(static_cast<Emotion>(c));
        const long fp = m.n_classified - tp;
        const long fn = m.n_truth - tp;
        const long tn = total - tp - fp - fn;
        m.accuracy = static_cast<double>(tp + tn) / total;
        if (tp + fp > 0) {
            m.precision = static_cast<double>(tp) / (tp + fp);
        }
        if (tp + fn > 0) {
            m.recall = static_cast<double>(tp) / (tp + fn);
        }
        if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
            m.f1 = 2.0 * *m.precision * *m.recall /
                   (*m.precision + *m.recall);
        }
    }
    return out;
}

std::vector<AuditRow> consistency_audit(
    const std::vector<PublishedRow>& published) {
    std::vector<AuditRow> out;
    out.reserve(published.size());
    for (const auto& row : published) {
        AuditRow audit;
        audit.emotion = row.emotion;
        const double denom = row.precision + row.recall;
        audit.recomputed_f1 =
            denom > 0.0 ? 2.0 * row.precision * row.recall / denom : 0.0;
        audit.delta = std::abs(audit.recomputed_f1 - row.f1);
        audit.consistent = audit.delta <= kAuditTolerance;
        out.push_back(audit);
    }
    return out;
}

EvalReport make_report(const ConfusionMatrix& cm) {
    EvalReport report;
    report.confusion = cm;
    report.per_class = class_metrics(cm);

    double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
    int p_n = 0, r_n = 0, f_n = 0;
    for (const auto& m : report.per_class) {
        if (m.precision) {
            p_sum += *m.precision;
            ++p_n;
        }
        if (m.recall) {
            r_sum += *m.recall;
            ++r_n;
        }
        if (m.f1) {
            f_sum += *m.f1;
            ++f_n;
        }
    }
    if (p_n > 0) {
        report.macro.precision = p_sum / p_n;
    }
    if (r_n > 0) {
        report.macro.recall = r_sum / r_n;
    }
    if (f_n > 0) {
        report.macro.f1 = f_sum / f_n;
    }
    report.macro.accuracy =
        static_cast<double>(cm.counts.trace()) / cm.total();
    return report;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') {
        s.pop_back();
    }
    return s;
}

}  // namespace

std::map<std::string, Emotion> read_label_csv(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DecodeError("labels: cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "key,label") {
        throw DecodeError("labels: " + path.string() +
                          " must start with header \"key,label\"");
    }
    std::map<std::string, Emotion> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 2) {
            throw DecodeError("labels: " + path.string() + " line " +
                              std::to_string(line_no) +
                              " does not have 2 fields");
        }
        const auto emotion = emotion_from_name(fields[1]);
        if (!emotion) {
            throw DecodeError("labels: " + path.string() + " line " +
                              std::to_string(line_no) + ": unknown label \"" +
                              fields[1] + "\"");
        }
        if (!out.emplace(fields[0], *emotion).second) {
            throw DecodeError("labels: " + path.string() + " line " +
                              std::to_string(line_no) + ": duplicate key \"" +
                              fields[0] + "\"");
        }
    }
    return out;
}

EvalReport evaluate_pairs(const std::map<std::string, Emotion>& truth,
                          const std::map<std::string, Emotion>& predicted) {
    std::string missing;
    int n_missing = 0;
    auto note_missing = [&](const std::string& key, const char* where) {
        if (n_missing < 8) {
            missing += (missing.empty() ? "" : ", ") + key + " (" + where +
                       ")";
        }
        ++n_missing;
    };
    for (const auto& [key, label] : truth) {
        (void)label;
        if (!predicted.contains(key)) {
            note_missing(key, "missing in predictions");
        }
    }
    for (const auto& [key, label] : predicted) {
        (void)label;
        if (!truth.contains(key)) {
            note_missing(key, "missing in truth");
        }
    }
    if (n_missing > 0) {
        throw AlignmentError("evaluate: " + std::to_string(n_missing) +
                             " mismatched keys: " + missing);
    }
    if (truth.empty()) {
        throw InsufficientDataError("evaluate: no scored pairs");
    }

    std::vector<std::pair<Emotion, Emotion>> pairs;
    pairs.reserve(truth.size());
    for (const auto& [key, label] : truth) {
        pairs.emplace_back(label, predicted.at(key));
    }
    return make_report(confusion(pairs));
}

EvalReport evaluate_run(const std::filesystem::path& truth_csv,
                        const std::filesystem::path& prediction_csv) {
    return evaluate_pairs(read_label_csv(truth_csv),
                          read_label_csv(prediction_csv));
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string report_json(const EvalReport& report) {
    nlohmann::json j;
    nlohmann::json cm = nlohmann::json::array();
    for (int r = 0; r < kNumEmotions; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < kNumEmotions; ++c) {
            row.push_back(report.confusion.counts(r, c));
        }
        cm.push_back(std::move(row));
    }
    j["confusion"] = std::move(cm);

    nlohmann::json classes;
    for (int c = 0; c < kNumEmotions; ++c) {
        const auto& m = report.per_class[static_cast<std::size_t>(c)];
        nlohmann::json mc;
        mc["n_truth"] = m.n_truth;
        mc["n_classified"] = m.n_classified;
        mc["accuracy"] = optional_json(m.accuracy);
        mc["precision"] = optional_json(m.precision);
        mc["recall"] = optional_json(m.recall);
        mc["f1"] = optional_json(m.f1);
        classes[std::string(emotion_name(static_cast<Emotion>(c)))] =
            std::move(mc);
    }
    j["classes"] = std::move(classes);

    nlohmann::json macro;
    macro["precision"] = optional_json(report.macro.precision);
    macro["recall"] = optional_json(report.macro.recall);
    macro["f1"] = optional_json(report.macro.f1);
    macro["accuracy"] = report.macro.accuracy;
    j["macro"] = std::move(macro);
    return j.dump(2);
}

std::string report_csv(const EvalReport& report) {
    std::ostringstream os;
    os << "class,n_truth,n_classified,accuracy,precision,recall,f1\n";
    auto field = [](const std::optional<double>& v) {
        if (!v) {
            return std::string();
        }
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", *v);
        return std::string(buf);
    };
    for (int c = 0; c < kNumEmotions; ++c) {
        const auto& m = report.per_class[static_cast<std::size_t>(c)];
        os << emotion_name(static_cast<Emotion>(c)) << ',' << m.n_truth << ','
           << m.n_classified << ',' << field(m.accuracy) << ','
           << field(m.precision) << ',' << field(m.recall) << ','
           << field(m.f1) << '\n';
    }
    return os.str();
}

std::string audit_json(const std::vector<AuditRow>& rows) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json r;
        r["class"] = std::string(emotion_name(row.emotion));
        r["consistent"] = row.consistent;
        r["recomputed_f1"] = row.recomputed_f1;
        r["delta"] = row.delta;
        j.push_back(std::move(r));
    }
    return j.dump(2);
}

std::vector<PublishedRow> read_published_csv(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DecodeError("audit: cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) ||
        strip_cr(line) != "class,precision,recall,f1") {
        throw DecodeError("audit: " + path.string() +
                          " must start with header "
                          "\"class,precision,recall,f1\"");
    }
    std::vector<PublishedRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 4) {
            throw DecodeError("audit: " + path.string() + " line " +
                              std::to_string(line_no) +
                              " does not have 4 fields");
        }
        const auto emotion = emotion_from_name(fields[0]);
        if (!emotion) {
            throw DecodeError("audit: " + path.string() + " line " +
                              std::to_string(line_no) + ": unknown class \"" +
                              fields[0] + "\"");
        }
        PublishedRow row;
        row.emotion = *emotion;
        try {
            row.precision = std::stod(fields[1]);
            row.recall = std::stod(fields[2]);
            row.f1 = std::stod(fields[3]);
        } catch (const std::exception&) {
            throw DecodeError("audit: " + path.string() + " line " +
                              std::to_string(line_no) +
                              ": non-numeric metric");
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace emofuse::eval
