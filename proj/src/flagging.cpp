#include "colluscan/flagging.hpp"

#include "colluscan/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace colluscan {

namespace {

double interpolated_quantile(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    const double position = static_cast<double>(n - 1) * p; // 0-based
    const std::size_t lo = static_cast<std::size_t>(position);
    const double frac = position - static_cast<double>(lo);
    if (lo + 1 >= n) {
        return sorted.back();
    }
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
};

Moments sample_moments(std::span<const double> values) {
    Moments m;
    for (double v : values) {
        m.mean += v;
    }
    m.mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - m.mean) * (v - m.mean);
    }
    m.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    return m;
}

nlohmann::ordered_json summary_to_json(const DistributionSummary& s) {
    nlohmann::ordered_json doc;
    doc["n_pairs"] = s.n_pairs;
    doc["mean"] = s.mean;
    doc["sd"] = s.sd;
    doc["median"] = s.median;
    doc["q1"] = s.q1;
    doc["q3"] = s.q3;
    doc["iqr"] = s.iqr;
    doc["lower_extreme_bound"] = s.lower_extreme_bound;
    doc["min"] = s.min;
    doc["max"] = s.max;
    return doc;
}

DistributionSummary summary_from_json(const nlohmann::json& doc) {
    DistributionSummary s;
    s.n_pairs = doc.at("n_pairs").get<std::size_t>();
    s.mean = doc.at("mean").get<double>();
    s.sd = doc.at("sd").get<double>();
    s.median = doc.at("median").get<double>();
    s.q1 = doc.at("q1").get<double>();
    s.q3 = doc.at("q3").get<double>();
    s.iqr = doc.at("iqr").get<double>();
    s.lower_extreme_bound = doc.at("lower_extreme_bound").get<double>();
    s.min = doc.at("min").get<double>();
    s.max = doc.at("max").get<double>();
    return s;
}

} // namespace

DistributionSummary summarize(std::span<const double> values) {
    if (values.size() < 2) {
        throw Error("distribution summary needs at least 2 values, got " +
                    std::to_string(values.size()));
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error("distribution summary input contains a non-finite value");
        }
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    DistributionSummary s;
    s.n_pairs = values.size();
    const Moments m = sample_moments(values);
    s.mean = m.mean;
    s.sd = m.sd;
    s.q1 = interpolated_quantile(sorted, 0.25);
    s.median = interpolated_quantile(sorted, 0.5);
    s.q3 = interpolated_quantile(sorted, 0.75);
    s.iqr = s.q3 - s.q1;
    s.lower_extreme_bound = s.q1 - 3.0 * s.iqr;
    s.min = sorted.front();
    s.max = sorted.back();
    return s;
}

std::vector<double> standardize(std::span<const double> values) {
    if (values.size() < 2) {
        throw Error("standardization needs at least 2 values");
    }
    const Moments m = sample_moments(values);
    if (!(m.sd > 0.0)) {
        throw Error("cannot standardize: zero standard deviation");
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        out.push_back((v - m.mean) / m.sd);
    }
    return out;
}

FlagReport flag_pairs(const DissimilarityMatrix& test_matrix,
                      const DissimilarityMatrix& comparison_matrix,
                      bool strict) {
    test_matrix.validate();
    comparison_matrix.validate();
    if (test_matrix.size() < 3 || comparison_matrix.size() < 3) {
        throw Error("flagging needs at least 3 students per cohort");
    }

    const std::vector<double> test_raw = test_matrix.upper_triangle();
    const std::vector<double> comparison_raw = comparison_matrix.upper_triangle();
    const std::vector<double> test_z = standardize(test_raw);
    const std::vector<double> comparison_z = standardize(comparison_raw);

    FlagReport report;
    report.strict = strict;
    report.test_raw = summarize(test_raw);
    report.comparison_raw = summarize(comparison_raw);
    report.test_standardized = summarize(test_z);
    report.comparison_standardized = summarize(comparison_z);
    report.bound = report.comparison_standardized.lower_extreme_bound;

    const double comparison_min = report.comparison_standardized.min;

    const auto& ids = test_matrix.ids();
    std::size_t pair = 0;
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
        for (std::size_t j = i + 1; j < ids.size(); ++j, ++pair) {
            FlagPair entry;
            entry.a = ids[i];
            entry.b = ids[j];
            entry.d_raw = test_raw[pair];
            entry.z = test_z[pair];
            entry.flagged = entry.z < report.bound;
            if (strict && entry.flagged) {
                entry.flagged = entry.z < comparison_min;
            }
            report.pairs.push_back(std::move(entry));
        }
    }
    std::sort(report.pairs.begin(), report.pairs.end(), [](const FlagPair& a, const FlagPair& b) {
        if (a.z != b.z) {
            return a.z < b.z;
        }
        if (a.a != b.a) {
            return a.a < b.a;
        }
        return a.b < b.b;
    });
    return report;
}

std::string flag_report_to_json(const FlagReport& report) {
    nlohmann::ordered_json doc;
    doc["bound"] = report.bound;
    doc["strict"] = report.strict;
    doc["comparison_summary"]["raw"] = summary_to_json(report.comparison_raw);
    doc["comparison_summary"]["standardized"] = summary_to_json(report.comparison_standardized);
    doc["test_summary"]["raw"] = summary_to_json(report.test_raw);
    doc["test_summary"]["standardized"] = summary_to_json(report.test_standardized);
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (const FlagPair& p : report.pairs) {
        nlohmann::ordered_json entry;
        entry["a"] = p.a;
        entry["b"] = p.b;
        entry["d_raw"] = p.d_raw;
        entry["z"] = p.z;
        entry["flagged"] = p.flagged;
        pairs.push_back(std::move(entry));
    }
    doc["pairs"] = std::move(pairs);
    return doc.dump(2) + "\n";
}

FlagReport flag_report_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("flag report JSON: ") + e.what());
    }
    try {
        FlagReport report;
        report.bound = doc.at("bound").get<double>();
        report.strict = doc.at("strict").get<bool>();
        report.comparison_raw = summary_from_json(doc.at("comparison_summary").at("raw"));
        report.comparison_standardized =
            summary_from_json(doc.at("comparison_summary").at("standardized"));
        report.test_raw = summary_from_json(doc.at("test_summary").at("raw"));
        report.test_standardized = summary_from_json(doc.at("test_summary").at("standardized"));
        for (const auto& entry : doc.at("pairs")) {
            FlagPair p;
            p.a = entry.at("a").get<std::string>();
            p.b = entry.at("b").get<std::string>();
            p.d_raw = entry.at("d_raw").get<double>();
            p.z = entry.at("z").get<double>();
            p.flagged = entry.at("flagged").get<bool>();
            report.pairs.push_back(std::move(p));
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("flag report JSON: ") + e.what());
    }
}

} // namespace colluscan
