#include "colluscan/dissimilarity.hpp"

#include "colluscan/error.hpp"
#include "colluscan/io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

namespace colluscan {

namespace {

double sample_sd(std::span<const double> values) {
    if (values.size() < 2) {
        return 0.0;
    }
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

void check_scheme_against_catalog(const AttributeScheme& scheme, const SubtaskCatalog& catalog) {
    if (scheme.subtask_count() != catalog.size()) {
        throw Error("scheme covers " + std::to_string(scheme.subtask_count()) +
                    " subtasks, catalog has " + std::to_string(catalog.size()));
    }
    if (scheme.denominator <= 0) {
        throw Error("scheme denominator must be positive");
    }
    for (std::size_t j = 0; j < catalog.size(); ++j) {
        if (scheme.weights[j].subtask_id != catalog.subtasks[j].id) {
            throw Error("scheme subtask order mismatch at position " + std::to_string(j) +
                        ": scheme has '" + scheme.weights[j].subtask_id + "', catalog '" +
                        catalog.subtasks[j].id + "'");
        }
        if (scheme.weights[j].event_num < 0 || scheme.weights[j].point_num < 0) {
            throw Error("negative weight for subtask " + scheme.weights[j].subtask_id);
        }
    }
}

} // namespace

std::map<std::string, EventCountVector> bin_events(const StudentExam& exam,
                                                   const SubtaskCatalog& catalog) {
    if (catalog.duration_minutes < 1) {
        throw Error("catalog duration_minutes must be >= 1");
    }
    const std::size_t k = static_cast<std::size_t>(catalog.duration_minutes);
    std::map<std::string, EventCountVector> bins;
    for (const auto& entry : catalog.subtasks) {
        bins[entry.id] = EventCountVector(k, 0);
    }
    for (const SubmissionEvent& event : exam.events) {
        if (!std::isfinite(event.timestamp_s) || event.timestamp_s < 0.0) {
            throw Error("invalid event timestamp for student " + exam.student_id);
        }
        auto it = bins.find(event.subtask_id);
        if (it == bins.end()) {
            throw Error("unknown subtask id: " + event.subtask_id);
        }
        std::size_t idx = static_cast<std::size_t>(event.timestamp_s / 60.0);
        if (idx >= k) {
            idx = k - 1; // grace-period submissions count in the final interval
        }
        ++it->second[idx];
    }
    return bins;
}

double point_dissimilarity(double points_a, double points_b) {
    return std::abs(points_a - points_b);
}

double event_dissimilarity(const EventCountVector& a, const EventCountVector& b) {
    if (a.size() != b.size()) {
        throw Error("event count vectors differ in length: " + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()));
    }
    long sum = 0;
    for (std::size_t m = 0; m < a.size(); ++m) {
        sum += std::labs(static_cast<long>(a[m]) - static_cast<long>(b[m]));
    }
    return static_cast<double>(sum);
}

std::vector<AttributeNormalization>
normalize_attributes(std::vector<std::vector<double>>& per_attribute,
                     NormalizationMode mode,
                     const std::vector<std::string>& attribute_names) {
    if (attribute_names.size() != per_attribute.size()) {
        throw InternalError("attribute name list does not match attribute count");
    }
    std::vector<AttributeNormalization> constants;
    constants.reserve(per_attribute.size());
    for (std::size_t a = 0; a < per_attribute.size(); ++a) {
        AttributeNormalization norm;
        norm.attribute = attribute_names[a];
        std::vector<double>& values = per_attribute[a];
        double divisor = 0.0;
        switch (mode) {
        case NormalizationMode::Range:
            for (double v : values) {
                divisor = std::max(divisor, v);
            }
            break;
        case NormalizationMode::ZScore:
            divisor = sample_sd(values);
            break;
        case NormalizationMode::None:
            divisor = 1.0;
            break;
        }
        if (divisor > 0.0) {
            norm.constant = divisor;
            if (divisor != 1.0) {
                for (double& v : values) {
                    v /= divisor;
                }
            }
        } else {
            // Attribute carries no signal (all pair values equal). Zeroing is a
            // no-op for range mode and drops the constant term for zscore mode.
            norm.degenerate = true;
            std::fill(values.begin(), values.end(), 0.0);
        }
        constants.push_back(std::move(norm));
    }
    return constants;
}

DissimilarityMatrix global_dissimilarity(const std::vector<StudentExam>& cohort,
                                         const SubtaskCatalog& catalog,
                                         const AttributeScheme& scheme) {
    if (cohort.size() < 2) {
        throw Error("dissimilarity needs at least 2 students, got " +
                    std::to_string(cohort.size()));
    }
    catalog.validate();
    check_scheme_against_catalog(scheme, catalog);
    {
        std::set<std::string> seen;
        for (const StudentExam& exam : cohort) {
            if (!seen.insert(exam.student_id).second) {
                throw Error("duplicate student id in cohort: " + exam.student_id);
            }
        }
    }

    const std::size_t n_students = cohort.size();
    const std::size_t n_subtasks = catalog.size();

    // Per-student points and binned counts in catalog order.
    std::vector<std::vector<double>> points(n_students, std::vector<double>(n_subtasks, 0.0));
    std::vector<std::vector<EventCountVector>> counts(n_students);
    std::vector<std::string> ids;
    ids.reserve(n_students);
    for (std::size_t i = 0; i < n_students; ++i) {
        const StudentExam& exam = cohort[i];
        ids.push_back(exam.student_id);
        auto bins = bin_events(exam, catalog);
        counts[i].reserve(n_subtasks);
        for (std::size_t j = 0; j < n_subtasks; ++j) {
            const std::string& sid = catalog.subtasks[j].id;
            counts[i].push_back(std::move(bins.at(sid)));
            const auto it = exam.points.find(sid);
            const double p = (it == exam.points.end()) ? 0.0 : it->second;
            if (!std::isfinite(p)) {
                throw Error("non-finite points for student " + exam.student_id +
                            ", subtask " + sid);
            }
            points[i][j] = p;
        }
        for (const auto& [sid, p] : exam.points) {
            if (!catalog.contains(sid)) {
                throw Error("student " + exam.student_id + " has points for unknown subtask " + sid);
            }
            (void)p;
        }
    }

    // Raw per-attribute pairwise dissimilarities; attribute order is
    // points,events per subtask in catalog order, pairs row-major (i<i').
    const std::size_t n_pairs = n_students * (n_students - 1) / 2;
    std::vector<std::vector<double>> per_attribute(2 * n_subtasks,
                                                   std::vector<double>(n_pairs, 0.0));
    std::vector<std::string> attribute_names(2 * n_subtasks);
    for (std::size_t j = 0; j < n_subtasks; ++j) {
        attribute_names[2 * j] = "points:" + catalog.subtasks[j].id;
        attribute_names[2 * j + 1] = "events:" + catalog.subtasks[j].id;
    }
    std::size_t pair = 0;
    for (std::size_t i = 0; i + 1 < n_students; ++i) {
        for (std::size_t ip = i + 1; ip < n_students; ++ip, ++pair) {
            for (std::size_t j = 0; j < n_subtasks; ++j) {
                per_attribute[2 * j][pair] = point_dissimilarity(points[i][j], points[ip][j]);
                per_attribute[2 * j + 1][pair] = event_dissimilarity(counts[i][j], counts[ip][j]);
            }
        }
    }

    auto constants = normalize_attributes(per_attribute, scheme.normalization, attribute_names);

    const double h = static_cast<double>(scheme.attribute_count());
    DissimilarityMatrix matrix(std::move(ids));
    pair = 0;
    for (std::size_t i = 0; i + 1 < n_students; ++i) {
        for (std::size_t ip = i + 1; ip < n_students; ++ip, ++pair) {
            double sum = 0.0;
            for (std::size_t j = 0; j < n_subtasks; ++j) {
                sum += scheme.point_weight(j) * per_attribute[2 * j][pair];
                sum += scheme.event_weight(j) * per_attribute[2 * j + 1][pair];
            }
            const double d = sum / h;
            if (!std::isfinite(d)) {
                throw Error("non-finite dissimilarity for pair (" + matrix.ids()[i] + ", " +
                            matrix.ids()[ip] + ")");
            }
            matrix.set(i, ip, d);
        }
    }

    matrix.scheme_hash = scheme.hash();
    matrix.normalization_constants = std::move(constants);
    return matrix;
}

std::string matrix_to_csv(const DissimilarityMatrix& matrix) {
    std::string out = "id";
    for (const auto& id : matrix.ids()) {
        out += "," + id;
    }
    out += "\n";
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        out += matrix.ids()[i];
        for (std::size_t j = 0; j < matrix.size(); ++j) {
            out += "," + format_g17(matrix.at(i, j));
        }
        out += "\n";
    }
    return out;
}

std::string matrix_to_json(const DissimilarityMatrix& matrix, const AttributeScheme& scheme) {
    nlohmann::ordered_json doc;
    doc["ids"] = matrix.ids();
    doc["lower_triangle"] = matrix.lower_triangle();

    nlohmann::ordered_json scheme_doc;
    scheme_doc["mode"] = to_string(scheme.mode);
    scheme_doc["normalization"] = to_string(scheme.normalization);
    scheme_doc["denominator"] = scheme.denominator;
    scheme_doc["hash"] = scheme.hash();
    nlohmann::ordered_json weights = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < scheme.subtask_count(); ++j) {
        nlohmann::ordered_json w;
        w["subtask_id"] = scheme.weights[j].subtask_id;
        w["event_num"] = scheme.weights[j].event_num;
        w["point_num"] = scheme.weights[j].point_num;
        w["event_weight"] = scheme.event_weight(j);
        w["point_weight"] = scheme.point_weight(j);
        weights.push_back(std::move(w));
    }
    scheme_doc["weights"] = std::move(weights);
    doc["scheme"] = std::move(scheme_doc);

    nlohmann::ordered_json norms = nlohmann::ordered_json::array();
    for (const AttributeNormalization& n : matrix.normalization_constants) {
        nlohmann::ordered_json entry;
        entry["attribute"] = n.attribute;
        entry["constant"] = n.constant;
        entry["degenerate"] = n.degenerate;
        norms.push_back(std::move(entry));
    }
    doc["normalization_constants"] = std::move(norms);
    return doc.dump(2) + "\n";
}

} // namespace colluscan
