#include "colluscan/scheme.hpp"

#include "colluscan/error.hpp"
#include "colluscan/io_util.hpp"

namespace colluscan {

std::string to_string(SchemeMode mode) {
    return mode == SchemeMode::Paper ? "paper" : "equal";
}

std::string to_string(NormalizationMode mode) {
    switch (mode) {
    case NormalizationMode::Range: return "range";
    case NormalizationMode::ZScore: return "zscore";
    case NormalizationMode::None: return "none";
    }
    throw InternalError("unhandled normalization mode");
}

SchemeMode scheme_mode_from_string(const std::string& name) {
    if (name == "paper") return SchemeMode::Paper;
    if (name == "equal") return SchemeMode::Equal;
    throw Error("unknown scheme mode: " + name);
}

NormalizationMode normalization_mode_from_string(const std::string& name) {
    if (name == "range") return NormalizationMode::Range;
    if (name == "zscore") return NormalizationMode::ZScore;
    if (name == "none") return NormalizationMode::None;
    throw Error("unknown normalization mode: " + name);
}

double AttributeScheme::event_weight(std::size_t j) const {
    return static_cast<double>(weights[j].event_num) / static_cast<double>(denominator);
}

double AttributeScheme::point_weight(std::size_t j) const {
    return static_cast<double>(weights[j].point_num) / static_cast<double>(denominator);
}

void AttributeScheme::validate() const {
    if (weights.empty()) {
        throw Error("attribute scheme is empty");
    }
    if (denominator <= 0) {
        throw Error("attribute scheme denominator must be positive");
    }
    long sum = 0;
    for (const SubtaskWeights& w : weights) {
        if (w.event_num < 0 || w.point_num < 0) {
            throw Error("negative attribute weight for subtask " + w.subtask_id);
        }
        sum += w.event_num + w.point_num;
    }
    if (sum != denominator) {
        throw Error("attribute weights sum to " + std::to_string(sum) + "/" +
                    std::to_string(denominator) + ", expected 1");
    }
}

std::string AttributeScheme::canonical_string() const {
    std::string out = "mode=" + to_string(mode) + ";norm=" + to_string(normalization) +
                      ";den=" + std::to_string(denominator);
    for (const SubtaskWeights& w : weights) {
        out += ";" + w.subtask_id + ":" + std::to_string(w.event_num) + ":" +
               std::to_string(w.point_num);
    }
    return out;
}

std::string AttributeScheme::hash() const {
    return fnv1a_hex(canonical_string());
}

AttributeScheme build_scheme(const SubtaskCatalog& catalog, SchemeMode mode,
                             NormalizationMode normalization) {
    if (catalog.subtasks.empty()) {
        throw Error("cannot build an attribute scheme from an empty catalog");
    }
    AttributeScheme scheme;
    scheme.mode = mode;
    scheme.normalization = normalization;

    if (mode == SchemeMode::Equal) {
        scheme.denominator = static_cast<long>(2 * catalog.subtasks.size());
        for (const auto& entry : catalog.subtasks) {
            scheme.weights.push_back({entry.id, 1, 1});
        }
    } else {
        long total = 0;
        for (const auto& entry : catalog.subtasks) {
            long event_ratio = 0;
            switch (entry.category) {
            case Category::Standard: event_ratio = 4; break;
            case Category::Code: event_ratio = 2; break;
            case Category::Essay: event_ratio = 2; break;
            }
            scheme.weights.push_back({entry.id, event_ratio, 1});
            total += event_ratio + 1;
        }
        scheme.denominator = total;
    }
    scheme.validate();
    return scheme;
}

} // namespace colluscan
