#pragma once

#include "colluscan/model.hpp"

#include <string>
#include <vector>

namespace colluscan {

enum class SchemeMode { Paper, Equal };
enum class NormalizationMode { Range, ZScore, None };

std::string to_string(SchemeMode mode);
std::string to_string(NormalizationMode mode);
SchemeMode scheme_mode_from_string(const std::string& name);
NormalizationMode normalization_mode_from_string(const std::string& name);

// Per-subtask event/point weights, kept as exact rationals over a common
// denominator; doubles are derived on demand and rounding happens only in
// display code.
struct AttributeScheme {
    struct SubtaskWeights {
        std::string subtask_id;
        long event_num = 0; // numerator of the event-pattern weight
        long point_num = 0; // numerator of the points weight
    };

    SchemeMode mode = SchemeMode::Paper;
    NormalizationMode normalization = NormalizationMode::Range;
    long denominator = 1;
    std::vector<SubtaskWeights> weights; // catalog order

    std::size_t subtask_count() const { return weights.size(); }
    std::size_t attribute_count() const { return 2 * weights.size(); } // h
    double event_weight(std::size_t j) const;
    double point_weight(std::size_t j) const;

    // Integer-exact check that all weights are >= 0 and sum to exactly 1.
    void validate() const;

    std::string canonical_string() const;
    std::string hash() const;
};

// mode=paper reconstructs the 4:2:2 (standard:code:essay event weights) : 1
// (every points weight) ratio scheme; mode=equal assigns 1/(2n) to every
// attribute.
AttributeScheme build_scheme(const SubtaskCatalog& catalog, SchemeMode mode,
                             NormalizationMode normalization = NormalizationMode::Range);

} // namespace colluscan
