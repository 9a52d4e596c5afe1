#pragma once

#include "colluscan/matrix.hpp"

#include <span>
#include <string>
#include <vector>

namespace colluscan {

struct DistributionSummary {
    std::size_t n_pairs = 0;
    double mean = 0.0;
    double sd = 0.0; // sample convention, n-1 denominator
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    double lower_extreme_bound = 0.0; // q1 - 3*iqr
    double min = 0.0;
    double max = 0.0;
};

// Quantiles use linear interpolation between order statistics: quantile p sits
// at position 1+(n-1)p of the sorted sample. Needs at least 2 values.
DistributionSummary summarize(std::span<const double> values);

// z-scores with the sample sd; throws on zero sd.
std::vector<double> standardize(std::span<const double> values);

struct FlagPair {
    std::string a;
    std::string b;
    double d_raw = 0.0;
    double z = 0.0;
    bool flagged = false;
};

struct FlagReport {
    double bound = 0.0; // Q1 - 3*IQR of the standardized comparison distribution
    bool strict = false;
    DistributionSummary comparison_raw;
    DistributionSummary comparison_standardized;
    DistributionSummary test_raw;
    DistributionSummary test_standardized;
    std::vector<FlagPair> pairs; // test pairs, ascending by z
};

// Standardizes each cohort's upper-triangle distances independently, derives
// the extreme-outlier bound from the proctored comparison cohort only, and
// flags test pairs whose z-score falls below it. Strict mode additionally
// requires flagged pairs to undercut the standardized comparison minimum.
FlagReport flag_pairs(const DissimilarityMatrix& test_matrix,
                      const DissimilarityMatrix& comparison_matrix,
                      bool strict = false);

std::string flag_report_to_json(const FlagReport& report);
FlagReport flag_report_from_json(const std::string& text);

} // namespace colluscan
