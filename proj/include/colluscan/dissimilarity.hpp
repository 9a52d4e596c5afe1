#pragma once

#include "colluscan/matrix.hpp"
#include "colluscan/model.hpp"
#include "colluscan/scheme.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace colluscan {

// Per-minute submission counts for one subtask; length equals the catalog's
// exam duration K.
using EventCountVector = std::vector<int>;

// Interval m covers [(m-1)*60, m*60) seconds, half-open; events at or beyond
// K*60 seconds (grace-period submissions) land in the final interval.
std::map<std::string, EventCountVector> bin_events(const StudentExam& exam,
                                                   const SubtaskCatalog& catalog);

// |s_ij - s_i'j|
double point_dissimilarity(double points_a, double points_b);

// Manhattan distance over the minute bins.
double event_dissimilarity(const EventCountVector& a, const EventCountVector& b);

// Rescales each attribute's pairwise values in place. Range mode divides by
// the attribute's maximum observed pairwise value, zscore by its sample
// standard deviation over all pairs; attributes whose divisor is zero carry
// no pairwise signal, are marked degenerate and contribute zero.
std::vector<AttributeNormalization>
normalize_attributes(std::vector<std::vector<double>>& per_attribute,
                     NormalizationMode mode,
                     const std::vector<std::string>& attribute_names);

// The full pipeline: bins every student's events, computes per-attribute raw
// dissimilarities over all pairs, normalizes them, and combines them into
// D(i,i') = (1/h) * sum_j [ w_j^P * d~_j^P + w_j^L * d~_j^L ].
//
// h counts attributes (2 per subtask). The 1/h prefactor is a uniform
// positive scale on top of weights that already sum to one; it is kept for
// numeric comparability and cannot change any ordering downstream.
//
// Per-pair accumulation runs in fixed catalog order, so results are
// bit-identical regardless of how pairs are scheduled.
DissimilarityMatrix global_dissimilarity(const std::vector<StudentExam>& cohort,
                                         const SubtaskCatalog& catalog,
                                         const AttributeScheme& scheme);

// matrix.csv: labeled header row and one labeled row per student.
std::string matrix_to_csv(const DissimilarityMatrix& matrix);

// matrix.json: {ids, lower_triangle, scheme, normalization_constants}.
std::string matrix_to_json(const DissimilarityMatrix& matrix, const AttributeScheme& scheme);

} // namespace colluscan
