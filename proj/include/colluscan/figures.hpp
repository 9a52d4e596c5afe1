#pragma once

#include "colluscan/clustering.hpp"
#include "colluscan/flagging.hpp"
#include "colluscan/model.hpp"

#include <string>
#include <vector>

namespace colluscan {

// 0 -> "A", 25 -> "Z", 26 -> "AA", ... (ascending-height annotation order).
std::string cluster_label(std::size_t index);

// One low-dissimilarity cluster bundled with its members' exam data, which is
// everything the per-cluster figure needs.
struct ClusterReportEntry {
    std::string label;
    int node_id = -1;
    double height = 0.0;
    std::vector<StudentExam> exams;
};

// Rectangular dendrogram. Leaves follow recursive left-to-right tree order,
// the y-axis is merge height, and the annotated nodes carry their letters.
std::string render_dendrogram_svg(const Dendrogram& tree,
                                  const std::vector<LowCluster>& annotated);

// Two stacked panels per cluster: grouped per-subtask points bars on top, a
// (clock time, subtask) submission scatter below with one marker shape and
// color per student.
std::string render_cluster_panel_svg(const ClusterReportEntry& cluster,
                                     const SubtaskCatalog& catalog);

// Side-by-side raw and standardized distance boxplots for both cohorts, with
// the extreme-outlier bound drawn on the standardized panel.
std::string render_boxplot_svg(const FlagReport& report);

} // namespace colluscan
