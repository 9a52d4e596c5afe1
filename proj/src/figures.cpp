#include "colluscan/figures.hpp"

#include "colluscan/error.hpp"
#include "colluscan/io_util.hpp"
#include "colluscan/svg.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace colluscan {

namespace {

const char* kPalette[6] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

std::string palette_css(const std::string& prefix) {
    std::string css;
    for (int i = 0; i < 6; ++i) {
        css += "." + prefix + std::to_string(i) + "{fill:" + kPalette[i] + ";}";
    }
    return css;
}

// Shape cycles with the student index inside the cluster.
void draw_marker(SvgWriter& svg, double x, double y, std::size_t series) {
    const std::string cls = "mark m" + std::to_string(series % 6);
    switch (series % 6) {
    case 0:
        svg.circle(x, y, 3.0, cls);
        break;
    case 1:
        svg.rect(x - 3.0, y - 3.0, 6.0, 6.0, cls);
        break;
    case 2:
        svg.path("M" + SvgWriter::coord(x) + "," + SvgWriter::coord(y - 4) + " L" +
                     SvgWriter::coord(x + 4) + "," + SvgWriter::coord(y) + " L" +
                     SvgWriter::coord(x) + "," + SvgWriter::coord(y + 4) + " L" +
                     SvgWriter::coord(x - 4) + "," + SvgWriter::coord(y) + " Z",
                 cls);
        break;
    case 3:
        svg.path("M" + SvgWriter::coord(x) + "," + SvgWriter::coord(y - 4) + " L" +
                     SvgWriter::coord(x + 3.5) + "," + SvgWriter::coord(y + 3) + " L" +
                     SvgWriter::coord(x - 3.5) + "," + SvgWriter::coord(y + 3) + " Z",
                 cls);
        break;
    case 4:
        svg.path("M" + SvgWriter::coord(x) + "," + SvgWriter::coord(y + 4) + " L" +
                     SvgWriter::coord(x + 3.5) + "," + SvgWriter::coord(y - 3) + " L" +
                     SvgWriter::coord(x - 3.5) + "," + SvgWriter::coord(y - 3) + " Z",
                 cls);
        break;
    default:
        svg.path("M" + SvgWriter::coord(x - 3.5) + "," + SvgWriter::coord(y) + " H" +
                     SvgWriter::coord(x + 3.5) + " M" + SvgWriter::coord(x) + "," +
                     SvgWriter::coord(y - 3.5) + " V" + SvgWriter::coord(y + 3.5),
                 cls);
        break;
    }
}

} // namespace

std::string cluster_label(std::size_t index) {
    std::string label;
    std::size_t value = index;
    while (true) {
        label.insert(label.begin(), static_cast<char>('A' + value % 26));
        if (value < 26) {
            break;
        }
        value = value / 26 - 1;
    }
    return label;
}

std::string render_dendrogram_svg(const Dendrogram& tree,
                                  const std::vector<LowCluster>& annotated) {
    const std::size_t n = tree.leaf_count();
    const double leaf_spacing = 14.0;
    const double margin_left = 56.0;
    const double margin_right = 16.0;
    const double top = 24.0;
    const double bottom = 72.0;
    const double width = margin_left + static_cast<double>(n) * leaf_spacing + margin_right;
    const double height = 460.0;
    const double plot_bottom = height - bottom;

    const double h_max = tree.nodes().back().height;
    const double h_scale = h_max > 0.0 ? (plot_bottom - top) / h_max : 1.0;
    auto y_of = [&](double h) { return plot_bottom - h * h_scale; };

    // Leaf x positions in recursive left-to-right order.
    std::vector<double> x_pos(n + tree.nodes().size(), 0.0);
    std::size_t next_slot = 0;
    auto place = [&](auto&& self, int node_id) -> double {
        if (node_id < static_cast<int>(n)) {
            const double x =
                margin_left + (static_cast<double>(next_slot) + 0.5) * leaf_spacing;
            ++next_slot;
            x_pos[static_cast<std::size_t>(node_id)] = x;
            return x;
        }
        const DendrogramNode& node = tree.node(node_id);
        const double xl = self(self, node.left);
        const double xr = self(self, node.right);
        const double x = (xl + xr) / 2.0;
        x_pos[static_cast<std::size_t>(node_id)] = x;
        return x;
    };
    place(place, tree.root_id());

    SvgWriter svg(width, height);
    svg.style(".link{stroke:#333;stroke-width:1;fill:none;}"
              ".axis{stroke:#000;stroke-width:1;}"
              ".tick{font:10px sans-serif;}"
              ".leaf{font:9px sans-serif;}"
              ".anno{font:bold 12px sans-serif;fill:#d62728;}");

    // y axis with 5 intervals
    svg.line(margin_left - 8.0, top, margin_left - 8.0, plot_bottom, "axis");
    for (int i = 0; i <= 5; ++i) {
        const double h = h_max * static_cast<double>(i) / 5.0;
        const double y = y_of(h);
        svg.line(margin_left - 12.0, y, margin_left - 8.0, y, "axis");
        svg.text(margin_left - 14.0, y + 3.0, format_sig(h, 3), "tick", "end");
    }

    for (std::size_t k = 0; k < tree.nodes().size(); ++k) {
        const DendrogramNode& node = tree.nodes()[k];
        const int id = static_cast<int>(n + k);
        const double y = y_of(node.height);
        const double xl = x_pos[static_cast<std::size_t>(node.left)];
        const double xr = x_pos[static_cast<std::size_t>(node.right)];
        svg.line(xl, y_of(tree.height_of(node.left)), xl, y, "link");
        svg.line(xr, y_of(tree.height_of(node.right)), xr, y, "link");
        svg.line(xl, y, xr, y, "link");
        (void)id;
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double x = x_pos[i];
        svg.text(x, plot_bottom + 10.0, tree.leaves()[i], "leaf", "end",
                 "rotate(-60 " + SvgWriter::coord(x) + " " + SvgWriter::coord(plot_bottom + 10.0) +
                     ")");
    }

    for (std::size_t a = 0; a < annotated.size(); ++a) {
        const LowCluster& cluster = annotated[a];
        const double x = x_pos[static_cast<std::size_t>(cluster.node_id)];
        const double y = y_of(cluster.height);
        svg.text(x, y - 5.0, cluster_label(a), "anno", "middle");
    }

    return svg.finish();
}

std::string render_cluster_panel_svg(const ClusterReportEntry& cluster,
                                     const SubtaskCatalog& catalog) {
    if (cluster.exams.empty()) {
        throw Error("cluster " + cluster.label + " has no exam data");
    }
    const std::size_t n_sub = catalog.size();
    const std::size_t n_students = cluster.exams.size();
    const double width = 680.0;
    const double height = 520.0;
    const double left = 70.0;
    const double right = width - 24.0;
    const double bars_top = 56.0;
    const double bars_bottom = 216.0;
    const double scatter_top = 264.0;
    const double scatter_bottom = 464.0;

    double max_points = 0.0;
    for (const auto& entry : catalog.subtasks) {
        max_points = std::max(max_points, entry.max_points);
    }
    if (max_points <= 0.0) {
        max_points = 1.0;
    }
    const double minutes = static_cast<double>(catalog.duration_minutes);

    const double slot_w = (right - left) / static_cast<double>(n_sub);
    auto slot_x = [&](std::size_t j) { return left + (static_cast<double>(j) + 0.5) * slot_w; };
    auto bar_y = [&](double pts) {
        return bars_bottom - (pts / max_points) * (bars_bottom - bars_top);
    };
    auto time_x = [&](double t_s) {
        const double m = std::min(t_s / 60.0, minutes);
        return left + (m / minutes) * (right - left);
    };
    auto scatter_y = [&](std::size_t j) {
        return scatter_bottom -
               (static_cast<double>(j) + 0.5) * (scatter_bottom - scatter_top) /
                   static_cast<double>(n_sub);
    };

    SvgWriter svg(width, height);
    svg.style(".axis{stroke:#000;stroke-width:1;}"
              ".grid{stroke:#ddd;stroke-width:0.5;}"
              ".tick{font:10px sans-serif;}"
              ".title{font:bold 13px sans-serif;}"
              ".label{font:11px sans-serif;}"
              ".mark{stroke:none;}" +
              palette_css("m") + palette_css("b"));

    svg.text(width / 2.0, 22.0, "Cluster " + cluster.label + "  (height " +
                                    format_sig(cluster.height, 4) + ")",
             "title", "middle");

    // legend: one marker + id per student
    double legend_x = left;
    for (std::size_t s = 0; s < n_students; ++s) {
        draw_marker(svg, legend_x, 38.0, s);
        svg.text(legend_x + 8.0, 42.0, cluster.exams[s].student_id, "label");
        legend_x += 16.0 + 9.0 * static_cast<double>(cluster.exams[s].student_id.size()) + 16.0;
    }

    // upper panel: grouped points bars per subtask
    svg.line(left, bars_bottom, right, bars_bottom, "axis");
    svg.line(left, bars_top, left, bars_bottom, "axis");
    for (int i = 0; i <= 4; ++i) {
        const double pts = max_points * static_cast<double>(i) / 4.0;
        svg.text(left - 6.0, bar_y(pts) + 3.0, format_sig(pts, 3), "tick", "end");
        svg.line(left - 4.0, bar_y(pts), left, bar_y(pts), "axis");
    }
    const double group_w = slot_w * 0.7;
    const double bar_w = group_w / static_cast<double>(n_students);
    for (std::size_t j = 0; j < n_sub; ++j) {
        const std::string& sid = catalog.subtasks[j].id;
        for (std::size_t s = 0; s < n_students; ++s) {
            const auto it = cluster.exams[s].points.find(sid);
            const double pts = it == cluster.exams[s].points.end() ? 0.0 : it->second;
            const double x = slot_x(j) - group_w / 2.0 + static_cast<double>(s) * bar_w;
            svg.rect(x, bar_y(pts), bar_w, bars_bottom - bar_y(pts),
                     "bar b" + std::to_string(s % 6));
        }
        svg.text(slot_x(j), bars_bottom + 12.0, sid, "tick", "middle");
    }

    // lower panel: submissions against clock time
    svg.line(left, scatter_bottom, right, scatter_bottom, "axis");
    svg.line(left, scatter_top, left, scatter_bottom, "axis");
    for (int i = 0; i <= 7; ++i) {
        const double m = minutes * static_cast<double>(i) / 7.0;
        const double x = left + (m / minutes) * (right - left);
        svg.line(x, scatter_bottom, x, scatter_bottom + 4.0, "axis");
        svg.text(x, scatter_bottom + 16.0, format_sig(m, 3), "tick", "middle");
    }
    svg.text((left + right) / 2.0, height - 18.0, "clock time [min]", "label", "middle");
    for (std::size_t j = 0; j < n_sub; ++j) {
        svg.line(left, scatter_y(j), right, scatter_y(j), "grid");
        svg.text(left - 6.0, scatter_y(j) + 3.0, catalog.subtasks[j].id, "tick", "end");
    }
    for (std::size_t s = 0; s < n_students; ++s) {
        for (const SubmissionEvent& event : cluster.exams[s].events) {
            const std::size_t j = catalog.index_of(event.subtask_id);
            draw_marker(svg, time_x(event.timestamp_s), scatter_y(j), s);
        }
    }

    return svg.finish();
}

namespace {

struct BoxScale {
    double lo = 0.0;
    double hi = 1.0;
    double top = 0.0;
    double bottom = 0.0;
    double y(double v) const {
        if (hi == lo) {
            return (top + bottom) / 2.0;
        }
        return bottom - (v - lo) / (hi - lo) * (bottom - top);
    }
};

void draw_box(SvgWriter& svg, const BoxScale& scale, double center_x,
              const DistributionSummary& s, const std::string& label) {
    const double half = 26.0;
    const double lo_whisk = std::max(s.min, s.q1 - 1.5 * s.iqr);
    const double hi_whisk = std::min(s.max, s.q3 + 1.5 * s.iqr);
    svg.line(center_x, scale.y(lo_whisk), center_x, scale.y(s.q1), "whisk");
    svg.line(center_x, scale.y(s.q3), center_x, scale.y(hi_whisk), "whisk");
    svg.line(center_x - half / 2.0, scale.y(lo_whisk), center_x + half / 2.0, scale.y(lo_whisk),
             "whisk");
    svg.line(center_x - half / 2.0, scale.y(hi_whisk), center_x + half / 2.0, scale.y(hi_whisk),
             "whisk");
    svg.rect(center_x - half, scale.y(s.q3), 2.0 * half, scale.y(s.q1) - scale.y(s.q3), "box");
    svg.line(center_x - half, scale.y(s.median), center_x + half, scale.y(s.median), "median");
    svg.text(center_x, scale.bottom + 16.0, label, "tick", "middle");
}

void draw_axis(SvgWriter& svg, const BoxScale& scale, double x) {
    svg.line(x, scale.top, x, scale.bottom, "axis");
    for (int i = 0; i <= 5; ++i) {
        const double v = scale.lo + (scale.hi - scale.lo) * static_cast<double>(i) / 5.0;
        const double y = scale.y(v);
        svg.line(x - 4.0, y, x, y, "axis");
        svg.text(x - 6.0, y + 3.0, format_sig(v, 3), "tick", "end");
    }
}

} // namespace

std::string render_boxplot_svg(const FlagReport& report) {
    const double width = 620.0;
    const double height = 420.0;
    const double top = 48.0;
    const double bottom = height - 48.0;

    SvgWriter svg(width, height);
    svg.style(".axis{stroke:#000;stroke-width:1;}"
              ".box{fill:#c6dbef;stroke:#333;stroke-width:1;}"
              ".whisk{stroke:#333;stroke-width:1;}"
              ".median{stroke:#08306b;stroke-width:2;}"
              ".bound{stroke:#d62728;stroke-width:1.5;stroke-dasharray:5 3;}"
              ".tick{font:10px sans-serif;}"
              ".title{font:bold 12px sans-serif;}"
              ".label{font:11px sans-serif;fill:#d62728;}");

    // raw panel
    {
        BoxScale scale;
        scale.lo = std::min(report.comparison_raw.min, report.test_raw.min);
        scale.hi = std::max(report.comparison_raw.max, report.test_raw.max);
        const double pad = (scale.hi - scale.lo) * 0.06 + 1e-12;
        scale.lo -= pad;
        scale.hi += pad;
        scale.top = top;
        scale.bottom = bottom;
        const double axis_x = 66.0;
        draw_axis(svg, scale, axis_x);
        svg.text(170.0, 26.0, "raw distances", "title", "middle");
        draw_box(svg, scale, 130.0, report.comparison_raw, "comparison");
        draw_box(svg, scale, 230.0, report.test_raw, "test");
    }

    // standardized panel with the extreme-outlier bound
    {
        BoxScale scale;
        scale.lo = std::min({report.comparison_standardized.min, report.test_standardized.min,
                             report.bound});
        scale.hi = std::max(report.comparison_standardized.max, report.test_standardized.max);
        const double pad = (scale.hi - scale.lo) * 0.06 + 1e-12;
        scale.lo -= pad;
        scale.hi += pad;
        scale.top = top;
        scale.bottom = bottom;
        const double axis_x = 356.0;
        draw_axis(svg, scale, axis_x);
        svg.text(460.0, 26.0, "standardized distances", "title", "middle");
        draw_box(svg, scale, 420.0, report.comparison_standardized, "comparison");
        draw_box(svg, scale, 520.0, report.test_standardized, "test");
        const double by = scale.y(report.bound);
        svg.line(axis_x, by, width - 24.0, by, "bound");
        svg.text(width - 24.0, by - 5.0, "Q1 - 3 IQR", "label", "end");
    }

    return svg.finish();
}

} // namespace colluscan
