#include "colluscan/pipeline.hpp"

#include "colluscan/dissimilarity.hpp"
#include "colluscan/error.hpp"
#include "colluscan/figures.hpp"
#include "colluscan/flagging.hpp"
#include "colluscan/io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

namespace colluscan {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    const std::filesystem::path p(value);
    return p.is_absolute() ? p : base / p;
}

void require_file(const std::filesystem::path& path, const std::string& role) {
    if (path.empty()) {
        throw Error(role + " path is not configured");
    }
    if (!std::filesystem::exists(path)) {
        throw Error(role + " file does not exist: " + path.string());
    }
}

struct LoadedCohort {
    SubtaskCatalog catalog;
    CohortAssembly assembly;
};

LoadedCohort load_cohort(const CohortPaths& paths, EventFormat format,
                         const CohortFilter& filter, const std::string& role) {
    require_file(paths.catalog, role + " catalog");
    require_file(paths.events, role + " events");
    require_file(paths.scores, role + " scores");

    LoadedCohort cohort;
    cohort.catalog = load_catalog(paths.catalog);
    std::ifstream events_in(paths.events, std::ios::binary);
    if (!events_in) {
        throw Error("cannot open " + role + " events file: " + paths.events.string());
    }
    std::vector<SubmissionEvent> events;
    try {
        events = parse_events(events_in, format, cohort.catalog);
    } catch (const Error& e) {
        throw Error(paths.events.string() + ": " + e.what());
    }
    std::ifstream scores_in(paths.scores, std::ios::binary);
    if (!scores_in) {
        throw Error("cannot open " + role + " scores file: " + paths.scores.string());
    }
    ScoreTable scores;
    try {
        scores = parse_scores(scores_in, cohort.catalog);
    } catch (const Error& e) {
        throw Error(paths.scores.string() + ": " + e.what());
    }
    cohort.assembly = assemble_cohort(events, scores, cohort.catalog, filter);
    return cohort;
}

nlohmann::ordered_json catalog_to_json(const SubtaskCatalog& catalog) {
    nlohmann::ordered_json doc;
    doc["duration_minutes"] = catalog.duration_minutes;
    doc["max_total_points"] = catalog.max_total_points;
    nlohmann::ordered_json subtasks = nlohmann::ordered_json::array();
    for (const auto& entry : catalog.subtasks) {
        nlohmann::ordered_json e;
        e["id"] = entry.id;
        e["category"] = to_string(entry.category);
        e["max_points"] = entry.max_points;
        subtasks.push_back(std::move(e));
    }
    doc["subtasks"] = std::move(subtasks);
    return doc;
}

nlohmann::ordered_json exam_to_json(const StudentExam& exam, const SubtaskCatalog& catalog) {
    nlohmann::ordered_json doc;
    doc["student_id"] = exam.student_id;
    nlohmann::ordered_json events = nlohmann::ordered_json::array();
    for (const SubmissionEvent& event : exam.events) {
        nlohmann::ordered_json e;
        e["subtask_id"] = event.subtask_id;
        e["timestamp_s"] = event.timestamp_s;
        events.push_back(std::move(e));
    }
    doc["events"] = std::move(events);
    nlohmann::ordered_json points; // catalog order keeps serialization stable
    for (const auto& entry : catalog.subtasks) {
        const auto it = exam.points.find(entry.id);
        points[entry.id] = it == exam.points.end() ? 0.0 : it->second;
    }
    doc["points"] = std::move(points);
    return doc;
}

StudentExam exam_from_json(const nlohmann::json& doc) {
    StudentExam exam;
    exam.student_id = doc.at("student_id").get<std::string>();
    for (const auto& e : doc.at("events")) {
        SubmissionEvent event;
        event.student_id = exam.student_id;
        event.subtask_id = e.at("subtask_id").get<std::string>();
        event.timestamp_s = e.at("timestamp_s").get<double>();
        exam.events.push_back(std::move(event));
    }
    for (const auto& [key, value] : doc.at("points").items()) {
        exam.points[key] = value.get<double>();
    }
    return exam;
}

struct ClusterReport {
    std::string linkage;
    int k_requested = 0;
    SubtaskCatalog catalog;
    std::vector<ClusterReportEntry> clusters;
};

std::string cluster_report_to_json(const ClusterReport& report) {
    nlohmann::ordered_json doc;
    doc["linkage"] = report.linkage;
    doc["k_requested"] = report.k_requested;
    doc["k_effective"] = report.clusters.size();
    doc["catalog"] = catalog_to_json(report.catalog);
    nlohmann::ordered_json clusters = nlohmann::ordered_json::array();
    for (const ClusterReportEntry& cluster : report.clusters) {
        nlohmann::ordered_json c;
        c["label"] = cluster.label;
        c["node_id"] = cluster.node_id;
        c["height"] = cluster.height;
        nlohmann::ordered_json members = nlohmann::ordered_json::array();
        nlohmann::ordered_json exams = nlohmann::ordered_json::array();
        for (const StudentExam& exam : cluster.exams) {
            members.push_back(exam.student_id);
            exams.push_back(exam_to_json(exam, report.catalog));
        }
        c["members"] = std::move(members);
        c["exams"] = std::move(exams);
        clusters.push_back(std::move(c));
    }
    doc["clusters"] = std::move(clusters);
    return doc.dump(2) + "\n";
}

ClusterReport cluster_report_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("cluster report JSON: ") + e.what());
    }
    try {
        ClusterReport report;
        report.linkage = doc.at("linkage").get<std::string>();
        report.k_requested = doc.at("k_requested").get<int>();
        report.catalog = parse_catalog_json(doc.at("catalog").dump(), "embedded");
        for (const auto& c : doc.at("clusters")) {
            ClusterReportEntry entry;
            entry.label = c.at("label").get<std::string>();
            entry.node_id = c.at("node_id").get<int>();
            entry.height = c.at("height").get<double>();
            for (const auto& e : c.at("exams")) {
                entry.exams.push_back(exam_from_json(e));
            }
            report.clusters.push_back(std::move(entry));
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("cluster report JSON: ") + e.what());
    }
}

std::vector<LowCluster> annotations_from_report(const ClusterReport& report) {
    std::vector<LowCluster> out;
    for (const ClusterReportEntry& cluster : report.clusters) {
        LowCluster low;
        low.node_id = cluster.node_id;
        low.height = cluster.height;
        for (const StudentExam& exam : cluster.exams) {
            low.member_ids.push_back(exam.student_id);
        }
        out.push_back(std::move(low));
    }
    return out;
}

void write_artifact(const std::filesystem::path& out_dir, const std::string& name,
                    const std::string& content) {
    atomic_write(out_dir / name, content);
}

template <typename Fn>
int run_command(std::ostream& err, Fn&& fn) {
    try {
        fn();
        return 0;
    } catch (const InternalError& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
}

void print_weight_table(std::ostream& out, const SubtaskCatalog& catalog,
                        const AttributeScheme& scheme) {
    out << "weights (" << to_string(scheme.mode) << " scheme, denominator "
        << scheme.denominator << "):\n";
    out << "  subtask    category  events  points\n";
    for (std::size_t j = 0; j < scheme.subtask_count(); ++j) {
        const auto& entry = catalog.subtasks[j];
        out << "  " << entry.id;
        for (std::size_t pad = entry.id.size(); pad < 11; ++pad) {
            out << ' ';
        }
        const std::string cat = to_string(entry.category);
        out << cat;
        for (std::size_t pad = cat.size(); pad < 10; ++pad) {
            out << ' ';
        }
        out << format_fixed(scheme.event_weight(j), 3) << "   "
            << format_fixed(scheme.point_weight(j), 3) << "\n";
    }
}

} // namespace

RunConfig load_run_config(const std::filesystem::path& config_path) {
    require_file(config_path, "config");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(config_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("config " + config_path.string() + ": " + e.what());
    }

    const std::filesystem::path base = config_path.parent_path();
    RunConfig config;
    try {
        auto read_cohort = [&](const char* key, CohortPaths& paths) {
            if (!doc.contains(key)) {
                return;
            }
            const auto& c = doc.at(key);
            paths.events = resolve(base, c.at("events").get<std::string>());
            paths.scores = resolve(base, c.at("scores").get<std::string>());
            paths.catalog = resolve(base, c.at("catalog").get<std::string>());
        };
        read_cohort("test", config.test);
        read_cohort("comparison", config.comparison);
        if (doc.contains("events_format")) {
            config.events_format =
                event_format_from_string(doc.at("events_format").get<std::string>());
        }
        if (doc.contains("scheme")) {
            config.scheme_mode = scheme_mode_from_string(doc.at("scheme").get<std::string>());
        }
        if (doc.contains("normalize")) {
            config.normalization =
                normalization_mode_from_string(doc.at("normalize").get<std::string>());
        }
        if (doc.contains("linkage")) {
            const std::string value = doc.at("linkage").get<std::string>();
            if (value != "auto") {
                config.linkage_override = linkage_from_string(value);
            }
        }
        if (doc.contains("k_lowest")) {
            config.k_lowest = doc.at("k_lowest").get<int>();
        }
        if (doc.contains("figures")) {
            config.figures = doc.at("figures").get<bool>();
        }
        if (doc.contains("strict")) {
            config.strict_flagging = doc.at("strict").get<bool>();
        }
        if (doc.contains("out")) {
            config.out_dir = resolve(base, doc.at("out").get<std::string>());
        } else {
            config.out_dir = base / "out";
        }
        if (doc.contains("filter")) {
            const auto& f = doc.at("filter");
            if (f.contains("min_active_minutes")) {
                config.filter.min_active_minutes = f.at("min_active_minutes").get<double>();
            }
            if (f.contains("min_points_fraction")) {
                config.filter.min_points_fraction = f.at("min_points_fraction").get<double>();
            }
            if (f.contains("excluded_ids")) {
                for (const auto& id : f.at("excluded_ids")) {
                    config.filter.excluded_ids.insert(id.get<std::string>());
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("config " + config_path.string() + ": " + e.what());
    }
    if (config.k_lowest < 1) {
        throw Error("k_lowest must be >= 1");
    }
    config.filter.validate();
    return config;
}

void apply_overrides(RunConfig& config, const ConfigOverrides& overrides) {
    if (overrides.scheme) {
        config.scheme_mode = scheme_mode_from_string(*overrides.scheme);
    }
    if (overrides.normalize) {
        config.normalization = normalization_mode_from_string(*overrides.normalize);
    }
    if (overrides.linkage) {
        if (*overrides.linkage == "auto") {
            config.linkage_override.reset();
        } else {
            config.linkage_override = linkage_from_string(*overrides.linkage);
        }
    }
    if (overrides.k_lowest) {
        if (*overrides.k_lowest < 1) {
            throw Error("k_lowest must be >= 1");
        }
        config.k_lowest = *overrides.k_lowest;
    }
    if (overrides.figures) {
        config.figures = *overrides.figures;
    }
    if (overrides.strict) {
        config.strict_flagging = *overrides.strict;
    }
    if (overrides.out_dir) {
        config.out_dir = *overrides.out_dir;
    }
}

int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return run_command(err, [&] {
        if (!config.test.present()) {
            throw Error("analyze requires a test cohort in the config");
        }
        const LoadedCohort cohort =
            load_cohort(config.test, config.events_format, config.filter, "test");
        const auto& exams = cohort.assembly.exams;
        if (exams.size() < 2) {
            throw Error("test cohort has " + std::to_string(exams.size()) +
                        " students after filtering; need at least 2");
        }

        const AttributeScheme scheme =
            build_scheme(cohort.catalog, config.scheme_mode, config.normalization);
        const DissimilarityMatrix matrix =
            global_dissimilarity(exams, cohort.catalog, scheme);

        std::optional<LinkageSelection> selection;
        if (matrix.size() >= 3) {
            selection = select_linkage(matrix);
        }
        const Linkage chosen = config.linkage_override
                                   ? *config.linkage_override
                                   : (selection ? selection->chosen : Linkage::Average);
        const Dendrogram tree = agglomerate(matrix, chosen);

        const int k_effective =
            std::min(config.k_lowest, static_cast<int>(tree.nodes().size()));
        const std::vector<LowCluster> lowest = lowest_clusters(tree, k_effective);

        ClusterReport cluster_report;
        cluster_report.linkage = to_string(chosen);
        cluster_report.k_requested = config.k_lowest;
        cluster_report.catalog = cohort.catalog;
        for (std::size_t c = 0; c < lowest.size(); ++c) {
            ClusterReportEntry entry;
            entry.label = cluster_label(c);
            entry.node_id = lowest[c].node_id;
            entry.height = lowest[c].height;
            for (const std::string& id : lowest[c].member_ids) {
                const auto it = std::find_if(
                    exams.begin(), exams.end(),
                    [&](const StudentExam& e) { return e.student_id == id; });
                if (it == exams.end()) {
                    throw InternalError("cluster member missing from cohort: " + id);
                }
                entry.exams.push_back(*it);
            }
            cluster_report.clusters.push_back(std::move(entry));
        }

        nlohmann::ordered_json removals;
        removals["removed"] = nlohmann::ordered_json::array();
        for (const Removal& removal : cohort.assembly.removals) {
            nlohmann::ordered_json r;
            r["student_id"] = removal.student_id;
            r["reason"] = removal.reason;
            removals["removed"].push_back(std::move(r));
        }
        removals["retained"] = matrix.ids();

        nlohmann::ordered_json selection_doc;
        selection_doc["chosen"] = to_string(chosen);
        selection_doc["override"] = config.linkage_override.has_value();
        if (selection) {
            nlohmann::ordered_json c_values;
            c_values["single"] = selection->c_of(Linkage::Single);
            c_values["complete"] = selection->c_of(Linkage::Complete);
            c_values["average"] = selection->c_of(Linkage::Average);
            selection_doc["c_values"] = std::move(c_values);
        } else {
            selection_doc["c_values"] = nullptr;
            selection_doc["note"] = "cophenetic correlation undefined for fewer than 3 students";
        }

        std::filesystem::create_directories(config.out_dir);
        write_artifact(config.out_dir, "removals.json", removals.dump(2) + "\n");
        write_artifact(config.out_dir, "matrix.csv", matrix_to_csv(matrix));
        write_artifact(config.out_dir, "matrix.json", matrix_to_json(matrix, scheme));
        write_artifact(config.out_dir, "dendrogram.newick", dendrogram_to_newick(tree));
        write_artifact(config.out_dir, "dendrogram.json", dendrogram_to_json(tree));
        write_artifact(config.out_dir, "linkage_selection.json",
                       selection_doc.dump(2) + "\n");
        write_artifact(config.out_dir, "lowest_clusters.json",
                       cluster_report_to_json(cluster_report));
        if (config.figures) {
            write_artifact(config.out_dir, "dendrogram.svg",
                           render_dendrogram_svg(tree, lowest));
            for (const ClusterReportEntry& cluster : cluster_report.clusters) {
                write_artifact(config.out_dir, "cluster_" + cluster.label + ".svg",
                               render_cluster_panel_svg(cluster, cohort.catalog));
            }
        }

        out << "cohort: " << exams.size() << " students retained, "
            << cohort.assembly.removals.size() << " removed\n";
        print_weight_table(out, cohort.catalog, scheme);
        if (selection) {
            out << "cophenetic correlation: single "
                << format_fixed(selection->c_of(Linkage::Single), 4) << ", complete "
                << format_fixed(selection->c_of(Linkage::Complete), 4) << ", average "
                << format_fixed(selection->c_of(Linkage::Average), 4) << "\n";
        }
        out << "linkage: " << to_string(chosen)
            << (config.linkage_override ? " (override)" : " (auto)") << "\n";
        out << "lowest clusters (k=" << k_effective << "):\n";
        for (const ClusterReportEntry& cluster : cluster_report.clusters) {
            out << "  " << cluster.label << "  height "
                << format_fixed(cluster.height, 3) << "  members:";
            for (const StudentExam& exam : cluster.exams) {
                out << " " << exam.student_id;
            }
            out << "\n";
        }
        out << "artifacts written to " << config.out_dir.string() << "\n";
    });
}

int cmd_flag(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return run_command(err, [&] {
        if (!config.test.present()) {
            throw Error("flag requires a test cohort in the config");
        }
        if (!config.comparison.present()) {
            throw Error("flag requires a comparison cohort in the config");
        }
        const LoadedCohort test =
            load_cohort(config.test, config.events_format, config.filter, "test");
        const LoadedCohort comparison =
            load_cohort(config.comparison, config.events_format, config.filter, "comparison");
        if (test.assembly.exams.size() < 3 || comparison.assembly.exams.size() < 3) {
            throw Error("flagging needs at least 3 students per cohort after filtering");
        }

        const AttributeScheme test_scheme =
            build_scheme(test.catalog, config.scheme_mode, config.normalization);
        const AttributeScheme comparison_scheme =
            build_scheme(comparison.catalog, config.scheme_mode, config.normalization);
        const DissimilarityMatrix test_matrix =
            global_dissimilarity(test.assembly.exams, test.catalog, test_scheme);
        const DissimilarityMatrix comparison_matrix = global_dissimilarity(
            comparison.assembly.exams, comparison.catalog, comparison_scheme);

        const FlagReport report =
            flag_pairs(test_matrix, comparison_matrix, config.strict_flagging);

        std::filesystem::create_directories(config.out_dir);
        write_artifact(config.out_dir, "flag_report.json", flag_report_to_json(report));
        if (config.figures) {
            write_artifact(config.out_dir, "boxplot.svg", render_boxplot_svg(report));
        }

        std::size_t flagged = 0;
        for (const FlagPair& pair : report.pairs) {
            flagged += pair.flagged ? 1 : 0;
        }
        out << "bound (standardized comparison Q1 - 3*IQR): "
            << format_fixed(report.bound, 3) << "\n";
        out << "flagged " << flagged << " of " << report.pairs.size() << " test pairs\n";
        for (const FlagPair& pair : report.pairs) {
            if (!pair.flagged) {
                continue;
            }
            out << "  " << pair.a << " ~ " << pair.b << "  z " << format_fixed(pair.z, 3)
                << "  d " << format_fixed(pair.d_raw, 6) << "\n";
        }
        out << "artifacts written to " << config.out_dir.string() << "\n";
    });
}

int cmd_render(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return run_command(err, [&] {
        const std::filesystem::path dir = config.out_dir;
        if (!std::filesystem::exists(dir)) {
            throw Error("artifact directory does not exist: " + dir.string());
        }
        bool rendered = false;

        const std::filesystem::path dendro_path = dir / "dendrogram.json";
        const std::filesystem::path clusters_path = dir / "lowest_clusters.json";
        if (std::filesystem::exists(dendro_path)) {
            const Dendrogram tree = dendrogram_from_json(read_file(dendro_path));
            std::vector<LowCluster> annotated;
            if (std::filesystem::exists(clusters_path)) {
                const ClusterReport report = cluster_report_from_json(read_file(clusters_path));
                annotated = annotations_from_report(report);
                for (const ClusterReportEntry& cluster : report.clusters) {
                    write_artifact(dir, "cluster_" + cluster.label + ".svg",
                                   render_cluster_panel_svg(cluster, report.catalog));
                }
            }
            write_artifact(dir, "dendrogram.svg", render_dendrogram_svg(tree, annotated));
            rendered = true;
        }

        const std::filesystem::path flag_path = dir / "flag_report.json";
        if (std::filesystem::exists(flag_path)) {
            const FlagReport report = flag_report_from_json(read_file(flag_path));
            write_artifact(dir, "boxplot.svg", render_boxplot_svg(report));
            rendered = true;
        }

        if (!rendered) {
            throw Error("no renderable artifacts (dendrogram.json or flag_report.json) in " +
                        dir.string());
        }
        out << "figures rendered into " << dir.string() << "\n";
    });
}

} // namespace colluscan
