#include "colluscan/figures.hpp"

#include "colluscan/dissimilarity.hpp"
#include "colluscan/error.hpp"
#include "colluscan/flagging.hpp"
#include "colluscan/io_util.hpp"
#include "support/reference.hpp"

#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <fstream>

using namespace colluscan;

TEST_CASE("cluster labels run A..Z then AA, AB, ...") {
    CHECK(cluster_label(0) == "A");
    CHECK(cluster_label(1) == "B");
    CHECK(cluster_label(25) == "Z");
    CHECK(cluster_label(26) == "AA");
    CHECK(cluster_label(27) == "AB");
    CHECK(cluster_label(52) == "BA");
    CHECK(cluster_label(701) == "ZZ");
    CHECK(cluster_label(702) == "AAA");
}

TEST_CASE("g17 formatting round-trips doubles exactly") {
    for (const double v : {0.1, 1.0 / 3.0, 0.052631578947368418, 1e-17, 123456.789,
                           0.917662935482247}) {
        const std::string text = format_g17(v);
        double back = 0.0;
        const auto result =
            std::from_chars(text.data(), text.data() + text.size(), back);
        REQUIRE(result.ec == std::errc());
        CHECK(back == v);
    }
    CHECK(format_g17(1.0) == "1");
    CHECK(format_fixed(1.0 / 3.0, 3) == "0.333");
}

TEST_CASE("fnv1a hash is stable across runs") {
    // Reference value for the empty string is the FNV-1a 64-bit offset basis.
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == fnv1a_hex("a"));
    CHECK(fnv1a_hex("a") != fnv1a_hex("b"));
}

TEST_CASE("atomic_write replaces content and leaves no temp file behind") {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "colluscan_test_io";
    std::filesystem::create_directories(dir);
    const std::filesystem::path target = dir / "artifact.json";

    atomic_write(target, "first\n");
    atomic_write(target, "second\n");
    CHECK(read_file(target) == "second\n");
    // Only the target should remain in the directory.
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(dir)) {
        ++entries;
    }
    CHECK(entries == 1);
    std::filesystem::remove_all(dir);
}

namespace {

// Tiny two-cluster cohort so the figures have something to draw.
struct FigureFixture {
    SubtaskCatalog catalog = testsupport::synth_catalog(2, 1, 1);
    std::vector<StudentExam> cohort;
    DissimilarityMatrix matrix{std::vector<std::string>{"a", "b"}};
    Dendrogram tree{std::vector<std::string>{"a", "b"}, {}};

    FigureFixture()
        : cohort([this] {
              testsupport::Rng rng(8);
              return testsupport::synth_cohort(catalog, 6, 1, rng);
          }()),
          matrix(global_dissimilarity(cohort, catalog,
                                      build_scheme(catalog, SchemeMode::Paper))),
          tree(agglomerate(matrix, Linkage::Average)) {}
};

} // namespace

TEST_CASE("dendrogram SVG contains every leaf label and annotation letter") {
    const FigureFixture fix;
    const auto lowest = lowest_clusters(fix.tree, 2);
    const std::string svg = render_dendrogram_svg(fix.tree, lowest);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    for (const std::string& leaf : fix.tree.leaves()) {
        CHECK(svg.find(">" + leaf + "<") != std::string::npos);
    }
    // Two annotated clusters -> letters A and B somewhere in the figure.
    CHECK(svg.find(">A<") != std::string::npos);
    CHECK(svg.find(">B<") != std::string::npos);
    // Axis ticks exist.
    CHECK(svg.find("tick") != std::string::npos);
}

TEST_CASE("cluster panel SVG shows bars and scatter markers per member") {
    const FigureFixture fix;
    ClusterReportEntry entry;
    entry.label = "A";
    entry.node_id = static_cast<int>(fix.cohort.size());
    entry.height = 0.01;
    entry.exams = {fix.cohort[0], fix.cohort[1]};
    const std::string svg = render_cluster_panel_svg(entry, fix.catalog);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find(fix.cohort[0].student_id) != std::string::npos);
    CHECK(svg.find(fix.cohort[1].student_id) != std::string::npos);
    // One bar group per subtask.
    for (const auto& subtask : fix.catalog.subtasks) {
        CHECK(svg.find(">" + subtask.id + "<") != std::string::npos);
    }
    CHECK(svg.find("class=\"bar") != std::string::npos);
    CHECK(svg.find("class=\"mark") != std::string::npos);
}

TEST_CASE("boxplot SVG draws both panels and the outlier bound") {
    testsupport::Rng rng(21);
    const SubtaskCatalog catalog = testsupport::synth_catalog(2, 1, 0);
    const auto test_cohort = testsupport::synth_cohort(catalog, 8, 1, rng, "s");
    const auto comp_cohort = testsupport::synth_cohort(catalog, 8, 0, rng, "c");
    const AttributeScheme scheme = build_scheme(catalog, SchemeMode::Paper);
    const FlagReport report =
        flag_pairs(global_dissimilarity(test_cohort, catalog, scheme),
                   global_dissimilarity(comp_cohort, catalog, scheme), false);

    const std::string svg = render_boxplot_svg(report);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("raw") != std::string::npos);
    CHECK(svg.find("standardized") != std::string::npos);
    CHECK(svg.find("test") != std::string::npos);
    CHECK(svg.find("comparison") != std::string::npos);
    CHECK(svg.find("Q1 - 3 IQR") != std::string::npos);
}

TEST_CASE("figures are deterministic for identical input") {
    const FigureFixture fix;
    const auto lowest = lowest_clusters(fix.tree, 2);
    CHECK(render_dendrogram_svg(fix.tree, lowest) ==
          render_dendrogram_svg(fix.tree, lowest));
}
