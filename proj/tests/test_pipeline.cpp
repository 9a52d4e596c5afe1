#include "colluscan/pipeline.hpp"

#include "colluscan/error.hpp"
#include "colluscan/io_util.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace colluscan;
namespace fs = std::filesystem;

namespace {

fs::path fixture_dir() { return fs::path(COLLUSCAN_FIXTURE_DIR); }
fs::path toy_config() { return fixture_dir() / "toy" / "config.json"; }

// Fresh scratch directory per test case; removed on destruction.
struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name)
        : dir(fs::temp_directory_path() / ("colluscan_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
};

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        files[entry.path().filename().string()] = read_file(entry.path());
    }
    return files;
}

} // namespace

TEST_CASE("run config resolves paths relative to the config file") {
    const RunConfig config = load_run_config(toy_config());
    CHECK(config.test.present());
    CHECK(config.comparison.present());
    CHECK(fs::exists(config.test.events));
    CHECK(fs::exists(config.comparison.catalog));
    CHECK(config.k_lowest == 3);
    CHECK(config.scheme_mode == SchemeMode::Paper);
    CHECK(config.normalization == NormalizationMode::Range);
    CHECK_FALSE(config.linkage_override.has_value()); // "auto"
    CHECK(config.filter.excluded_ids.count("s10") == 1);
    CHECK(config.out_dir.filename() == "out");
}

TEST_CASE("run config rejects missing or malformed files") {
    CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), Error);
    Scratch scratch("badcfg");
    const fs::path bad = scratch.dir / "config.json";
    atomic_write(bad, "{ not json");
    CHECK_THROWS_AS(load_run_config(bad), Error);
    atomic_write(bad, R"({"k_lowest": 0})");
    CHECK_THROWS_AS(load_run_config(bad), Error);
}

TEST_CASE("overrides replace config values") {
    RunConfig config = load_run_config(toy_config());
    ConfigOverrides overrides;
    overrides.scheme = "equal";
    overrides.normalize = "none";
    overrides.linkage = "single";
    overrides.k_lowest = 5;
    overrides.figures = false;
    overrides.out_dir = "/tmp/elsewhere";
    apply_overrides(config, overrides);
    CHECK(config.scheme_mode == SchemeMode::Equal);
    CHECK(config.normalization == NormalizationMode::None);
    CHECK(config.linkage_override == Linkage::Single);
    CHECK(config.k_lowest == 5);
    CHECK_FALSE(config.figures);
    CHECK(config.out_dir == "/tmp/elsewhere");

    ConfigOverrides back_to_auto;
    back_to_auto.linkage = "auto";
    apply_overrides(config, back_to_auto);
    CHECK_FALSE(config.linkage_override.has_value());

    ConfigOverrides bad;
    bad.k_lowest = 0;
    CHECK_THROWS_AS(apply_overrides(config, bad), Error);
}

TEST_CASE("analyze writes the full artifact set and excludes filtered students") {
    Scratch scratch("analyze");
    RunConfig config = load_run_config(toy_config());
    config.out_dir = scratch.dir;
    std::ostringstream out;
    std::ostringstream err;
    REQUIRE(cmd_analyze(config, out, err) == 0);
    CHECK(err.str().empty());
    CHECK(out.str().find("8 students retained, 3 removed") != std::string::npos);

    for (const char* name :
         {"removals.json", "matrix.csv", "matrix.json", "dendrogram.newick",
          "dendrogram.json", "linkage_selection.json", "lowest_clusters.json",
          "dendrogram.svg"}) {
        CAPTURE(name);
        CHECK(fs::exists(scratch.dir / name));
    }

    const auto matrix = nlohmann::json::parse(read_file(scratch.dir / "matrix.json"));
    CHECK(matrix.at("ids").size() == 8);
    for (const auto& id : matrix.at("ids")) {
        CHECK(id.get<std::string>() != "s09");
        CHECK(id.get<std::string>() != "s10");
        CHECK(id.get<std::string>() != "s11");
    }
    // 8 students -> 28 strictly-lower-triangle entries.
    CHECK(matrix.at("lower_triangle").size() == 28);

    const auto removals = nlohmann::json::parse(read_file(scratch.dir / "removals.json"));
    REQUIRE(removals.at("removed").size() == 3);
    CHECK(removals.at("removed")[0].at("student_id") == "s09");
    CHECK(removals.at("removed")[0].at("reason") == "short attendance");
    CHECK(removals.at("removed")[1].at("reason") == "excluded");
    CHECK(removals.at("removed")[2].at("reason") == "low score");

    // The toy cohort's planted pair is the lowest cluster.
    const auto clusters =
        nlohmann::json::parse(read_file(scratch.dir / "lowest_clusters.json"));
    CHECK(clusters.at("clusters")[0].at("members") ==
          nlohmann::json::array({"s01", "s02"}));
    CHECK(fs::exists(scratch.dir /
                     ("cluster_" +
                      clusters.at("clusters")[0].at("label").get<std::string>() +
                      ".svg")));
}

TEST_CASE("analyze honors a linkage override and clamps k to the node count") {
    Scratch scratch("override");
    RunConfig config = load_run_config(toy_config());
    config.out_dir = scratch.dir;
    config.linkage_override = Linkage::Single;
    config.k_lowest = 50;
    config.figures = false;
    std::ostringstream out;
    std::ostringstream err;
    REQUIRE(cmd_analyze(config, out, err) == 0);

    const auto selection =
        nlohmann::json::parse(read_file(scratch.dir / "linkage_selection.json"));
    CHECK(selection.at("chosen") == "single");
    CHECK(selection.at("override") == true);
    // The correlations are still reported for transparency.
    CHECK(selection.at("c_values").at("average").is_number());

    const auto clusters =
        nlohmann::json::parse(read_file(scratch.dir / "lowest_clusters.json"));
    CHECK(clusters.at("k_requested") == 50);
    CHECK(clusters.at("k_effective") == 7); // N-1 internal nodes
    CHECK(clusters.at("clusters").size() == 7);
    CHECK_FALSE(fs::exists(scratch.dir / "dendrogram.svg"));
}

TEST_CASE("flag finds the planted pair and nothing else in the toy fixture") {
    Scratch scratch("flag");
    RunConfig config = load_run_config(toy_config());
    config.out_dir = scratch.dir;
    std::ostringstream out;
    std::ostringstream err;
    REQUIRE(cmd_flag(config, out, err) == 0);
    CHECK(out.str().find("s01 ~ s02") != std::string::npos);

    const auto report =
        nlohmann::json::parse(read_file(scratch.dir / "flag_report.json"));
    int flagged = 0;
    for (const auto& pair : report.at("pairs")) {
        if (pair.at("flagged").get<bool>()) {
            ++flagged;
            CHECK(pair.at("a") == "s01");
            CHECK(pair.at("b") == "s02");
        }
    }
    CHECK(flagged == 1);
    CHECK(fs::exists(scratch.dir / "boxplot.svg"));
}

TEST_CASE("render rebuilds byte-identical figures from the JSON artifacts alone") {
    Scratch scratch("render");
    RunConfig config = load_run_config(toy_config());
    config.out_dir = scratch.dir;
    std::ostringstream out;
    std::ostringstream err;
    REQUIRE(cmd_analyze(config, out, err) == 0);
    REQUIRE(cmd_flag(config, out, err) == 0);

    const auto before = snapshot(scratch.dir);
    // Wipe the figures, keep the JSON.
    for (const auto& [name, content] : before) {
        if (name.ends_with(".svg")) {
            fs::remove(scratch.dir / name);
        }
    }
    REQUIRE(cmd_render(config, out, err) == 0);
    const auto after = snapshot(scratch.dir);
    REQUIRE(after.size() == before.size());
    for (const auto& [name, content] : before) {
        CAPTURE(name);
        REQUIRE(after.count(name) == 1);
        CHECK(after.at(name) == content);
    }
}

TEST_CASE("render with nothing to do is an input error") {
    Scratch scratch("render_empty");
    RunConfig config = load_run_config(toy_config());
    config.out_dir = scratch.dir; // exists but holds no artifacts
    std::ostringstream out;
    std::ostringstream err;
    CHECK(cmd_render(config, out, err) == 1);
    CHECK(err.str().find("no renderable artifacts") != std::string::npos);
}

TEST_CASE("missing input files exit with code 1 and a useful message") {
    Scratch scratch("missing");
    RunConfig config = load_run_config(toy_config());
    config.out_dir = scratch.dir;
    config.test.events = scratch.dir / "absent.csv";
    std::ostringstream out;
    std::ostringstream err;
    CHECK(cmd_analyze(config, out, err) == 1);
    CHECK(err.str().find("absent.csv") != std::string::npos);
}

TEST_CASE("a two-student cohort skips linkage selection but still analyzes") {
    Scratch scratch("pair");
    // Minimal self-contained fixture: one subtask, two students.
    atomic_write(scratch.dir / "catalog.json", R"({
        "duration_minutes": 30, "max_total_points": 5,
        "subtasks": [{"id": "q1", "category": "standard", "max_points": 5}]
    })");
    atomic_write(scratch.dir / "events.csv",
                 "student_id,subtask_id,timestamp_s\n"
                 "a,q1,60\na,q1,1500\nb,q1,300\nb,q1,1200\n");
    atomic_write(scratch.dir / "scores.csv", "student_id,q1\na,5\nb,3\n");
    atomic_write(scratch.dir / "config.json", R"({
        "test": {"events": "events.csv", "scores": "scores.csv",
                 "catalog": "catalog.json"},
        "k_lowest": 4, "out": "artifacts"
    })");

    RunConfig config = load_run_config(scratch.dir / "config.json");
    std::ostringstream out;
    std::ostringstream err;
    REQUIRE(cmd_analyze(config, out, err) == 0);

    // Cophenetic correlation needs 3+ students; with 2 the c-values are null
    // and average linkage is used by default.
    const auto selection = nlohmann::json::parse(
        read_file(scratch.dir / "artifacts" / "linkage_selection.json"));
    CHECK(selection.at("c_values").is_null());
    CHECK(selection.at("chosen") == "average");
    const auto clusters = nlohmann::json::parse(
        read_file(scratch.dir / "artifacts" / "lowest_clusters.json"));
    CHECK(clusters.at("k_effective") == 1); // a single root node
    CHECK(fs::exists(scratch.dir / "artifacts" / "dendrogram.svg"));
}

TEST_CASE("two analyze runs produce byte-identical artifacts") {
    Scratch first("det1");
    Scratch second("det2");
    RunConfig config = load_run_config(toy_config());
    std::ostringstream out;
    std::ostringstream err;
    config.out_dir = first.dir;
    REQUIRE(cmd_analyze(config, out, err) == 0);
    config.out_dir = second.dir;
    REQUIRE(cmd_analyze(config, out, err) == 0);
    const auto a = snapshot(first.dir);
    const auto b = snapshot(second.dir);
    REQUIRE(a.size() == b.size());
    for (const auto& [name, content] : a) {
        CAPTURE(name);
        CHECK(b.at(name) == content);
    }
}
