#include "colluscan/ingest.hpp"

#include "colluscan/error.hpp"

#include <doctest.h>

#include <sstream>
#include <string>

using namespace colluscan;

namespace {

SubtaskCatalog two_subtask_catalog() {
    return parse_catalog_json(R"({
        "duration_minutes": 70,
        "max_total_points": 10,
        "subtasks": [
            {"id": "1.1", "category": "standard", "max_points": 4},
            {"id": "2.1", "category": "code", "max_points": 6}
        ]
    })", "test");
}

std::vector<SubmissionEvent> events_from(const std::string& text, EventFormat format,
                                         const SubtaskCatalog& catalog) {
    std::istringstream in(text);
    return parse_events(in, format, catalog);
}

ScoreTable scores_from(const std::string& text, const SubtaskCatalog& catalog) {
    std::istringstream in(text);
    return parse_scores(in, catalog);
}

} // namespace

TEST_CASE("catalog JSON parses and validates") {
    const SubtaskCatalog catalog = two_subtask_catalog();
    CHECK(catalog.size() == 2);
    CHECK(catalog.duration_minutes == 70);
    CHECK(catalog.subtasks[0].category == Category::Standard);
    CHECK(catalog.subtasks[1].category == Category::Code);
    CHECK(catalog.contains("2.1"));
    CHECK_FALSE(catalog.contains("9.9"));
    CHECK(catalog.index_of("2.1") == 1);
}

TEST_CASE("catalog rejects structural problems") {
    // Duplicate subtask ids.
    CHECK_THROWS_AS(parse_catalog_json(R"({
        "duration_minutes": 70, "max_total_points": 8,
        "subtasks": [
            {"id": "1.1", "category": "standard", "max_points": 4},
            {"id": "1.1", "category": "code", "max_points": 4}
        ]
    })", "dup"), Error);
    // Point sum disagrees with max_total_points.
    CHECK_THROWS_AS(parse_catalog_json(R"({
        "duration_minutes": 70, "max_total_points": 99,
        "subtasks": [{"id": "1.1", "category": "standard", "max_points": 4}]
    })", "sum"), Error);
    // Unknown category.
    CHECK_THROWS_AS(parse_catalog_json(R"({
        "duration_minutes": 70, "max_total_points": 4,
        "subtasks": [{"id": "1.1", "category": "oral", "max_points": 4}]
    })", "cat"), Error);
    // No subtasks at all.
    CHECK_THROWS_AS(parse_catalog_json(R"({
        "duration_minutes": 70, "max_total_points": 0, "subtasks": []
    })", "empty"), Error);
    // Malformed JSON.
    CHECK_THROWS_AS(parse_catalog_json("{", "bad"), Error);
}

TEST_CASE("CSV events parse with header, CRLF and ordering preserved") {
    const SubtaskCatalog catalog = two_subtask_catalog();
    const auto events = events_from(
        "student_id,subtask_id,timestamp_s\r\n"
        "s1,1.1,120\r\n"
        "s1,2.1,60.5\r\n"
        "s2,1.1,0\r\n",
        EventFormat::Csv, catalog);
    REQUIRE(events.size() == 3);
    CHECK(events[0].student_id == "s1");
    CHECK(events[0].subtask_id == "1.1");
    CHECK(events[0].timestamp_s == doctest::Approx(120.0));
    CHECK(events[1].timestamp_s == doctest::Approx(60.5));
    CHECK(events[2].student_id == "s2");
}

TEST_CASE("CSV events report the offending line") {
    const SubtaskCatalog catalog = two_subtask_catalog();
    const std::string header = "student_id,subtask_id,timestamp_s\n";

    CHECK_THROWS_WITH_AS(events_from(header + "s1,1.1,-5\n", EventFormat::Csv, catalog),
                         doctest::Contains("negative timestamp, line 2"), Error);
    CHECK_THROWS_WITH_AS(events_from(header + "s1,bogus,5\n", EventFormat::Csv, catalog),
                         doctest::Contains("unknown subtask id 'bogus', line 2"), Error);
    CHECK_THROWS_WITH_AS(events_from(header + "s1,1.1\n", EventFormat::Csv, catalog),
                         doctest::Contains("line 2"), Error);
    CHECK_THROWS_WITH_AS(events_from(header + "s1,1.1,abc\n", EventFormat::Csv, catalog),
                         doctest::Contains("line 2"), Error);
    CHECK_THROWS_AS(events_from("wrong,header,names\ns1,1.1,5\n", EventFormat::Csv, catalog),
                    Error);
}

TEST_CASE("JSON-lines events parse and validate like CSV") {
    const SubtaskCatalog catalog = two_subtask_catalog();
    const auto events = events_from(
        R"({"student_id":"s1","subtask_id":"1.1","timestamp_s":120})" "\n"
        "\n" // blank lines are skipped
        R"({"student_id":"s2","subtask_id":"2.1","timestamp_s":60.5})" "\n",
        EventFormat::JsonLines, catalog);
    REQUIRE(events.size() == 2);
    CHECK(events[1].timestamp_s == doctest::Approx(60.5));

    CHECK_THROWS_WITH_AS(
        events_from(R"({"student_id":"s1","subtask_id":"zz","timestamp_s":1})" "\n",
                    EventFormat::JsonLines, catalog),
        doctest::Contains("unknown subtask id 'zz', line 1"), Error);
    CHECK_THROWS_AS(events_from("not json\n", EventFormat::JsonLines, catalog), Error);
}

TEST_CASE("scores parse blanks as zero and enforce the catalog column order") {
    const SubtaskCatalog catalog = two_subtask_catalog();
    const ScoreTable scores = scores_from(
        "student_id,1.1,2.1\n"
        "s1,4,6\n"
        "s2,,3.5\n",
        catalog);
    REQUIRE(scores.size() == 2);
    CHECK(scores.at("s1").at("1.1") == doctest::Approx(4.0));
    CHECK(scores.at("s2").at("1.1") == doctest::Approx(0.0));
    CHECK(scores.at("s2").at("2.1") == doctest::Approx(3.5));

    // Columns must list the catalog's subtasks in catalog order.
    CHECK_THROWS_AS(scores_from("student_id,2.1,1.1\ns1,1,1\n", catalog), Error);
    CHECK_THROWS_AS(scores_from("student_id,1.1\ns1,1\n", catalog), Error);
}

TEST_CASE("scores reject out-of-range and duplicate rows") {
    const SubtaskCatalog catalog = two_subtask_catalog();
    CHECK_THROWS_WITH_AS(scores_from("student_id,1.1,2.1\ns1,5,0\n", catalog),
                         doctest::Contains("exceed"), Error);
    CHECK_THROWS_AS(scores_from("student_id,1.1,2.1\ns1,-1,0\n", catalog), Error);
    CHECK_THROWS_AS(scores_from("student_id,1.1,2.1\ns1,1,1\ns1,2,2\n", catalog), Error);
}

TEST_CASE("assemble_cohort joins, sorts and filters") {
    const SubtaskCatalog catalog = two_subtask_catalog();
    // s2 before s1 in the input; events deliberately out of time order.
    const auto events = events_from(
        "student_id,subtask_id,timestamp_s\n"
        "s2,1.1,700\n"
        "s2,2.1,100\n"
        "s1,1.1,60\n"
        "s1,2.1,2400\n"
        "s3,1.1,10\n"   // 4-minute span: removed, short attendance
        "s3,2.1,250\n"
        "s4,1.1,30\n"   // excluded by id
        "s4,2.1,2000\n"
        "s5,1.1,90\n"   // 0.3 of 10 points < 5%: removed, low score
        "s5,2.1,3000\n",
        EventFormat::Csv, catalog);
    const ScoreTable scores = scores_from(
        "student_id,1.1,2.1\n"
        "s1,4,6\n"
        "s2,2,3\n"
        "s3,4,4\n"
        "s4,4,4\n"
        "s5,0.3,\n",
        catalog);
    CohortFilter filter;
    filter.excluded_ids = {"s4"};

    const CohortAssembly assembly = assemble_cohort(events, scores, catalog, filter);
    REQUIRE(assembly.exams.size() == 2);
    CHECK(assembly.exams[0].student_id == "s1");
    CHECK(assembly.exams[1].student_id == "s2");
    // Events are time-sorted per student after assembly.
    CHECK(assembly.exams[1].events[0].timestamp_s == doctest::Approx(100.0));
    CHECK(assembly.exams[1].events[1].timestamp_s == doctest::Approx(700.0));

    REQUIRE(assembly.removals.size() == 3);
    CHECK(assembly.removals[0].student_id == "s3");
    CHECK(assembly.removals[0].reason == "short attendance");
    CHECK(assembly.removals[1].student_id == "s4");
    CHECK(assembly.removals[1].reason == "excluded");
    CHECK(assembly.removals[2].student_id == "s5");
    CHECK(assembly.removals[2].reason == "low score");
}

TEST_CASE("exclusion wins over the other removal reasons") {
    const SubtaskCatalog catalog = two_subtask_catalog();
    // s1 is both excluded and under the attendance threshold.
    const auto events = events_from(
        "student_id,subtask_id,timestamp_s\ns1,1.1,10\ns2,1.1,0\ns2,2.1,4000\n",
        EventFormat::Csv, catalog);
    const ScoreTable scores = scores_from("student_id,1.1,2.1\ns1,4,4\ns2,4,4\n", catalog);
    CohortFilter filter;
    filter.excluded_ids = {"s1"};
    const CohortAssembly assembly = assemble_cohort(events, scores, catalog, filter);
    REQUIRE(assembly.removals.size() == 1);
    CHECK(assembly.removals[0].reason == "excluded");
}

TEST_CASE("students present in only one input fail reconciliation") {
    const SubtaskCatalog catalog = two_subtask_catalog();
    const auto events = events_from(
        "student_id,subtask_id,timestamp_s\ns1,1.1,0\ns1,2.1,4000\n",
        EventFormat::Csv, catalog);
    // s1 has events but no score row.
    CHECK_THROWS_WITH_AS(
        assemble_cohort(events, scores_from("student_id,1.1,2.1\ns2,1,1\n", catalog),
                        catalog, CohortFilter{}),
        doctest::Contains("s1"), Error);
}

TEST_CASE("reconciliation fails in both directions") {
    const SubtaskCatalog catalog = two_subtask_catalog();
    const auto events = events_from(
        "student_id,subtask_id,timestamp_s\ns1,1.1,0\ns1,2.1,4000\n",
        EventFormat::Csv, catalog);
    // s2 has a score row but no events: just as much of a join failure as the
    // reverse, since both inputs are supposed to describe the same sitting.
    const ScoreTable scores =
        scores_from("student_id,1.1,2.1\ns1,4,4\ns2,4,4\n", catalog);
    CHECK_THROWS_WITH_AS(assemble_cohort(events, scores, catalog, CohortFilter{}),
                         doctest::Contains("s2"), Error);
}

TEST_CASE("event format names parse") {
    CHECK(event_format_from_string("csv") == EventFormat::Csv);
    CHECK(event_format_from_string("jsonl") == EventFormat::JsonLines);
    CHECK(event_format_from_string("json-lines") == EventFormat::JsonLines);
    CHECK_THROWS_AS(event_format_from_string("xml"), Error);
}
