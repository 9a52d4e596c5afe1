#include "colluscan/ingest.hpp"

#include "colluscan/error.hpp"
#include "colluscan/io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

namespace colluscan {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(current);
    return fields;
}

// Strips a trailing '\r' so CRLF files parse like LF files.
bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) {
        return false;
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return true;
}

[[noreturn]] void fail_line(const std::string& what, std::size_t line_no) {
    throw Error(what + ", line " + std::to_string(line_no));
}

void check_event(SubmissionEvent& event, const SubtaskCatalog& catalog, std::size_t line_no) {
    if (event.student_id.empty()) {
        fail_line("empty student_id", line_no);
    }
    if (!std::isfinite(event.timestamp_s)) {
        fail_line("non-finite timestamp", line_no);
    }
    if (event.timestamp_s < 0.0) {
        fail_line("negative timestamp", line_no);
    }
    if (!catalog.contains(event.subtask_id)) {
        fail_line("unknown subtask id '" + event.subtask_id + "'", line_no);
    }
}

std::vector<SubmissionEvent> parse_events_csv(std::istream& source, const SubtaskCatalog& catalog) {
    std::string line;
    if (!read_line(source, line)) {
        throw Error("events CSV is empty, expected header student_id,subtask_id,timestamp_s");
    }
    if (line != "student_id,subtask_id,timestamp_s") {
        throw Error("events CSV header mismatch, expected student_id,subtask_id,timestamp_s "
                    "but found '" + line + "'");
    }
    std::vector<SubmissionEvent> events;
    std::size_t line_no = 1;
    while (read_line(source, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) {
            fail_line("expected 3 fields, found " + std::to_string(fields.size()), line_no);
        }
        SubmissionEvent event;
        event.student_id = fields[0];
        event.subtask_id = fields[1];
        const auto ts = parse_double(fields[2]);
        if (!ts) {
            fail_line("unparseable timestamp '" + fields[2] + "'", line_no);
        }
        event.timestamp_s = *ts;
        check_event(event, catalog, line_no);
        events.push_back(std::move(event));
    }
    return events;
}

std::vector<SubmissionEvent> parse_events_jsonl(std::istream& source, const SubtaskCatalog& catalog) {
    std::vector<SubmissionEvent> events;
    std::string line;
    std::size_t line_no = 0;
    while (read_line(source, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            fail_line("unparseable JSON object", line_no);
        }
        SubmissionEvent event;
        try {
            event.student_id = doc.at("student_id").get<std::string>();
            event.subtask_id = doc.at("subtask_id").get<std::string>();
            event.timestamp_s = doc.at("timestamp_s").get<double>();
        } catch (const nlohmann::json::exception&) {
            fail_line("missing or mistyped key (student_id, subtask_id, timestamp_s)", line_no);
        }
        check_event(event, catalog, line_no);
        events.push_back(std::move(event));
    }
    return events;
}

std::string join_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) {
            out += ", ";
        }
        out += id;
    }
    return out;
}

} // namespace

EventFormat event_format_from_string(const std::string& name) {
    if (name == "csv") return EventFormat::Csv;
    if (name == "jsonl" || name == "json-lines") return EventFormat::JsonLines;
    throw Error("unknown events format: " + name);
}

std::vector<SubmissionEvent> parse_events(std::istream& source, EventFormat format,
                                          const SubtaskCatalog& catalog) {
    switch (format) {
    case EventFormat::Csv: return parse_events_csv(source, catalog);
    case EventFormat::JsonLines: return parse_events_jsonl(source, catalog);
    }
    throw InternalError("unhandled event format");
}

ScoreTable parse_scores(std::istream& source, const SubtaskCatalog& catalog) {
    std::string line;
    if (!read_line(source, line)) {
        throw Error("scores CSV is empty");
    }
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "student_id") {
        throw Error("scores CSV must start with a student_id column");
    }
    if (header.size() != catalog.size() + 1) {
        throw Error("scores CSV has " + std::to_string(header.size() - 1) +
                    " subtask columns, catalog has " + std::to_string(catalog.size()));
    }
    for (std::size_t j = 0; j < catalog.size(); ++j) {
        if (header[j + 1] != catalog.subtasks[j].id) {
            throw Error("scores CSV column " + std::to_string(j + 2) + " is '" + header[j + 1] +
                        "', expected catalog subtask '" + catalog.subtasks[j].id + "'");
        }
    }

    ScoreTable table;
    std::size_t line_no = 1;
    while (read_line(source, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            fail_line("expected " + std::to_string(header.size()) + " fields, found " +
                          std::to_string(fields.size()),
                      line_no);
        }
        const std::string& student_id = fields[0];
        if (student_id.empty()) {
            fail_line("empty student_id", line_no);
        }
        if (table.count(student_id) != 0) {
            fail_line("duplicate student row '" + student_id + "'", line_no);
        }
        std::map<std::string, double> row;
        for (std::size_t j = 0; j < catalog.size(); ++j) {
            const std::string& cell = fields[j + 1];
            double points = 0.0;
            if (!cell.empty()) {
                const auto parsed = parse_double(cell);
                if (!parsed || !std::isfinite(*parsed)) {
                    fail_line("unparseable points '" + cell + "' for subtask " +
                                  catalog.subtasks[j].id,
                              line_no);
                }
                points = *parsed;
            }
            if (points < 0.0) {
                fail_line("negative points for subtask " + catalog.subtasks[j].id, line_no);
            }
            if (points > catalog.subtasks[j].max_points + 1e-9) {
                fail_line("points exceed maximum for subtask " + catalog.subtasks[j].id + " (" +
                              format_g17(points) + " > " +
                              format_g17(catalog.subtasks[j].max_points) + ")",
                          line_no);
            }
            row[catalog.subtasks[j].id] = points;
        }
        table[student_id] = std::move(row);
    }
    return table;
}

CohortAssembly assemble_cohort(const std::vector<SubmissionEvent>& events,
                               const ScoreTable& scores,
                               const SubtaskCatalog& catalog,
                               const CohortFilter& filter) {
    catalog.validate();
    filter.validate();

    std::map<std::string, std::vector<SubmissionEvent>> by_student;
    for (const SubmissionEvent& event : events) {
        by_student[event.student_id].push_back(event);
    }

    std::vector<std::string> only_events;
    std::vector<std::string> only_scores;
    for (const auto& [id, evs] : by_student) {
        if (scores.count(id) == 0) {
            only_events.push_back(id);
        }
    }
    for (const auto& [id, row] : scores) {
        if (by_student.count(id) == 0) {
            only_scores.push_back(id);
        }
    }
    if (!only_events.empty() || !only_scores.empty()) {
        std::string msg = "cohort reconciliation failed:";
        if (!only_events.empty()) {
            msg += " students with events but no scores: [" + join_ids(only_events) + "]";
        }
        if (!only_scores.empty()) {
            msg += " students with scores but no events: [" + join_ids(only_scores) + "]";
        }
        throw Error(msg);
    }

    const double min_total = filter.min_points_fraction * catalog.max_total_points;

    CohortAssembly assembly;
    for (const auto& [id, row] : scores) {
        StudentExam exam;
        exam.student_id = id;
        exam.events = by_student.at(id);
        std::stable_sort(exam.events.begin(), exam.events.end(),
                         [](const SubmissionEvent& a, const SubmissionEvent& b) {
                             return a.timestamp_s < b.timestamp_s;
                         });
        for (const auto& entry : catalog.subtasks) {
            const auto it = row.find(entry.id);
            exam.points[entry.id] = (it == row.end()) ? 0.0 : it->second;
        }
        for (const auto& [sid, pts] : row) {
            if (!catalog.contains(sid)) {
                throw Error("score table references unknown subtask id: " + sid);
            }
            (void)pts;
        }

        if (filter.excluded_ids.count(id) != 0) {
            assembly.removals.push_back({id, "excluded"});
        } else if (exam.active_minutes() < filter.min_active_minutes) {
            assembly.removals.push_back({id, "short attendance"});
        } else if (exam.total_points() < min_total) {
            assembly.removals.push_back({id, "low score"});
        } else {
            assembly.exams.push_back(std::move(exam));
        }
    }
    return assembly;
}

} // namespace colluscan
