#pragma once

#include "colluscan/model.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace colluscan {

enum class EventFormat { Csv, JsonLines };

EventFormat event_format_from_string(const std::string& name);

// Reads submission events from a CSV stream (header
// `student_id,subtask_id,timestamp_s`) or a JSON-lines stream with the same
// keys. Row order is preserved and nothing is deduplicated. Rows that do not
// parse, reference a subtask missing from the catalog, or carry a negative
// timestamp raise Error with the 1-based line number.
std::vector<SubmissionEvent> parse_events(std::istream& source, EventFormat format,
                                          const SubtaskCatalog& catalog);

using ScoreTable = std::map<std::string, std::map<std::string, double>>;

// Reads the wide per-student score CSV (header `student_id,<subtask ids in
// catalog order>`). Blank cells count as 0 points.
ScoreTable parse_scores(std::istream& source, const SubtaskCatalog& catalog);

struct Removal {
    std::string student_id;
    std::string reason; // "excluded" | "short attendance" | "low score"
};

struct CohortAssembly {
    std::vector<StudentExam> exams;    // ordered by student_id
    std::vector<Removal> removals;     // ordered by student_id
};

// Joins events with scores, sorts each student's events by timestamp, fills
// missing subtasks with 0 points and applies the cohort filter. Students seen
// in only one of the two inputs make the join fail with a reconciliation
// error listing the offending ids.
CohortAssembly assemble_cohort(const std::vector<SubmissionEvent>& events,
                               const ScoreTable& scores,
                               const SubtaskCatalog& catalog,
                               const CohortFilter& filter);

} // namespace colluscan
