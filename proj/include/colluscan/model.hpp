#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace colluscan {

enum class Category { Standard, Code, Essay };

std::string to_string(Category category);
Category category_from_string(const std::string& name);

// One timestamped answer submission. Timestamps are seconds relative to the
// cohort's official exam start (shared clock, not per-student).
struct SubmissionEvent {
    std::string student_id;
    std::string subtask_id;
    double timestamp_s = 0.0;
};

struct SubtaskCatalog {
    struct Entry {
        std::string id;
        Category category = Category::Standard;
        double max_points = 0.0;
    };

    std::vector<Entry> subtasks;
    int duration_minutes = 0;      // K
    double max_total_points = 0.0;

    std::size_t size() const { return subtasks.size(); }
    bool contains(const std::string& subtask_id) const;
    // Position in catalog order; throws Error for unknown ids.
    std::size_t index_of(const std::string& subtask_id) const;
    const Entry& entry(const std::string& subtask_id) const;

    // Checks id uniqueness, K >= 1, non-negative per-subtask maxima and that
    // per-subtask maxima sum to max_total_points (1e-9 slack).
    void validate() const;
};

SubtaskCatalog load_catalog(const std::filesystem::path& path);
SubtaskCatalog parse_catalog_json(const std::string& text, const std::string& origin);

// A student's assembled record. `points` holds one entry per catalog subtask
// (missing subtasks are materialized as 0 during assembly).
struct StudentExam {
    std::string student_id;
    std::vector<SubmissionEvent> events; // sorted by timestamp ascending
    std::map<std::string, double> points;

    double total_points() const;
    // (last event - first event) in minutes, floor 0; 0 when there are no events.
    double active_minutes() const;
};

struct CohortFilter {
    double min_active_minutes = 10.0;
    double min_points_fraction = 0.05; // of catalog max_total_points, in [0,1]
    std::set<std::string> excluded_ids;

    void validate() const;
};

} // namespace colluscan
