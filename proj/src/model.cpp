#include "colluscan/model.hpp"

#include "colluscan/error.hpp"
#include "colluscan/io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace colluscan {

std::string to_string(Category category) {
    switch (category) {
    case Category::Standard: return "standard";
    case Category::Code: return "code";
    case Category::Essay: return "essay";
    }
    throw InternalError("unhandled category value");
}

Category category_from_string(const std::string& name) {
    if (name == "standard") return Category::Standard;
    if (name == "code") return Category::Code;
    if (name == "essay") return Category::Essay;
    throw Error("unknown subtask category: " + name);
}

bool SubtaskCatalog::contains(const std::string& subtask_id) const {
    return std::any_of(subtasks.begin(), subtasks.end(),
                       [&](const Entry& e) { return e.id == subtask_id; });
}

std::size_t SubtaskCatalog::index_of(const std::string& subtask_id) const {
    for (std::size_t i = 0; i < subtasks.size(); ++i) {
        if (subtasks[i].id == subtask_id) {
            return i;
        }
    }
    throw Error("unknown subtask id: " + subtask_id);
}

const SubtaskCatalog::Entry& SubtaskCatalog::entry(const std::string& subtask_id) const {
    return subtasks[index_of(subtask_id)];
}

void SubtaskCatalog::validate() const {
    if (subtasks.empty()) {
        throw Error("catalog has no subtasks");
    }
    if (duration_minutes < 1) {
        throw Error("catalog duration_minutes must be >= 1");
    }
    std::set<std::string> seen;
    double sum = 0.0;
    for (const Entry& e : subtasks) {
        if (e.id.empty()) {
            throw Error("catalog contains an empty subtask id");
        }
        if (!seen.insert(e.id).second) {
            throw Error("duplicate subtask id in catalog: " + e.id);
        }
        if (!std::isfinite(e.max_points) || e.max_points < 0.0) {
            throw Error("invalid max_points for subtask " + e.id);
        }
        sum += e.max_points;
    }
    if (std::abs(sum - max_total_points) > 1e-9) {
        throw Error("catalog max_points sum " + format_g17(sum) +
                    " does not equal max_total_points " + format_g17(max_total_points));
    }
}

SubtaskCatalog parse_catalog_json(const std::string& text, const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("catalog " + origin + ": " + e.what());
    }
    SubtaskCatalog catalog;
    try {
        catalog.duration_minutes = doc.at("duration_minutes").get<int>();
        catalog.max_total_points = doc.at("max_total_points").get<double>();
        for (const auto& item : doc.at("subtasks")) {
            SubtaskCatalog::Entry entry;
            entry.id = item.at("id").get<std::string>();
            entry.category = category_from_string(item.at("category").get<std::string>());
            entry.max_points = item.at("max_points").get<double>();
            catalog.subtasks.push_back(std::move(entry));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("catalog " + origin + ": " + e.what());
    }
    catalog.validate();
    return catalog;
}

SubtaskCatalog load_catalog(const std::filesystem::path& path) {
    return parse_catalog_json(read_file(path), path.string());
}

double StudentExam::total_points() const {
    double sum = 0.0;
    for (const auto& [id, pts] : points) {
        sum += pts;
    }
    return sum;
}

double StudentExam::active_minutes() const {
    if (events.empty()) {
        return 0.0;
    }
    const double span = events.back().timestamp_s - events.front().timestamp_s;
    return std::max(span, 0.0) / 60.0;
}

void CohortFilter::validate() const {
    if (!(min_points_fraction >= 0.0 && min_points_fraction <= 1.0)) {
        throw Error("min_points_fraction must lie in [0,1]");
    }
    if (!std::isfinite(min_active_minutes) || min_active_minutes < 0.0) {
        throw Error("min_active_minutes must be a non-negative number");
    }
}

} // namespace colluscan
