#pragma once

#include "colluscan/clustering.hpp"
#include "colluscan/ingest.hpp"
#include "colluscan/scheme.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace colluscan {

struct CohortPaths {
    std::filesystem::path events;
    std::filesystem::path scores;
    std::filesystem::path catalog;

    bool present() const { return !events.empty() || !scores.empty() || !catalog.empty(); }
};

struct RunConfig {
    CohortPaths test;
    CohortPaths comparison; // optional; required by `flag`
    EventFormat events_format = EventFormat::Csv;
    SchemeMode scheme_mode = SchemeMode::Paper;
    NormalizationMode normalization = NormalizationMode::Range;
    std::optional<Linkage> linkage_override; // nullopt = auto-select by C
    int k_lowest = 6;
    CohortFilter filter;
    bool strict_flagging = false;
    bool figures = true;
    std::filesystem::path out_dir = "out";
};

// Reads the JSON config; relative paths (inputs and out) resolve against the
// config file's directory.
RunConfig load_run_config(const std::filesystem::path& config_path);

// CLI flag values that take precedence over the config file.
struct ConfigOverrides {
    std::optional<std::string> scheme;
    std::optional<std::string> normalize;
    std::optional<std::string> linkage;
    std::optional<int> k_lowest;
    std::optional<bool> figures;
    std::optional<std::string> out_dir;
    std::optional<bool> strict;
};

void apply_overrides(RunConfig& config, const ConfigOverrides& overrides);

// Exit codes: 0 success, 1 input/validation error, 2 internal invariant
// violation. Messages go to `err`; human-readable tables to `out`.
int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_flag(const RunConfig& config, std::ostream& out, std::ostream& err);
// Re-renders every figure from the JSON artifacts in out_dir alone.
int cmd_render(const RunConfig& config, std::ostream& out, std::ostream& err);

} // namespace colluscan
