// colluscan CLI: analyze a test cohort, flag its pairs against a comparison
// cohort, or re-render figures from previously written artifacts.

#include "colluscan/error.hpp"
#include "colluscan/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct CliArgs {
    std::string config;
    colluscan::ConfigOverrides overrides;
    bool no_figures = false;
    bool strict = false;
    std::string out_dir;
};

// The overrides are shared by every subcommand so that a config file plus a
// handful of flags covers the common workflows.
void add_common_options(CLI::App* cmd, CliArgs& args) {
    cmd->add_option("--config", args.config, "Run configuration JSON file")
        ->required();
    cmd->add_option("--scheme", args.overrides.scheme,
                    "Weight scheme: paper or equal")
        ->check(CLI::IsMember({"paper", "equal"}));
    cmd->add_option("--normalize", args.overrides.normalize,
                    "Attribute normalization: range, zscore or none")
        ->check(CLI::IsMember({"range", "zscore", "none"}));
    cmd->add_option("--linkage", args.overrides.linkage,
                    "Linkage: auto (cophenetic selection), single, complete or average")
        ->check(CLI::IsMember({"auto", "single", "complete", "average"}));
    cmd->add_option("--k-lowest", args.overrides.k_lowest,
                    "Number of lowest clusters to report");
    cmd->add_flag("--no-figures", args.no_figures, "Skip SVG figure output");
    cmd->add_option("--out", args.out_dir, "Artifact output directory");
}

colluscan::RunConfig build_config(CliArgs& args, bool with_strict) {
    colluscan::RunConfig config = colluscan::load_run_config(args.config);
    if (args.no_figures) {
        args.overrides.figures = false;
    }
    if (with_strict && args.strict) {
        args.overrides.strict = true;
    }
    if (!args.out_dir.empty()) {
        args.overrides.out_dir = args.out_dir;
    }
    colluscan::apply_overrides(config, args.overrides);
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collusion screening for unproctored online exams"};
    app.require_subcommand(1);

    CliArgs analyze_args;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "Build the dissimilarity matrix, dendrogram and low clusters");
    add_common_options(analyze, analyze_args);

    CliArgs flag_args;
    CLI::App* flag = app.add_subcommand(
        "flag", "Flag test-cohort pairs against the comparison cohort");
    add_common_options(flag, flag_args);
    flag->add_flag("--strict", flag_args.strict,
                   "Also require z below the comparison minimum");

    CliArgs render_args;
    CLI::App* render = app.add_subcommand(
        "render", "Re-render SVG figures from JSON artifacts in the output directory");
    add_common_options(render, render_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // CLI11 help/version exit with 0; treat every parse failure as bad input.
        return code == 0 ? 0 : 1;
    }

    try {
        if (analyze->parsed()) {
            return colluscan::cmd_analyze(build_config(analyze_args, false), std::cout,
                                          std::cerr);
        }
        if (flag->parsed()) {
            return colluscan::cmd_flag(build_config(flag_args, true), std::cout,
                                       std::cerr);
        }
        return colluscan::cmd_render(build_config(render_args, false), std::cout,
                                     std::cerr);
    } catch (const colluscan::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const colluscan::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
