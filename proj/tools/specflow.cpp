#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specflow/config.hpp"
#include "specflow/errors.hpp"
#include "specflow/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"specflow: special flows over irrational rotations with singular roofs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", specflow::kToolVersion);

    // run
    auto* run = app.add_subcommand("run", "Execute an experiment described by a config file");
    std::string config_path;
    std::vector<std::string> overrides;
    run->add_option("config", config_path, "Config file path")->required();
    run->add_option("--override", overrides, "Override a config entry, section.key=value");

    // plot
    auto* plot = app.add_subcommand("plot", "Render a log-log SVG from run summaries");
    std::vector<std::string> summaries;
    std::string plot_out = "plot.svg";
    plot->add_option("summaries", summaries, "Summary JSON files from `specflow run`")
        ->required();
    plot->add_option("-o,--output", plot_out, "Output SVG path");

    // cf
    auto* cf = app.add_subcommand("cf", "Continued-fraction table and Diophantine classification");
    std::string alpha_spec;
    int depth = 48;
    double c_const = 2.0;
    cf->add_option("alpha", alpha_spec, "golden | silver | decimal | cf:a1,a2,...")->required();
    cf->add_option("--depth", depth, "Expansion depth");
    cf->add_option("--c-const", c_const, "Class-D constant");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            specflow::Config cfg = specflow::Config::load(config_path);
            for (const auto& o : overrides) cfg.apply_override(o);
            specflow::RunArtifacts arts = specflow::run_experiment(cfg);
            for (const auto& w : arts.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            for (const auto& f : arts.files) std::printf("wrote %s\n", f.c_str());
            if (arts.exit_code == 2) std::fprintf(stderr, "assertion failure in experiment\n");
            return arts.exit_code;
        }
        if (*plot) {
            specflow::render_plot(summaries, plot_out);
            std::printf("wrote %s\n", plot_out.c_str());
            return 0;
        }
        if (*cf) {
            std::fputs(specflow::cf_table(alpha_spec, depth, c_const).c_str(), stdout);
            return 0;
        }
    } catch (const specflow::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
