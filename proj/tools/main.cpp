#include "commands.hpp"
#include "run_config.hpp"

#include "epforest/errors.hpp"
#include "epforest/version.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

namespace {

using epf::cli::RunConfig;

struct CliState {
    RunConfig config;
    std::string config_file;
    std::string from_text;
    std::string to_text;
    std::vector<std::string> range_texts;
};

void add_common_options(CLI::App* cmd, CliState& state) {
    cmd->add_option("--input", state.config.input, "Daily CSV input file");
    cmd->add_option("--scenario", state.config.scenario,
                    "Scenario config for synthetic data ('default' for the built-in)");
    cmd->add_option("--features", state.config.feature_spec, "Feature spec config file");
    cmd->add_option("--target", state.config.target, "Price series: base or peak")
        ->check(CLI::IsMember({"base", "peak"}));
    cmd->add_option("--from", state.from_text, "Start date (inclusive, YYYY-MM-DD)");
    cmd->add_option("--to", state.to_text, "End date (inclusive, YYYY-MM-DD)");
    cmd->add_option("--range", state.range_texts,
                    "Subsample range FROM..TO; repeatable (importance)");
    cmd->add_option("--trees", state.config.tree_counts, "Tree counts (comma separated)")
        ->delimiter(',');
    cmd->add_option("--min-node", state.config.min_node_sizes,
                    "Minimum observations per splitting node (comma separated)")
        ->delimiter(',');
    cmd->add_option("--mtry", state.config.mtry, "Features per split (0 = p/3)");
    cmd->add_option("--seed", state.config.seed, "Master seed");
    cmd->add_option("--threads", state.config.threads, "Worker threads (0 = hardware)");
    cmd->add_option("--out", state.config.out_dir, "Output directory");
    cmd->add_option("--fill", state.config.fill, "Gap policy: forward or linear")
        ->check(CLI::IsMember({"forward", "linear"}));
    cmd->add_option("--min-rows", state.config.min_rows, "Minimum design rows");
    cmd->add_option("--grid", state.config.grid_points, "Grid points per axis (pdp)");
    cmd->add_option("--feature-a", state.config.feature_a, "First grid feature (pdp)");
    cmd->add_option("--feature-b", state.config.feature_b, "Second grid feature (pdp)");
    cmd->add_option("--config", state.config_file,
                    "Key=value config file; overrides the flags above");
}

RunConfig finalize(CliState& state) {
    if (!state.from_text.empty()) state.config.from = epf::parse_date(state.from_text);
    if (!state.to_text.empty()) state.config.to = epf::parse_date(state.to_text);
    for (const auto& text : state.range_texts) {
        const auto sep = text.find("..");
        if (sep == std::string::npos)
            throw epf::ConfigError("range '" + text + "': expected FROM..TO");
        state.config.ranges.emplace_back(epf::parse_date(text.substr(0, sep)),
                                         epf::parse_date(text.substr(sep + 2)));
    }
    if (!state.config_file.empty()) state.config.apply_config_file(state.config_file);
    state.config.validate();
    return state.config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regression-forest toolkit for electricity price driver analysis"};
    app.set_version_flag("--version", std::string("epforest ") + epf::kVersion);
    app.require_subcommand(1);

    struct Command {
        const char* name;
        const char* help;
        std::function<std::vector<std::filesystem::path>(const RunConfig&)> run;
        CliState state;
    };
    std::vector<Command> commands = {
        {"synth", "Generate a synthetic market panel", epf::cli::run_synth, {}},
        {"ingest", "Align, fill, and convert a raw daily CSV", epf::cli::run_ingest, {}},
        {"features", "Emit the design matrix (date, y, 12 predictors)", epf::cli::run_features,
         {}},
        {"table1", "RMSE grid over min-node and tree counts", epf::cli::run_table1, {}},
        {"importance", "Normalized predictor importances per date range",
         epf::cli::run_importance, {}},
        {"pdp", "Two-feature partial-effect grid", epf::cli::run_pdp, {}},
        {"curve", "Out-of-bag error versus number of trees", epf::cli::run_curve, {}},
        {"baselines", "AR(1) and OLS benchmark fits", epf::cli::run_baselines, {}},
    };

    for (auto& command : commands) {
        auto* sub = app.add_subcommand(command.name, command.help);
        if (std::string(command.name) == "importance" || std::string(command.name) == "pdp" ||
            std::string(command.name) == "curve") {
            // Benchmark-model defaults for the single-model commands.
            command.state.config.min_node_sizes = {10};
            command.state.config.tree_counts = {1000};
        }
        add_common_options(sub, command.state);
        sub->callback([&command] {
            const RunConfig config = finalize(command.state);
            for (const auto& path : command.run(config))
                std::cout << "wrote " << path.string() << '\n';
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        app.exit(e);
        return 2;
    } catch (const epf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const epf::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const epf::NumericError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
