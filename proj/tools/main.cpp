#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spreadq/config.hpp"
#include "spreadq/error.hpp"
#include "spreadq/experiment.hpp"
#include "spreadq/verify.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Pair-trading research toolkit: pair selection, training and backtests"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::size_t top = 0;

    auto* select = app.add_subcommand("select-pairs", "Rank the universe by Engle-Granger p-value");
    select->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    select->add_option("--set", overrides, "Override a config value: key.path=value");
    select->add_option("--top", top, "Keep only the best N pairs");

    auto* run = app.add_subcommand("run", "Train / evaluate the configured method over all rollings");
    run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--set", overrides, "Override a config value: key.path=value");

    bool corrupt = false;
    auto* verify = app.add_subcommand("verify", "Run the built-in verification suite");
    verify->add_flag("--corrupt-gradient", corrupt, "Flip the analytic gradient (checks that the suite catches it)")
        ->group("");

    std::string report_path;
    std::string out_dir;
    auto* report = app.add_subcommand("report", "Re-render tables from a report JSON");
    report->add_option("report", report_path, "report.json")->required()->check(CLI::ExistingFile);
    report->add_option("--out", out_dir, "Output directory (default: next to the report)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*select) {
            const auto cfg = spreadq::load_config(config_path, overrides);
            const auto ranking = spreadq::cmd_select_pairs(cfg, top, std::cerr);
            for (const auto& p : ranking.pairs) {
                std::cout << p.symbol_x << ',' << p.symbol_y << " p=" << p.result.p_value << '\n';
            }
            std::cout << "wrote " << (cfg.output / "pairs.csv").string() << '\n';
            return 0;
        }
        if (*run) {
            const auto cfg = spreadq::load_config(config_path, overrides);
            const auto rep = spreadq::cmd_run(cfg, std::cerr);
            std::cout << spreadq::aggregate_csv(rep);
            std::cout << "wrote " << (cfg.output / "report.json").string() << '\n';
            return rep.completed == static_cast<int>(rep.rollings.size()) ? 0 : 1;
        }
        if (*verify) {
            const auto results = spreadq::run_verification({.corrupt_gradient = corrupt});
            spreadq::print_verification(results, std::cout);
            for (const auto& r : results) {
                if (!r.passed) return 1;
            }
            return 0;
        }
        if (*report) {
            const std::filesystem::path src(report_path);
            const std::filesystem::path dir = out_dir.empty() ? src.parent_path() : std::filesystem::path(out_dir);
            const auto rep = spreadq::cmd_report(src, dir);
            std::cout << spreadq::aggregate_csv(rep);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
