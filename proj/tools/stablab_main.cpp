// stablab: run stability experiments from a JSON config.
//
//   stablab lemma-check    --config exp.json [--out report.json] [--format json|csv] [--seed N]
//   stablab stability      --config exp.json ...
//   stablab superstability --config exp.json ...
//   stablab bounds-table   --config exp.json ...
//
// Exit status: 0 satisfied, 1 violated, 2 diverged, 3 config error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stablab/harness.hpp"

namespace h = stablab::harness;

int main(int argc, char** argv) {
    CLI::App app{"Numerical stability lab for Jordan *-homomorphisms on matrix algebras"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_path;
    std::optional<std::string> format;
    std::optional<std::int64_t> seed;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"lemma-check", "additivity derivation steps and the telescoping equality"},
        {"stability", "direct-method stabilization with certified distance bounds"},
        {"superstability", "decay of the rescaled Jordan defect"},
        {"bounds-table", "closed-form vs truncated-series bound table"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_path, "report path (default: outputs.path, else stdout)");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--seed", seed, "overrides sampling.seed");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : h::kExitConfigError;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        h::ExperimentConfig cfg = h::load_config(config_path);
        if (seed) {
            h::override_seed(cfg, static_cast<std::uint64_t>(*seed));
        }
        if (format) {
            cfg.outputs.format = *format == "csv" ? h::OutputFormat::Csv : h::OutputFormat::Json;
        }
        if (out_path) {
            cfg.outputs.path = *out_path;
        }

        h::RunSummary summary;
        if (command == "lemma-check") {
            summary = h::cmd_lemma_check(cfg);
        } else if (command == "stability") {
            summary = h::cmd_stability(cfg);
        } else if (command == "superstability") {
            summary = h::cmd_superstability(cfg);
        } else {
            summary = h::cmd_bounds_table(cfg);
        }

        if (cfg.outputs.path) {
            h::write_summary(summary, cfg.outputs.format, *cfg.outputs.path);
        } else if (cfg.outputs.format == h::OutputFormat::Csv) {
            std::cout << summary.rows_csv();
        } else {
            std::cout << summary.to_json().dump(2) << "\n";
        }
        const std::string outcome = summary.exit_code == h::kExitDiverged
                                        ? std::string("diverged")
                                        : stablab::to_string(summary.verdict);
        std::cerr << command << ": " << outcome << " (exit " << summary.exit_code << ")\n";
        return summary.exit_code;
    } catch (const h::ConfigError& e) {
        std::cerr << "config error at " << e.what() << "\n";
        return h::kExitConfigError;
    } catch (const stablab::IncompatibleBound& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return h::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return h::kExitConfigError;
    }
}
