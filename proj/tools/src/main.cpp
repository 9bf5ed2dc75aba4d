#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "harness.hpp"
#include "relsmooth/serialization.hpp"

namespace {

using namespace relsmooth::harness;

enum Exit { kOk = 0, kFailures = 1, kConfig = 2, kMissingCertificate = 3, kError = 4 };

struct Source {
    std::string config;
    std::string preset;
    std::optional<std::string> output;

    void attach(CLI::App* cmd) {
        auto* c = cmd->add_option("config", config, "INI experiment config")->check(CLI::ExistingFile);
        auto* p = cmd->add_option("--preset", preset, "Built-in config (see `presets`)");
        c->excludes(p);
        cmd->add_option("-o,--output", output, "Output directory");
    }

    ExperimentConfig load() const {
        if (!preset.empty()) {
            return parse_config(preset_text(preset), "preset:" + preset);
        }
        if (config.empty()) {
            throw ConfigError("give a config file or --preset NAME");
        }
        return load_config(config);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Experiments with Bregman first-order methods for relatively smooth problems"};
    app.set_version_flag("--version", relsmooth::library_version());
    app.require_subcommand(1);

    Source run_src, bounds_src, check_src;
    int workers = 0;
    CLI::App* run = app.add_subcommand("run", "Run every algorithm on every replicate");
    run_src.attach(run);
    run->add_option("-j,--workers", workers, "Concurrent replicates (default: config, then all cores)")
        ->check(CLI::NonNegativeNumber);

    CLI::App* bounds = app.add_subcommand("bounds", "Write theoretical bound overlays only");
    bounds_src.attach(bounds);

    CLI::App* check = app.add_subcommand("check", "Verify the problem's certificates numerically");
    check_src.attach(check);

    std::string show;
    CLI::App* presets = app.add_subcommand("presets", "List built-in configs");
    presets->add_option("--show", show, "Print the named preset's config text");

    CLI11_PARSE(app, argc, argv);

    try {
        if (presets->parsed()) {
            if (!show.empty()) {
                std::cout << preset_text(show);
            } else {
                for (const std::string& name : preset_names()) {
                    std::cout << name << '\n';
                }
            }
            return kOk;
        }
        if (run->parsed()) {
            const ExperimentConfig cfg = run_src.load();
            const auto out = resolve_output_dir(cfg, run_src.output);
            const int w = workers > 0 ? workers : cfg.workers;
            const RunSummary s = run_experiment(cfg, out, w);
            std::cout << s.runs - s.failed << "/" << s.runs << " runs completed; manifest "
                      << s.manifest.string() << '\n';
            return s.failed == 0 ? kOk : kFailures;
        }
        if (bounds->parsed()) {
            const ExperimentConfig cfg = bounds_src.load();
            const BoundsSummary s = emit_bounds(cfg, resolve_output_dir(cfg, bounds_src.output), true);
            for (const auto& path : s.written) {
                std::cout << path.string() << '\n';
            }
            for (const std::string& label : s.not_applicable) {
                std::cout << label << ": no certificate-based bound for this method\n";
            }
            return kOk;
        }
        if (check->parsed()) {
            const ExperimentConfig cfg = check_src.load();
            const CheckSummary s = run_checks(cfg, resolve_output_dir(cfg, check_src.output));
            for (const auto& path : s.written) {
                std::cout << path.string() << '\n';
            }
            std::cout << s.total - s.failed << "/" << s.total << " checks passed\n";
            return s.failed == 0 ? kOk : kFailures;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const MissingCertificate& e) {
        std::cerr << "missing certificate: " << e.what() << '\n';
        return kMissingCertificate;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kOk;
}
