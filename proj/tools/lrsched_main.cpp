#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lrsched/errors.hpp"
#include "lrsched/harness.hpp"
#include "lrsched/kernels.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::string out_dir;
    long long seed = -1;
    long long workers = -1;
};

void add_common(CLI::App* sub, CommonArgs& a) {
    sub->add_option("--config", a.config_path, "experiment config file (JSON)");
    sub->add_option("--preset", a.preset, "built-in preset name (e.g. fig2a)");
    sub->add_option("--out", a.out_dir, "output directory");
    sub->add_option("--seed", a.seed, "seed override");
    sub->add_option("--workers", a.workers, "parallel workers for sweeps");
}

lrsched::ExperimentConfig resolve_config(const CommonArgs& a) {
    lrsched::ExperimentConfig cfg;
    if (!a.config_path.empty()) {
        cfg = lrsched::load_config(a.config_path);
        if (!a.preset.empty())
            throw lrsched::ConfigError("use either --config or --preset, not both");
    } else if (!a.preset.empty()) {
        cfg = lrsched::preset_config(a.preset);
    } else {
        throw lrsched::ConfigError("missing --config or --preset");
    }
    if (!a.out_dir.empty()) {
        cfg.output_dir = a.out_dir;
    } else if (const char* env = std::getenv("LRSCHED_OUT_DIR")) {
        cfg.output_dir = std::string(env) + "/" +
                         (cfg.preset.empty() ? "run" : cfg.preset);
    }
    if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
    if (a.workers >= 1) cfg.workers = static_cast<std::size_t>(a.workers);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal learning-rate schedule experiments"};
    app.require_subcommand(1);

    CommonArgs run_a, sweep_a, meta_a, cal_a;
    CLI::App* run = app.add_subcommand("run", "run one experiment");
    add_common(run, run_a);
    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    add_common(sweep, sweep_a);
    CLI::App* metalearn =
        app.add_subcommand("metalearn", "sequential episodes with the memory estimator");
    add_common(metalearn, meta_a);
    CLI::App* calibrate =
        app.add_subcommand("calibrate", "search the final-performance estimate");
    add_common(calibrate, cal_a);
    CLI::App* presets = app.add_subcommand("presets", "list built-in presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (presets->parsed()) {
            for (const std::string& name : lrsched::preset_names())
                std::cout << name << "\n";
            return 0;
        }
        std::cerr << "kernels: " << lrsched::kern::backend() << "\n";
        if (run->parsed()) return lrsched::cmd_run(resolve_config(run_a), std::cout);
        if (sweep->parsed())
            return lrsched::cmd_sweep(resolve_config(sweep_a), std::cout);
        if (metalearn->parsed())
            return lrsched::cmd_metalearn(resolve_config(meta_a), std::cout);
        if (calibrate->parsed())
            return lrsched::cmd_calibrate(resolve_config(cal_a), std::cout);
    } catch (const lrsched::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const lrsched::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const lrsched::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
