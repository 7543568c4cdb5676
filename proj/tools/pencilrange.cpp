#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pencilrange/acceptance.hpp"
#include "pencilrange/runner.hpp"

namespace {

std::size_t resolve_threads(std::size_t cli_threads) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("PENCILRANGE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return std::size_t(v);
    }
    return 0;  // hardware concurrency
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical ranges and spectral enclosures for operator pencils"};
    app.require_subcommand(1);

    std::string config_path, out_dir, preset, box_override, res_override;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    bool have_seed = false;

    auto* run_cmd = app.add_subcommand("run", "execute an experiment config");
    run_cmd->add_option("config", config_path, "JSON experiment config")->required();
    run_cmd->add_option("--out", out_dir, "output directory override");
    run_cmd->add_option("--seed", seed, "rng seed override")->each([&](const std::string&) {
        have_seed = true;
    });
    run_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
    run_cmd->add_option("--box", box_override, "box override re_min,re_max,im_min,im_max");
    run_cmd->add_option("--res", res_override, "resolution override nx,ny");

    auto* figure_cmd = app.add_subcommand("figure", "render a built-in figure preset");
    figure_cmd->add_option("preset", preset,
                           "stokes-const | stokes-circles | dirac-sigma | jt-sweep")
        ->required();
    figure_cmd->add_option("--out", out_dir, "output directory");
    figure_cmd->add_option("--seed", seed, "rng seed");
    figure_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");

    std::vector<int> only;
    auto* check_cmd = app.add_subcommand("check", "run the acceptance suite");
    check_cmd->add_option("--only", only, "criterion ids to run");

    CLI11_PARSE(app, argc, argv);

    using namespace pencilrange;
    try {
        if (*run_cmd) {
            ExperimentConfig cfg = ExperimentConfig::load(config_path);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (have_seed) cfg.seed = seed;
            cfg.threads = resolve_threads(threads ? threads : cfg.threads);
            if (!box_override.empty()) {
                double v[4];
                if (std::sscanf(box_override.c_str(), "%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2],
                                &v[3]) != 4)
                    throw ConfigError("--box expects re_min,re_max,im_min,im_max");
                cfg.box = Box{v[0], v[1], v[2], v[3]};
            }
            if (!res_override.empty()) {
                unsigned long nx = 0, ny = 0;
                if (std::sscanf(res_override.c_str(), "%lu,%lu", &nx, &ny) != 2)
                    throw ConfigError("--res expects nx,ny");
                cfg.nx = nx;
                cfg.ny = ny;
            }
            const RunResult result = run_experiment(cfg);
            std::cout << result.summary;
            for (const auto& a : result.artifacts) std::cout << "wrote " << a << "\n";
            return result.exit_code;
        }
        if (*figure_cmd) {
            if (out_dir.empty()) out_dir = "out";
            const RunResult result =
                run_figure_preset(preset, out_dir, resolve_threads(threads), seed ? seed : 1);
            std::cout << result.summary;
            for (const auto& a : result.artifacts) std::cout << "wrote " << a << "\n";
            return result.exit_code;
        }
        if (*check_cmd) {
            const int failures = acceptance_main(std::cout, only);
            return failures == 0 ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
