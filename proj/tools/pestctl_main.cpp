#include "pestctl/parallel.hpp"
#include "pestctl/scenarios.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitNotConverged = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> sets;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "configuration file (key = value lines)");
    cmd->add_option("--out", args.out_dir, "output directory (overrides output_dir)");
    cmd->add_option("--set", args.sets, "override one setting, key=value (repeatable)");
    cmd->add_option("--threads", args.threads, "worker threads (or PESTCTL_THREADS)");
}

pestctl::ScenarioConfig build_config(const CommonArgs& args) {
    pestctl::ScenarioConfig cfg = args.config_path.empty()
                                      ? pestctl::default_config()
                                      : pestctl::load_config(args.config_path);
    for (const std::string& s : args.sets) pestctl::apply_override(cfg, s);
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crop pest dynamics: simulation, equilibria, stability, bifurcation and "
                 "optimal control"};
    app.require_subcommand(1);

    CommonArgs args;
    auto* simulate = app.add_subcommand("simulate", "integrate the system and write time series");
    auto* equilibria = app.add_subcommand("equilibria", "locate all fixed points");
    auto* stability = app.add_subcommand("stability", "locate and classify all fixed points");
    auto* hopf = app.add_subcommand("hopf-scan", "scan alpha for oscillation onset");
    auto* bifurcation = app.add_subcommand("bifurcation", "branch diagram over alpha");
    auto* optimal = app.add_subcommand("optimal-control", "forward-backward sweep solve");
    for (CLI::App* cmd : {simulate, equilibria, stability, hopf, bifurcation, optimal}) {
        add_common(cmd, args);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const pestctl::ScenarioConfig cfg = build_config(args);
        const unsigned threads = pestctl::resolve_thread_count(args.threads);

        if (simulate->parsed()) {
            pestctl::run_simulate(cfg, threads);
        } else if (equilibria->parsed()) {
            pestctl::run_equilibria_stability(cfg, "equilibria");
        } else if (stability->parsed()) {
            pestctl::run_equilibria_stability(cfg, "stability");
        } else if (hopf->parsed()) {
            pestctl::run_hopf_scan(cfg);
        } else if (bifurcation->parsed()) {
            pestctl::run_bifurcation(cfg, threads);
        } else if (optimal->parsed()) {
            if (!pestctl::run_optimal_control(cfg)) {
                std::cerr << "sweep did not converge within the iteration budget; "
                             "outputs written with converged=false\n";
                return kExitNotConverged;
            }
        }
        return kExitOk;
    } catch (const pestctl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
}
