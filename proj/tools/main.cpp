#include <CLI11.hpp>

#include "causalflow/cli_app.hpp"
#include "causalflow/errors.hpp"

using causalflow::GridScale;
using causalflow::RunConfig;

namespace {

void add_common_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--network", cfg.network_path, "network definition file");
    cmd->add_option("--source", cfg.source, "source node name");
    cmd->add_option("--target", cfg.target, "target node name");
    cmd->add_option("--tau-min", [&cfg](const CLI::results_t& res) {
        cfg.tau_min = std::stod(res[0]);
        return true;
    }, "smallest lag of the grid");
    cmd->add_option("--tau-max", [&cfg](const CLI::results_t& res) {
        cfg.tau_max = std::stod(res[0]);
        return true;
    }, "largest lag of the grid");
    cmd->add_option("--tau-steps", cfg.tau_steps, "number of grid lags");
    cmd->add_option("--tau-scale", [&cfg](const CLI::results_t& res) {
        if (res[0] == "lin") {
            cfg.tau_scale = GridScale::linear;
        } else if (res[0] == "log") {
            cfg.tau_scale = GridScale::log;
        } else {
            throw CLI::ValidationError("--tau-scale must be lin or log");
        }
        return true;
    }, "lag grid spacing: lin or log");
    cmd->add_flag("--condition-parents", cfg.condition_parents,
                  "condition all measures on the pair's parent nodes");
    cmd->add_option("--out", cfg.out_path, "output file (default stdout)");
    cmd->add_option("--svg", cfg.svg_path, "also draw the curve as SVG");
    cmd->add_option("--seed", cfg.seed, "random seed");
    cmd->add_option("--dt", cfg.dt, "simulation step");
    cmd->add_option("--steps", cfg.steps, "transitions per trajectory");
    cmd->add_option("--ensemble", cfg.n_traj, "number of trajectories");
    cmd->add_option("--scheme", cfg.scheme, "sampler: exact or em");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "causalflow: information decomposition and causal influence for "
        "linear Langevin networks"};
    app.require_subcommand(1);

    RunConfig cfg;

    CLI::App* analyze = app.add_subcommand(
        "analyze", "exact decomposition curve for one node pair");
    add_common_flags(analyze, cfg);

    CLI::App* simulate = app.add_subcommand(
        "simulate", "generate stationary sample trajectories");
    add_common_flags(simulate, cfg);

    CLI::App* estimate = app.add_subcommand(
        "estimate", "plug-in decomposition curve from trajectory data");
    estimate->add_option("trajectory", cfg.trajectory_path,
                         "trajectory CSV produced by simulate")
        ->required();
    add_common_flags(estimate, cfg);

    CLI::App* capacity = app.add_subcommand(
        "capacity", "peak influence sweep over beta*t_rel");
    capacity
        ->add_option("--grid", cfg.capacity_grid,
                     "beta*t_rel values (default 1e2..1e6 decades)")
        ->delimiter(',');
    add_common_flags(capacity, cfg);

    CLI::App* verify = app.add_subcommand(
        "verify", "run the built-in verification suite");
    add_common_flags(verify, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // CLI11 returns 0 for --help; anything else is a usage problem
        return code == 0 ? causalflow::kExitOk : causalflow::kExitUsage;
    }

    for (CLI::App* sub : {analyze, simulate, estimate, capacity, verify}) {
        if (sub->parsed()) {
            cfg.command = sub->get_name();
        }
    }
    return causalflow::dispatch(cfg);
}
