#include "causalflow/cli_app.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "causalflow/errors.hpp"
#include "causalflow/estimate.hpp"
#include "causalflow/ffl.hpp"
#include "causalflow/gausscov.hpp"
#include "causalflow/measures.hpp"
#include "causalflow/network.hpp"
#include "causalflow/numeric.hpp"
#include "causalflow/report.hpp"
#include "causalflow/response_model.hpp"
#include "causalflow/simulate.hpp"

namespace causalflow {

namespace {

ValidatedNetwork load_validated(const RunConfig& cfg) {
    if (cfg.network_path.empty()) {
        throw UsageError("--network is required for this command");
    }
    return validate(load_network(cfg.network_path));
}

void emit(const RunConfig& cfg, const std::string& contents) {
    if (cfg.out_path.empty()) {
        std::cout << contents;
    } else {
        atomic_write_file(cfg.out_path, contents);
    }
}

void maybe_emit_svg(const RunConfig& cfg, const DecompositionCurve& curve) {
    if (cfg.svg_path.empty()) {
        return;
    }
    std::ostringstream svg;
    write_curve_svg(svg, curve, cfg.tau_scale == GridScale::log);
    atomic_write_file(cfg.svg_path, svg.str());
}

}  // namespace

std::vector<double> make_tau_grid(const RunConfig& cfg, double t_char) {
    double lo = cfg.tau_min.value_or(1e-3 * t_char);
    double hi = cfg.tau_max.value_or(30.0 * t_char);
    const int n = cfg.tau_steps;
    if (n < 2) {
        throw UsageError("--tau-steps must be at least 2");
    }
    if (lo < 0.0 || hi <= lo) {
        throw UsageError("need 0 <= tau-min < tau-max");
    }
    if (cfg.tau_scale == GridScale::log && !(lo > 0.0)) {
        throw UsageError("a log lag grid needs tau-min > 0");
    }
    std::vector<double> grid(static_cast<std::size_t>(n));
    if (cfg.tau_scale == GridScale::log) {
        const double llo = std::log(lo), lhi = std::log(hi);
        for (int i = 0; i < n; ++i) {
            grid[static_cast<std::size_t>(i)] =
                std::exp(llo + (lhi - llo) * i / (n - 1));
        }
        grid.front() = lo;
        grid.back() = hi;
    } else {
        for (int i = 0; i < n; ++i) {
            grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
        }
    }
    return grid;
}

int run_analyze(const RunConfig& cfg) {
    const ValidatedNetwork net = load_validated(cfg);
    if (cfg.source.empty() || cfg.target.empty()) {
        throw UsageError("analyze needs --source and --target");
    }
    const std::vector<double> grid =
        make_tau_grid(cfg, net.characteristic_time());
    const DecompositionCurve curve = decompose_curve(
        net, cfg.source, cfg.target, grid, cfg.condition_parents);
    std::ostringstream csv;
    write_curve_csv(csv, curve);
    emit(cfg, csv.str());
    maybe_emit_svg(cfg, curve);
    return kExitOk;
}

int run_simulate(const RunConfig& cfg) {
    const ValidatedNetwork net = load_validated(cfg);
    const TrajectoryEnsemble ens =
        generate(net, parse_scheme(cfg.scheme), cfg.dt, cfg.steps,
                 cfg.n_traj, cfg.seed);
    std::ostringstream csv;
    write_trajectory_csv(csv, ens);
    emit(cfg, csv.str());
    return kExitOk;
}

int run_estimate(const RunConfig& cfg) {
    const ValidatedNetwork net = load_validated(cfg);
    if (cfg.source.empty() || cfg.target.empty()) {
        throw UsageError("estimate needs --source and --target");
    }
    if (cfg.trajectory_path.empty()) {
        throw UsageError("estimate needs a trajectory CSV argument");
    }
    std::ifstream in(cfg.trajectory_path);
    if (!in) {
        throw UsageError("cannot open trajectory file '" +
                         cfg.trajectory_path + "'");
    }
    const TrajectoryEnsemble ens = read_trajectory_csv(in);
    if (static_cast<int>(ens.labels.size()) != net.size()) {
        throw UsageError("trajectory columns do not match the network");
    }
    for (const std::string& label : ens.labels) {
        try {
            net.index(label);
        } catch (const UnknownNode&) {
            throw UsageError("trajectory column '" + label +
                             "' is not a node of the network");
        }
    }

    const std::vector<double> grid =
        make_tau_grid(cfg, net.characteristic_time());
    DecompositionCurve curve;
    curve.source = cfg.source;
    curve.target = cfg.target;
    if (cfg.condition_parents) {
        curve.conditioned_on = net.parents({cfg.source, cfg.target});
    }
    std::vector<double> effective;
    int last_lag = -1;
    for (double tau : grid) {
        const int lag = static_cast<int>(std::llround(tau / ens.dt));
        if (lag <= last_lag || lag > ens.steps) {
            continue;  // grid finer than dt, or beyond the data
        }
        last_lag = lag;
        double eff = 0.0;
        curve.points.push_back(empirical_decomposition(
            ens, net, cfg.source, cfg.target, lag, cfg.condition_parents,
            &eff));
        effective.push_back(eff);
    }
    if (curve.points.empty()) {
        throw InsufficientData("no usable lags: grid does not match data");
    }
    std::vector<double> i_lags, cs;
    for (const DecompositionPoint& p : curve.points) {
        i_lags.push_back(p.i_lag);
        cs.push_back(p.c);
    }
    const std::size_t opt = detail::argmax_small_tie(i_lags);
    const std::size_t res = detail::argmax_small_tie(cs);
    curve.tau_opt = curve.points[opt].tau;
    curve.peak_i = curve.points[opt].i_lag;
    curve.tau_res = curve.points[res].tau;
    curve.peak_c = curve.points[res].c;

    std::ostringstream csv;
    write_curve_csv(csv, curve, &effective);
    emit(cfg, csv.str());
    maybe_emit_svg(cfg, curve);
    return kExitOk;
}

int run_capacity(const RunConfig& cfg) {
    std::vector<double> grid = cfg.capacity_grid;
    if (grid.empty()) {
        grid = {1e2, 1e3, 1e4, 1e5, 1e6};
    }
    const response::CapacityResult result = response::causation_capacity(grid);
    std::ostringstream csv;
    csv << "beta_t_rel,peak_c,tau_res,i_opt\n";
    char buf[40];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const response::CapacityPoint& p : result.points) {
        csv << fmt(p.beta_t_rel) << ',' << fmt(p.peak_c) << ','
            << fmt(p.tau_res) << ',' << fmt(p.i_opt) << '\n';
    }
    if (result.estimate.has_value()) {
        csv << "# capacity_estimate=" << fmt(*result.estimate) << '\n';
    }
    emit(cfg, csv.str());
    return kExitOk;
}

namespace {

struct VerifyTable {
    bool all_pass = true;
    std::ostringstream out;

    void row(const std::string& name, bool pass, const std::string& detail) {
        all_pass = all_pass && pass;
        out << (pass ? "PASS  " : "FAIL  ") << name;
        if (!detail.empty()) {
            out << "  (" << detail << ")";
        }
        out << '\n';
    }
};

std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

void verify_stock_pair(VerifyTable& table) {
    const ResponseModel fig1{0.1, 0.2, 10.0, 10.0};
    const ValidatedNetwork net = validate(fig1.to_network());
    GaussianEngine engine(net);

    // analytic optimum versus an independent maximization of the engine MI
    const double tau_a = response::tau_opt(fig1);
    const double i_a = response::i_opt(fig1);
    auto engine_mi = [&net](double tau) {
        return decompose(net, "x", "y", tau).i_lag;
    };
    const num::Maximum numeric =
        num::grid_refine_max(engine_mi, 0.05, 30.0, 120, 1e-9);
    table.row("two-node lag optimum",
              std::abs(numeric.arg - tau_a) <= 1e-6 &&
                  std::abs(numeric.value - i_a) <= 1e-6,
              "analytic tau_opt=" + sci(tau_a) + " numeric=" +
                  sci(numeric.arg));

    // closed forms against the general engine across the lag grid
    double worst = 0.0;
    for (double tau = 0.02; tau < 60.0; tau *= 1.4) {
        const DecompositionPoint closed = response::decompose_closed(fig1, tau);
        const DecompositionPoint general = decompose(net, "x", "y", tau);
        for (auto field : {&DecompositionPoint::i_lag, &DecompositionPoint::te,
                           &DecompositionPoint::i_tot, &DecompositionPoint::c}) {
            const double a = closed.*field, b = general.*field;
            worst = std::max(worst,
                             std::abs(a - b) /
                                 std::max({std::abs(a), std::abs(b), 1e-12}));
        }
    }
    table.row("closed forms vs engine", worst <= 1e-9,
              "max rel diff " + sci(worst));

    // equal-rate parameters go through the removable singularity
    const ResponseModel equal{0.1, 0.1, 10.0, 10.0};
    const ValidatedNetwork eq_net = validate(equal.to_network());
    double worst_eq = 0.0;
    for (double tau = 0.05; tau < 50.0; tau *= 1.7) {
        const DecompositionPoint closed =
            response::decompose_closed(equal, tau);
        const DecompositionPoint general = decompose(eq_net, "x", "y", tau);
        worst_eq = std::max(
            worst_eq, std::abs(closed.c - general.c) /
                          std::max({std::abs(closed.c), 1e-12}));
    }
    table.row("equal-rate limit handling", worst_eq <= 1e-9,
              "max rel diff " + sci(worst_eq));

    // no influence against the drive direction
    double worst_rev = std::abs(transfer_entropy(net, "y", "x", 1.0));
    for (double tau = 0.05; tau < 50.0; tau *= 1.5) {
        worst_rev = std::max(worst_rev,
                             std::abs(decompose(net, "y", "x", tau).c));
    }
    table.row("reverse direction influence-free", worst_rev <= 1e-10,
              "max |C| " + sci(worst_rev));

    table.row("influence starts at zero",
              decompose(net, "x", "y", 0.0).c == 0.0, "");

    // closure identities over the grid
    double worst_closure = 0.0;
    for (double tau = 0.02; tau < 60.0; tau *= 1.3) {
        const DecompositionPoint p = decompose(net, "x", "y", tau);
        worst_closure = std::max(
            worst_closure,
            std::abs(p.i_tot - (p.r_linear + p.u_x + p.u_y + p.s)));
        worst_closure =
            std::max(worst_closure, std::abs(p.i_lag - (p.r_linear + p.u_x)));
        worst_closure = std::max(worst_closure, std::abs(p.te - (p.u_x + p.s)));
    }
    table.row("decomposition closure", worst_closure <= 1e-9,
              "max defect " + sci(worst_closure));
}

void verify_stock_loop(VerifyTable& table) {
    FeedForwardLoop loop{10.0, 1.0, 1.0, 0.2, 0.2, 0.0, 10.0, 0.1, 0.1};
    std::vector<double> grid;
    for (double tau = 0.01; tau < 300.0; tau *= 1.35) {
        grid.push_back(tau);
    }
    const ffl::ZeroInfluenceReport report =
        ffl::verify_zero_influence(loop, grid);
    table.row("common parent carries no influence", report.pass,
              "closed " + sci(report.max_abs_c_closed) + ", engine " +
                  sci(report.max_abs_c_engine));

    loop.gamma = 1.0;
    const ffl::LoopCurveResult full = ffl::loop_curve(loop, grid);
    const bool shape = full.curve.points.front().c < full.curve.peak_c &&
                       full.curve.points.back().c < 0.1 * full.curve.peak_c &&
                       full.curve.peak_c > 0.0;
    table.row("loop influence single-peaked", shape,
              "peak " + sci(full.curve.peak_c) + " at tau " +
                  sci(full.curve.tau_res));
    table.row("loop null directions", full.max_abs_null_c <= 1e-9,
              "max |C| " + sci(full.max_abs_null_c));
}

void verify_user_network(VerifyTable& table, const ValidatedNetwork& net) {
    std::vector<double> grid;
    const double t_char = net.characteristic_time();
    for (double tau = 1e-3 * t_char; tau < 30.0 * t_char; tau *= 1.6) {
        grid.push_back(tau);
    }
    double worst_closure = 0.0, worst_null = 0.0;
    for (int s = 0; s < net.size(); ++s) {
        for (int d = 0; d < net.size(); ++d) {
            if (s == d) {
                continue;
            }
            const std::string src = net.name(s), dst = net.name(d);
            const ParentSet anc = net.parents({dst});
            const bool influences = anc.contains(src);
            for (double tau : grid) {
                const DecompositionPoint p =
                    decompose(net, src, dst, tau, true);
                if (std::isfinite(p.i_tot)) {
                    worst_closure = std::max(
                        worst_closure,
                        std::abs(p.i_tot -
                                 (p.r_linear + p.u_x + p.u_y + p.s)));
                }
                if (!influences) {
                    worst_null = std::max(worst_null, std::abs(p.c));
                }
            }
        }
    }
    table.row("network closure identities", worst_closure <= 1e-9,
              "max defect " + sci(worst_closure));
    table.row("network non-influence pairs at zero", worst_null <= 1e-9,
              "max |C| " + sci(worst_null));
}

}  // namespace

int run_verify(const RunConfig& cfg) {
    VerifyTable table;
    if (!cfg.network_path.empty()) {
        // validation failures surface before any check runs
        const ValidatedNetwork net = validate(load_network(cfg.network_path));
        verify_user_network(table, net);
    }
    verify_stock_pair(table);
    verify_stock_loop(table);
    std::cout << table.out.str();
    std::cout << (table.all_pass ? "all checks passed\n"
                                 : "some checks FAILED\n");
    return table.all_pass ? kExitOk : kExitNumerical;
}

int dispatch(const RunConfig& cfg) {
    try {
        if (cfg.command == "analyze") {
            return run_analyze(cfg);
        }
        if (cfg.command == "simulate") {
            return run_simulate(cfg);
        }
        if (cfg.command == "estimate") {
            return run_estimate(cfg);
        }
        if (cfg.command == "capacity") {
            return run_capacity(cfg);
        }
        if (cfg.command == "verify") {
            return run_verify(cfg);
        }
        std::cerr << "unknown command '" << cfg.command << "'\n";
        return kExitUsage;
    } catch (const CycleDetected& e) {
        std::cerr << "invalid network: " << e.what() << '\n';
        return kExitBadNetwork;
    } catch (const NonPositiveDecay& e) {
        std::cerr << "invalid network: " << e.what() << '\n';
        return kExitBadNetwork;
    } catch (const RootWithoutNoise& e) {
        std::cerr << "invalid network: " << e.what() << '\n';
        return kExitBadNetwork;
    } catch (const DuplicateNode& e) {
        std::cerr << "invalid network: " << e.what() << '\n';
        return kExitBadNetwork;
    } catch (const DuplicateEdge& e) {
        std::cerr << "invalid network: " << e.what() << '\n';
        return kExitBadNetwork;
    } catch (const UnknownNode& e) {
        std::cerr << "invalid network: " << e.what() << '\n';
        return kExitBadNetwork;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace causalflow
