#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace causalflow {

enum class GridScale { linear, log };

// Parsed command line; defaults match the documented flag defaults.
struct RunConfig {
    std::string command;
    std::string network_path;
    std::string source;
    std::string target;
    std::optional<double> tau_min;
    std::optional<double> tau_max;
    int tau_steps = 256;
    GridScale tau_scale = GridScale::log;
    bool condition_parents = false;
    std::string out_path;
    std::string svg_path;
    std::string trajectory_path;  // input of `estimate`
    std::uint64_t seed = 1;
    double dt = 0.1;
    int steps = 10000;
    int n_traj = 1;
    std::string scheme = "exact";
    std::vector<double> capacity_grid;  // beta*t_rel values
};

// Exit codes: 0 success, 1 usage error, 2 invalid network, 3 numerical
// failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitBadNetwork = 2;
inline constexpr int kExitNumerical = 3;

int run_analyze(const RunConfig& cfg);
int run_simulate(const RunConfig& cfg);
int run_estimate(const RunConfig& cfg);
int run_capacity(const RunConfig& cfg);
int run_verify(const RunConfig& cfg);

// Resolves the lag grid for a network: explicit bounds when given,
// otherwise 256 log-spaced points on [1e-3, 30] * characteristic time.
std::vector<double> make_tau_grid(const RunConfig& cfg, double t_char);

int dispatch(const RunConfig& cfg);

}  // namespace causalflow
