#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "causalflow/gausscov.hpp"
#include "causalflow/network.hpp"

namespace causalflow {

inline constexpr double kInfiniteInformation =
    std::numeric_limits<double>::infinity();

// All scalar measures at one lag, in nats. i_tot (and fields derived from
// it) may be the distinguished infinite value when the target's future is a
// deterministic function of the conditioning set, which happens exactly at
// tau = 0.
struct DecompositionPoint {
    double tau = 0.0;
    double i_lag = 0.0;     // I(x(t); y(t+tau) | parents)
    double te = 0.0;        // I(x(t); y(t+tau) | y(t), parents)
    double i_tot = 0.0;     // I((x(t), y(t)); y(t+tau) | parents)
    double i_xy = 0.0;      // I(x(t); y(t) | parents)
    double r_linear = 0.0;  // shared-source redundancy
    double r_wb = 0.0;      // min-information redundancy baseline
    double u_x = 0.0;       // unique information of the source = c
    double u_y = 0.0;       // unique information of the target's present
    double s = 0.0;         // synergy; negative past the te/c crossing
    double c = 0.0;         // causal influence
};

struct DecompositionCurve {
    std::string source;
    std::string target;
    ParentSet conditioned_on;
    std::vector<DecompositionPoint> points;
    double tau_opt = 0.0;  // argmax of i_lag on the grid (ties: smaller tau)
    double tau_res = 0.0;  // argmax of c on the grid
    double peak_i = 0.0;
    double peak_c = 0.0;
};

// I(A; B | given) = 1/2 ln(det S_A|g det S_B|g / det S_AB|g), nonnegative,
// clamped at zero against rounding. Returns kInfiniteInformation when the
// joint conditional covariance is singular while both marginals are regular
// (a deterministic relation between A and B).
double gaussian_mi(const CovarianceMatrix& joint,
                   std::span<const VariableTag> a,
                   std::span<const VariableTag> b,
                   std::span<const VariableTag> given);

// I(src(t); dst(t+tau) | dst(t), extra(t)); requires tau > 0,
// DeterministicRelation at tau == 0 where the conditioned future is a point
// mass.
double transfer_entropy(const ValidatedNetwork& net, const std::string& src,
                        const std::string& dst, double tau,
                        std::span<const std::string> extra_conditioning = {});

// Redundancy from the two-source mutual information and the total
// information on the output:
//   R = 1/2 ln(e^{2(Ixy+Itot)} / (e^{2 Ixy} + e^{2 Itot} - 1)).
// Evaluated as min - 1/2 log1p(e^{-2(M-m)} - e^{-2M}) with m = min, M = max,
// which is symmetric, keeps 0 <= R <= min exactly, and gives
// R(ixy, +inf) = ixy without cancellation.
double linear_redundancy(double i_xy, double i_tot);

// Minimum-information redundancy: min of the two source-output informations.
double wb_redundancy(double i_x_out, double i_y_out);

// Full decomposition at one lag. With condition_parents set, every measure
// is conditioned on parents(net, {src, dst}) at time t.
DecompositionPoint decompose(const ValidatedNetwork& net,
                             const std::string& src, const std::string& dst,
                             double tau, bool condition_parents = false);

// Pointwise decomposition over a strictly increasing lag grid plus argmax
// summaries.
DecompositionCurve decompose_curve(const ValidatedNetwork& net,
                                   const std::string& src,
                                   const std::string& dst,
                                   std::span<const double> tau_grid,
                                   bool condition_parents = false);

// Shared pipeline: assembles a DecompositionPoint from conditional variances
// of the target's future and present. fv_* are var(y(t+tau) | set(t)) for
// the conditioning sets P, P+x, P+y, P+xy; pv_* are present-time variances
// of y. Closure identities hold by construction. Used by both the exact
// engine and the sample-covariance estimator.
DecompositionPoint assemble_point(double tau, double fv_p, double fv_px,
                                  double fv_py, double fv_pxy, double pv_p,
                                  double pv_px, double stationary_var,
                                  bool future_is_duplicate);

namespace detail {
// Lag grid helper shared by curves: argmax with ties toward smaller tau.
std::size_t argmax_small_tie(std::span<const double> values);
}  // namespace detail

}  // namespace causalflow
