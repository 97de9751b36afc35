#pragma once

#include <optional>
#include <span>
#include <vector>

#include "causalflow/measures.hpp"
#include "causalflow/network.hpp"

namespace causalflow {

// Two-node linear response model: an exponentially correlated signal x
// (relaxation time t_rel, diffusion d) driving a deterministic response y,
//   dx/dt = -x/t_rel + sqrt(d) * noise,   dy/dt = alpha x - beta y.
// Everything below is in closed form; the module doubles as an independent
// oracle for the general Gaussian engine.
struct ResponseModel {
    double alpha = 0.0;  // coupling rate, != 0
    double beta = 0.0;   // response decay, > 0
    double t_rel = 0.0;  // signal relaxation time, > 0
    double d = 0.0;      // signal diffusion, > 0

    // throws std::invalid_argument on a bad parameter set
    void check() const;

    double product() const { return beta * t_rel; }  // the only shape knob
    double sigma_x2() const { return d * t_rel / 2.0; }
    double sigma_y2() const;
    double cov_xy() const;  // stationary <x y>

    LinearNetwork to_network(const std::string& x_name = "x",
                             const std::string& y_name = "y") const;
};

namespace response {

// Response weight W(tau) = integral_0^tau e^{-s/t_rel} e^{-beta (tau-s)} ds:
// the coefficient of x(t) in the conditional mean of y(t+tau) beyond the
// decayed present response. Continuous through beta * t_rel = 1.
double response_weight(double tau, double beta, double t_rel);

// var(y(t+tau) | x(t), y(t)) / (alpha^2 sigma_x^2): the accumulated effect
// of signal fluctuations the present state cannot predict. Evaluated by a
// truncated series in extended precision for small lags and by a stable
// exponential form otherwise; relative accuracy holds down to tau -> 0
// where the value decays like tau^3.
double driven_residual_var(double tau, double beta, double t_rel);

// <y(t-tau) | x(t)> = x_now * (alpha t_rel / (beta t_rel + 1)) e^{-tau/t_rel}
double conditional_mean_past(const ResponseModel& p, double x_now, double tau);

// <y(t+tau) | x(t)>; the regression slope is alpha W(tau) + e^{-beta tau}
// alpha t_rel / (beta t_rel + 1).
double conditional_mean_future(const ResponseModel& p, double x_now,
                               double tau);

// I(x(t); y(t+shift)) in nats; negative shifts give the information on the
// signal's future carried by the response.
double lagged_mi(const ResponseModel& p, double shift);

// I(x(t); y(t)) = 1/2 ln(beta t_rel + 1).
double mutual_information_equal_time(const ResponseModel& p);

// Lag maximizing the lagged mutual information,
// t_rel/(beta t_rel - 1) ln(2 beta t_rel/(beta t_rel + 1)); always positive,
// t_rel/2 in the equal-rate limit.
double tau_opt(const ResponseModel& p);
double tau_opt(double beta_t_rel, double t_rel);

// Peak lagged information; depends only on beta * t_rel.
double i_opt(const ResponseModel& p);
double i_opt(double beta_t_rel);

// Transfer entropy I(x(t); y(t+tau) | y(t)), tau > 0.
double te_closed_form(const ResponseModel& p, double tau);

// Signal-to-noise ratio of the conditional estimate of y(t+shift) from
// x(t): (slope^2 sigma_x^2) / var(y(t+shift)|x(t)). Satisfies
// I = 1/2 ln(1 + SNR).
double snr(const ResponseModel& p, double shift);

// Full decomposition at one lag from closed forms only (no matrix algebra);
// mirrors measures::decompose on the two-node network.
DecompositionPoint decompose_closed(const ResponseModel& p, double tau);

struct CapacityPoint {
    double beta_t_rel = 0.0;
    double peak_c = 0.0;
    double tau_res = 0.0;
    double i_opt = 0.0;
};

struct CapacityResult {
    std::vector<CapacityPoint> points;
    // Limit estimate extrapolated over the largest decade of the grid
    // (two-point fit in 1/ln(beta t_rel)); absent for single-point grids.
    std::optional<double> estimate;
};

// Peak causal influence per beta*t_rel value (each with its own lag
// maximization, golden-section refined) plus the asymptote estimate.
CapacityResult causation_capacity(std::span<const double> beta_t_rel_grid);

}  // namespace response
}  // namespace causalflow
