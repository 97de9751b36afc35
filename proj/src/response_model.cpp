#include "causalflow/response_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "causalflow/errors.hpp"
#include "causalflow/numeric.hpp"

namespace causalflow {

void ResponseModel::check() const {
    if (alpha == 0.0 || !std::isfinite(alpha)) {
        throw std::invalid_argument("coupling alpha must be nonzero");
    }
    if (!(beta > 0.0) || !(t_rel > 0.0) || !(d > 0.0)) {
        throw std::invalid_argument(
            "response model needs beta > 0, t_rel > 0, d > 0");
    }
}

double ResponseModel::sigma_y2() const {
    const double x = product();
    return alpha * alpha * t_rel * sigma_x2() / (beta * (x + 1.0));
}

double ResponseModel::cov_xy() const {
    return alpha * t_rel * sigma_x2() / (product() + 1.0);
}

LinearNetwork ResponseModel::to_network(const std::string& x_name,
                                        const std::string& y_name) const {
    check();
    LinearNetwork net;
    net.nodes.push_back({x_name, 1.0 / t_rel, d});
    net.nodes.push_back({y_name, beta, 0.0});
    net.edges.push_back({x_name, y_name, alpha});
    return net;
}

namespace response {

double response_weight(double tau, double beta, double t_rel) {
    const double h = beta - 1.0 / t_rel;
    if (std::abs(h * tau) < 0.1) {
        return tau * std::exp(-beta * tau) * num::phi1(h * tau);
    }
    return (std::exp(-tau / t_rel) - std::exp(-beta * tau)) / h;
}

namespace {

// Series coefficients of var(y(t+tau)|x(t),y(t)) / (alpha^2 sigma_x^2).
// Evaluated in extended precision: the closed exponential form loses all
// significant digits as tau -> 0 (the value decays like tau^3 while its
// terms stay O(tau)), and the series coefficients themselves come from a
// cancelling convolution.
double residual_var_series(double tau, double beta, double t_rel) {
    constexpr int kMax = 44;
    using real = long double;
    const real b = beta;
    const real ir = real(1) / real(t_rel);
    const real k = b + ir;

    real fact[kMax + 2];
    fact[0] = 1;
    for (int j = 1; j <= kMax + 1; ++j) {
        fact[j] = fact[j - 1] * j;
    }

    // w: tau-series of the response weight; e: of e^{-beta tau};
    // t: of (1 - e^{-2 beta tau})/(2 beta).
    real w[kMax + 1], e[kMax + 1], t[kMax + 1];
    w[0] = 0;
    e[0] = 1;
    t[0] = 0;
    for (int j = 1; j <= kMax; ++j) {
        real s = 0;
        real p = 1;  // ir^i
        for (int i = 0; i < j; ++i) {
            real q = 1;  // b^(j-1-i)
            for (int m = 0; m < j - 1 - i; ++m) {
                q *= b;
            }
            s += p * q;
            p *= ir;
        }
        const real sign = (j % 2 == 0) ? real(-1) : real(1);
        w[j] = sign * s / fact[j];
        e[j] = ((j % 2 == 0) ? real(1) : real(-1));
        for (int m = 0; m < j; ++m) {
            e[j] *= b;
        }
        e[j] /= fact[j];
        real twob = 1;
        for (int m = 0; m < j - 1; ++m) {
            twob *= 2 * b;
        }
        t[j] = sign * twob / fact[j];
    }

    real g = 0;
    const real tl = tau;
    for (int j = kMax; j >= 3; --j) {
        real v = t[j];
        for (int i = 0; i <= j; ++i) {
            v -= e[i] * w[j - i];
        }
        real w2 = 0;
        for (int i = 1; i < j; ++i) {
            w2 += w[i] * w[j - i];
        }
        const real c = 2 * v / k - w2;
        g = g * tl + c;
    }
    g *= tl * tl * tl;
    return static_cast<double>(g);
}

}  // namespace

double driven_residual_var(double tau, double beta, double t_rel) {
    if (tau < 0.0) {
        throw std::invalid_argument("driven_residual_var needs tau >= 0");
    }
    if (tau == 0.0) {
        return 0.0;
    }
    const double k = beta + 1.0 / t_rel;
    if (k * tau <= 0.5) {
        return residual_var_series(tau, beta, t_rel);
    }
    const double w = response_weight(tau, beta, t_rel);
    const double e2 = std::exp(-beta * tau);
    const double t1 = tau * num::phi1(-2.0 * beta * tau);
    const double v = t1 - e2 * w;
    const double g = 2.0 * v / k - w * w;
    if (!(g > 0.0)) {
        throw NumericalFailure("residual variance came out nonpositive");
    }
    return g;
}

double conditional_mean_past(const ResponseModel& p, double x_now,
                             double tau) {
    if (tau < 0.0) {
        throw std::invalid_argument("conditional_mean_past needs tau >= 0");
    }
    const double x = p.product();
    return x_now * (p.alpha * p.t_rel / (x + 1.0)) * std::exp(-tau / p.t_rel);
}

namespace {

// Regression slope of y(t+tau) on x(t): decayed equal-time response plus
// the freshly integrated signal.
double future_slope(const ResponseModel& p, double tau) {
    const double x = p.product();
    return p.alpha * response_weight(tau, p.beta, p.t_rel) +
           std::exp(-p.beta * tau) * p.alpha * p.t_rel / (x + 1.0);
}

double stable_log1p_over(double w) {
    if (std::abs(w) < 1e-4) {
        return 1.0 - w / 2.0 + w * w / 3.0 - w * w * w / 4.0;
    }
    return std::log1p(w) / w;
}

}  // namespace

double conditional_mean_future(const ResponseModel& p, double x_now,
                               double tau) {
    if (tau < 0.0) {
        throw std::invalid_argument("conditional_mean_future needs tau >= 0");
    }
    return x_now * future_slope(p, tau);
}

double mutual_information_equal_time(const ResponseModel& p) {
    return 0.5 * std::log1p(p.product());
}

double lagged_mi(const ResponseModel& p, double shift) {
    const double x = p.product();
    if (shift < 0.0) {
        const double c2 =
            (x / (x + 1.0)) * std::exp(2.0 * shift / p.t_rel);
        return -0.5 * std::log1p(-c2);
    }
    const double sx2 = p.sigma_x2();
    const double g =
        p.alpha * p.alpha * sx2 *
        driven_residual_var(shift, p.beta, p.t_rel);
    const double e2 = std::exp(-p.beta * shift);
    const double vary_x = p.sigma_y2() / (x + 1.0);
    const double fv_x = e2 * e2 * vary_x + g;
    return 0.5 * std::log(p.sigma_y2() / fv_x);
}

double tau_opt(double beta_t_rel, double t_rel) {
    const double eps = beta_t_rel - 1.0;
    const double w = eps / (2.0 + eps);
    return t_rel * stable_log1p_over(w) / (2.0 + eps);
}

double tau_opt(const ResponseModel& p) { return tau_opt(p.product(), p.t_rel); }

double i_opt(double beta_t_rel) {
    const double eps = beta_t_rel - 1.0;
    const double w = eps / (2.0 + eps);
    // exponent * ln(base) of the peak correlation collapses to
    // -log1p(w)/w, removing the eps = 0 singularity analytically
    const double pe = std::exp(-stable_log1p_over(w));
    return -0.5 * std::log1p(-2.0 * pe);
}

double i_opt(const ResponseModel& p) { return i_opt(p.product()); }

double te_closed_form(const ResponseModel& p, double tau) {
    if (!(tau > 0.0)) {
        throw DeterministicRelation(
            "transfer entropy closed form needs tau > 0");
    }
    const double x = p.product();
    const double w = response_weight(tau, p.beta, p.t_rel);
    const double g = driven_residual_var(tau, p.beta, p.t_rel);
    return 0.5 * std::log1p(w * w / ((x + 1.0) * g));
}

double snr(const ResponseModel& p, double shift) {
    const double sx2 = p.sigma_x2();
    if (shift < 0.0) {
        const double slope = (p.alpha * p.t_rel / (p.product() + 1.0)) *
                             std::exp(shift / p.t_rel);
        const double resid = p.sigma_y2() - slope * slope * sx2;
        return slope * slope * sx2 / resid;
    }
    const double slope = future_slope(p, shift);
    const double g = p.alpha * p.alpha * sx2 *
                     driven_residual_var(shift, p.beta, p.t_rel);
    const double e2 = std::exp(-p.beta * shift);
    const double vary_x = p.sigma_y2() / (p.product() + 1.0);
    const double resid = e2 * e2 * vary_x + g;
    return slope * slope * sx2 / resid;
}

DecompositionPoint decompose_closed(const ResponseModel& p, double tau) {
    if (tau < 0.0) {
        throw std::invalid_argument("decompose_closed needs tau >= 0");
    }
    const double x = p.product();
    const double sx2 = p.sigma_x2();
    const double sy2 = p.sigma_y2();
    const double varx_y = sx2 / (x + 1.0);
    const double vary_x = sy2 / (x + 1.0);
    const double w = response_weight(tau, p.beta, p.t_rel);
    const double e2 = std::exp(-p.beta * tau);
    const double g = p.alpha * p.alpha * sx2 *
                     driven_residual_var(tau, p.beta, p.t_rel);

    const double fv_pxy = g;
    const double fv_py = p.alpha * p.alpha * w * w * varx_y + g;
    const double fv_px = e2 * e2 * vary_x + g;
    DecompositionPoint pt = assemble_point(tau, sy2, fv_px, fv_py, fv_pxy, sy2,
                                           vary_x, sy2, tau == 0.0);
    if (tau == 0.0) {
        // noiseless response: the zero-lag transfer entropy limit diverges
        pt.te = kInfiniteInformation;
        pt.s = kInfiniteInformation;
    }
    return pt;
}

CapacityResult causation_capacity(std::span<const double> beta_t_rel_grid) {
    CapacityResult result;
    for (double x : beta_t_rel_grid) {
        if (!(x > 0.0)) {
            throw std::invalid_argument("beta*t_rel grid must be positive");
        }
        ResponseModel model{1.0, x, 1.0, 1.0};  // t_rel = 1 time units
        const double t_fast = std::min(1.0, 1.0 / x);
        const double t_slow = std::max(1.0, 1.0 / x);
        num::Maximum peak = num::grid_refine_max(
            [&model](double tau) { return decompose_closed(model, tau).c; },
            1e-3 * t_fast, 30.0 * t_slow, 200, 1e-9 * t_fast);
        CapacityPoint pt;
        pt.beta_t_rel = x;
        pt.peak_c = peak.value;
        pt.tau_res = peak.arg;
        pt.i_opt = i_opt(x);
        result.points.push_back(pt);
    }
    const std::size_t n = result.points.size();
    if (n >= 2) {
        const CapacityPoint& last = result.points[n - 1];
        const CapacityPoint& prev = result.points[n - 2];
        if (last.beta_t_rel > 10.0 && prev.beta_t_rel > 10.0 &&
            last.beta_t_rel != prev.beta_t_rel) {
            const double l1 = 1.0 / std::log(prev.beta_t_rel);
            const double l2 = 1.0 / std::log(last.beta_t_rel);
            result.estimate = last.peak_c + (last.peak_c - prev.peak_c) *
                                                l2 / (l1 - l2);
        }
    }
    return result;
}

}  // namespace response
}  // namespace causalflow
