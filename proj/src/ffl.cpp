#include "causalflow/ffl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "causalflow/errors.hpp"
#include "causalflow/numeric.hpp"
#include "causalflow/response_model.hpp"

namespace causalflow {

void FeedForwardLoop::check() const {
    if (!(t_rel > 0.0) || !(beta_x > 0.0) || !(beta_y > 0.0)) {
        throw std::invalid_argument(
            "feed-forward loop needs t_rel, beta_x, beta_y > 0");
    }
    if (!(d_z > 0.0) || d_x < 0.0 || d_y < 0.0) {
        throw std::invalid_argument(
            "feed-forward loop needs d_z > 0 and d_x, d_y >= 0");
    }
}

LinearNetwork FeedForwardLoop::to_network() const {
    check();
    LinearNetwork net;
    net.nodes.push_back({"z", 1.0 / t_rel, d_z});
    net.nodes.push_back({"x", beta_x, d_x});
    net.nodes.push_back({"y", beta_y, d_y});
    net.edges.push_back({"z", "x", alpha_x});
    net.edges.push_back({"z", "y", alpha_y});
    net.edges.push_back({"x", "y", gamma});
    return net;
}

namespace ffl {

namespace {

void require_gamma_zero(const FeedForwardLoop& p) {
    p.check();
    if (p.gamma != 0.0) {
        throw GammaNonZero(
            "closed forms hold for gamma == 0 only; use the general engine");
    }
}

double stationary_var(double drive_var, double alpha, double beta,
                      double t_rel, double d_own) {
    return drive_var * alpha * alpha * t_rel / (beta * (1.0 + beta * t_rel)) +
           d_own / (2.0 * beta);
}

// Regression slope of n(t+tau) on z(t) for a node driven by z.
double slope_on_parent(double alpha, double beta, double t_rel, double tau) {
    return alpha * response::response_weight(tau, beta, t_rel) +
           std::exp(-beta * tau) * alpha * t_rel / (beta * t_rel + 1.0);
}

double corr_information(double cov, double var_a, double var_b) {
    if (cov == 0.0) {
        return 0.0;
    }
    if (!(var_a > 0.0) || !(var_b > 0.0)) {
        throw SingularConditioning(
            "degenerate conditional variance in closed-form measures");
    }
    const double rho2 = cov * cov / (var_a * var_b);
    if (rho2 >= 1.0) {
        return kInfiniteInformation;
    }
    return -0.5 * std::log1p(-rho2);
}

}  // namespace

double cond_sigma_y(const FeedForwardLoop& p) {
    require_gamma_zero(p);
    return stationary_var(p.sigma_z2(), p.alpha_y, p.beta_y, p.t_rel, p.d_y);
}

double cond_cross_moment(const FeedForwardLoop& p, double tau) {
    require_gamma_zero(p);
    if (tau < 0.0) {
        throw std::invalid_argument("cond_cross_moment needs tau >= 0");
    }
    return p.sigma_z2() * 2.0 * p.alpha_x * p.alpha_y * p.t_rel *
           std::exp(-p.beta_y * tau) /
           ((p.beta_x * p.t_rel + 1.0) * (p.beta_y * p.t_rel + 1.0) *
            (p.beta_x + p.beta_y));
}

ConditionedMeasures cond_measures(const FeedForwardLoop& p, double tau) {
    require_gamma_zero(p);
    if (!(tau > 0.0)) {
        throw std::invalid_argument("cond_measures needs tau > 0");
    }
    const double sz2 = p.sigma_z2();
    const double sx2 =
        stationary_var(sz2, p.alpha_x, p.beta_x, p.t_rel, p.d_x);
    const double sy2 =
        stationary_var(sz2, p.alpha_y, p.beta_y, p.t_rel, p.d_y);
    const double kx0 = p.alpha_x * p.t_rel / (p.beta_x * p.t_rel + 1.0);
    const double ky0 = p.alpha_y * p.t_rel / (p.beta_y * p.t_rel + 1.0);
    const double varx_z = sx2 - sz2 * kx0 * kx0;
    const double vary_z = sy2 - sz2 * ky0 * ky0;

    ConditionedMeasures out;
    out.i_xy = corr_information(cond_cross_moment(p, 0.0), varx_z, vary_z);

    const double ky_tau = slope_on_parent(p.alpha_y, p.beta_y, p.t_rel, tau);
    const double vary_tau_z = sy2 - sz2 * ky_tau * ky_tau;
    out.i_lag =
        corr_information(cond_cross_moment(p, tau), varx_z, vary_tau_z);

    // var(y(t+tau) | x(t), y(t), z(t)) = var(y(t+tau) | y(t), z(t)):
    // accumulated parent fluctuations plus own noise.
    const double vary_tau_yz =
        sz2 * p.alpha_y * p.alpha_y *
            response::driven_residual_var(tau, p.beta_y, p.t_rel) +
        p.d_y * tau * num::phi1(-2.0 * p.beta_y * tau);
    if (!(vary_tau_yz > 0.0) || !(vary_tau_z > 0.0)) {
        throw SingularConditioning(
            "degenerate conditional variance in closed-form measures");
    }
    out.i_tot = 0.5 * std::log(vary_tau_z / vary_tau_yz);
    if (out.i_tot < 0.0) {
        // the two variances converge at long lags; rounding may cross zero
        if (out.i_tot < -1e3 * num::epsilon()) {
            throw NumericalFailure("conditioned total information negative");
        }
        out.i_tot = 0.0;
    }
    return out;
}

ZeroInfluenceReport verify_zero_influence(const FeedForwardLoop& p,
                                          std::span<const double> tau_grid) {
    require_gamma_zero(p);
    const ValidatedNetwork net = validate(p.to_network());

    ZeroInfluenceReport report;
    report.tolerance = 1e3 * num::epsilon();  // 1e-9 nats
    for (double tau : tau_grid) {
        double c_closed = 0.0;
        if (tau > 0.0) {
            const ConditionedMeasures m = cond_measures(p, tau);
            c_closed = m.i_lag - linear_redundancy(m.i_xy, m.i_tot);
        }
        const double c_engine = decompose(net, "x", "y", tau, true).c;
        report.max_abs_c_closed =
            std::max(report.max_abs_c_closed, std::abs(c_closed));
        report.max_abs_c_engine =
            std::max(report.max_abs_c_engine, std::abs(c_engine));
    }
    report.pass = report.max_abs_c_closed <= report.tolerance &&
                  report.max_abs_c_engine <= report.tolerance;
    return report;
}

LoopCurveResult loop_curve(const FeedForwardLoop& p,
                           std::span<const double> tau_grid) {
    p.check();
    const ValidatedNetwork net = validate(p.to_network());
    LoopCurveResult result;
    result.curve = decompose_curve(net, "x", "y", tau_grid, true);
    // Directions with no influence path must come out at zero whatever the
    // correlations: y -> x, x -> z, y -> z.
    for (const auto& [src, dst] : std::initializer_list<
             std::pair<const char*, const char*>>{
             {"y", "x"}, {"x", "z"}, {"y", "z"}}) {
        const DecompositionCurve c =
            decompose_curve(net, src, dst, tau_grid, true);
        for (const DecompositionPoint& pt : c.points) {
            result.max_abs_null_c =
                std::max(result.max_abs_null_c, std::abs(pt.c));
        }
    }
    return result;
}

}  // namespace ffl
}  // namespace causalflow
