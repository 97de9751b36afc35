#include "causalflow/measures.hpp"

#include <algorithm>
#include <cmath>

#include "causalflow/errors.hpp"
#include "causalflow/numeric.hpp"

namespace causalflow {

namespace {

// Clamp tiny negative information values produced by rounding; anything
// materially below zero is a genuine inconsistency.
double clamp_information(double value, double scale = 1.0) {
    if (value >= 0.0) {
        return value;
    }
    if (value >= -num::epsilon() * std::max(1.0, scale)) {
        return 0.0;
    }
    throw NumericalFailure("information measure came out negative: " +
                           std::to_string(value));
}

struct LogDet {
    double value = 0.0;
    bool singular = false;
};

LogDet log_det_psd(const Eigen::MatrixXd& s) {
    if (s.rows() == 0) {
        return {0.0, false};
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
    const double floor = num::conditioning_tol() * std::max(s.trace(), 0.0);
    LogDet out;
    for (int i = 0; i < s.rows(); ++i) {
        const double lambda = eig.eigenvalues()[i];
        if (lambda <= floor) {
            out.singular = true;
            return out;
        }
        out.value += std::log(lambda);
    }
    return out;
}

Eigen::MatrixXd submatrix(const CovarianceMatrix& cov,
                          std::span<const VariableTag> tags) {
    std::vector<int> idx;
    idx.reserve(tags.size());
    for (const VariableTag& tag : tags) {
        idx.push_back(cov.index(tag));
    }
    const int n = static_cast<int>(idx.size());
    Eigen::MatrixXd out(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out(i, j) = cov.values()(idx[static_cast<std::size_t>(i)],
                                     idx[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

}  // namespace

double gaussian_mi(const CovarianceMatrix& joint,
                   std::span<const VariableTag> a,
                   std::span<const VariableTag> b,
                   std::span<const VariableTag> given) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("gaussian_mi needs non-empty groups");
    }
    for (const VariableTag& ta : a) {
        for (const VariableTag& tb : b) {
            if (ta == tb) {
                throw std::invalid_argument("gaussian_mi groups overlap");
            }
        }
    }
    std::vector<VariableTag> both(a.begin(), a.end());
    both.insert(both.end(), b.begin(), b.end());
    const CovarianceMatrix cond = conditional_covariance(joint, both, given);

    std::vector<VariableTag> a_tags(a.begin(), a.end());
    std::vector<VariableTag> b_tags(b.begin(), b.end());
    const LogDet ld_a = log_det_psd(submatrix(cond, a_tags));
    const LogDet ld_b = log_det_psd(submatrix(cond, b_tags));
    const LogDet ld_ab = log_det_psd(cond.values());
    if (ld_a.singular || ld_b.singular) {
        throw SingularConditioning(
            "marginal covariance is singular; conditional information "
            "undefined");
    }
    if (ld_ab.singular) {
        return kInfiniteInformation;  // deterministic relation between A and B
    }
    const double mi = 0.5 * (ld_a.value + ld_b.value - ld_ab.value);
    return clamp_information(mi, std::abs(ld_a.value) + std::abs(ld_b.value));
}

double linear_redundancy(double i_xy, double i_tot) {
    if (i_xy < 0.0 || i_tot < 0.0 || std::isnan(i_xy) || std::isnan(i_tot)) {
        throw std::invalid_argument(
            "linear_redundancy needs nonnegative inputs");
    }
    const double m = std::min(i_xy, i_tot);
    const double big = std::max(i_xy, i_tot);
    if (std::isinf(big)) {
        return m;
    }
    // R = m - 1/2 log1p(e^{-2(M-m)} - e^{-2M}); symmetric, 0 <= R <= m.
    return m - 0.5 * std::log1p(std::exp(-2.0 * (big - m)) -
                                std::exp(-2.0 * big));
}

double wb_redundancy(double i_x_out, double i_y_out) {
    if (i_x_out < 0.0 || i_y_out < 0.0) {
        throw std::invalid_argument("wb_redundancy needs nonnegative inputs");
    }
    return std::min(i_x_out, i_y_out);
}

DecompositionPoint assemble_point(double tau, double fv_p, double fv_px,
                                  double fv_py, double fv_pxy, double pv_p,
                                  double pv_px, double stationary_var,
                                  bool future_is_duplicate) {
    DecompositionPoint pt;
    pt.tau = tau;
    pt.i_xy = clamp_information(0.5 * std::log(pv_p / pv_px));
    pt.i_lag = clamp_information(0.5 * std::log(fv_p / fv_px));

    // The conditional law of the future collapses to a point mass exactly at
    // zero lag (duplicate variable) or when no noise reaches the target.
    const bool deterministic = future_is_duplicate || fv_pxy <= 0.0;
    if (deterministic) {
        pt.i_tot = kInfiniteInformation;
        pt.r_linear = linear_redundancy(pt.i_xy, pt.i_tot);  // == i_xy
        pt.u_x = pt.i_lag - pt.r_linear;
        pt.c = pt.u_x;
        // The target's own present pins its immediate future completely, so
        // the conditional law collapses on both sides of the te ratio; the
        // lag-to-zero limit is divergent only when fv_py stays positive.
        pt.te = fv_py <= num::deterministic_var_tol() * stationary_var
                    ? 0.0
                    : kInfiniteInformation;
        pt.s = pt.te - pt.u_x;
        pt.u_y = kInfiniteInformation;
        pt.r_wb = wb_redundancy(pt.i_lag, kInfiniteInformation);
        return pt;
    }

    pt.i_tot = clamp_information(0.5 * std::log(fv_p / fv_pxy));
    pt.te = clamp_information(0.5 * std::log(fv_py / fv_pxy));
    const double i_y_out = clamp_information(0.5 * std::log(fv_p / fv_py));
    pt.r_linear = linear_redundancy(pt.i_xy, pt.i_tot);
    pt.u_x = pt.i_lag - pt.r_linear;
    pt.c = pt.u_x;
    pt.s = pt.te - pt.u_x;
    pt.u_y = pt.i_tot - pt.r_linear - pt.u_x - pt.s;
    pt.r_wb = wb_redundancy(pt.i_lag, i_y_out);
    return pt;
}

namespace {

struct PairContext {
    int src = -1;
    int dst = -1;
    std::vector<int> cond;  // parent indices
    bool target_noisy = false;
};

PairContext make_context(const GaussianEngine& engine, const std::string& src,
                         const std::string& dst, bool condition_parents) {
    const ValidatedNetwork& net = engine.network();
    PairContext ctx;
    ctx.src = net.index(src);
    ctx.dst = net.index(dst);
    if (ctx.src == ctx.dst) {
        throw std::invalid_argument("source and target must differ");
    }
    if (condition_parents) {
        const ParentSet parents = net.parents({src, dst});
        for (const std::string& p : parents.members) {
            ctx.cond.push_back(net.index(p));
        }
    }
    ctx.target_noisy = net.noise_diagonal()[ctx.dst] > 0.0;
    return ctx;
}

DecompositionPoint decompose_with(const GaussianEngine& engine,
                                  const PairContext& ctx, double tau) {
    if (tau < 0.0) {
        throw std::invalid_argument("decompose needs tau >= 0");
    }
    std::vector<int> p = ctx.cond;
    std::vector<int> px = p;
    px.push_back(ctx.src);
    std::vector<int> py = p;
    py.push_back(ctx.dst);
    std::vector<int> pxy = px;
    pxy.push_back(ctx.dst);

    const double fv_p = engine.future_var(ctx.dst, tau, p);
    const double fv_px = engine.future_var(ctx.dst, tau, px);
    const double fv_py = engine.future_var(ctx.dst, tau, py);
    const double fv_pxy = engine.future_var(ctx.dst, tau, pxy);
    const double pv_p = engine.present_var(ctx.dst, p);
    const double pv_px = engine.present_var(ctx.dst, px);
    const double stat_var = engine.stationary()(ctx.dst, ctx.dst);

    DecompositionPoint pt = assemble_point(tau, fv_p, fv_px, fv_py, fv_pxy,
                                           pv_p, pv_px, stat_var, tau == 0.0);
    if (tau == 0.0 && !ctx.target_noisy) {
        pt.te = kInfiniteInformation;  // divergent lag-to-zero limit
        pt.s = kInfiniteInformation;
    }
    return pt;
}

}  // namespace

double transfer_entropy(const ValidatedNetwork& net, const std::string& src,
                        const std::string& dst, double tau,
                        std::span<const std::string> extra_conditioning) {
    if (tau < 0.0) {
        throw std::invalid_argument("transfer_entropy needs tau > 0");
    }
    if (tau == 0.0) {
        throw DeterministicRelation(
            "transfer entropy is undefined at zero lag: the target's "
            "present determines its immediate future");
    }
    GaussianEngine engine(net);
    std::vector<int> base;
    for (const std::string& v : extra_conditioning) {
        base.push_back(net.index(v));
    }
    std::vector<int> with_dst = base;
    with_dst.push_back(net.index(dst));
    std::vector<int> full = with_dst;
    full.push_back(net.index(src));

    const double denom = engine.future_var(net.index(dst), tau, full);
    if (denom <= 0.0) {
        throw DeterministicRelation(
            "conditional future variance vanished; transfer entropy "
            "diverges");
    }
    const double num = engine.future_var(net.index(dst), tau, with_dst);
    return clamp_information(0.5 * std::log(num / denom));
}

DecompositionPoint decompose(const ValidatedNetwork& net,
                             const std::string& src, const std::string& dst,
                             double tau, bool condition_parents) {
    GaussianEngine engine(net);
    return decompose_with(engine, make_context(engine, src, dst,
                                               condition_parents),
                          tau);
}

namespace detail {

std::size_t argmax_small_tie(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

}  // namespace detail

DecompositionCurve decompose_curve(const ValidatedNetwork& net,
                                   const std::string& src,
                                   const std::string& dst,
                                   std::span<const double> tau_grid,
                                   bool condition_parents) {
    if (tau_grid.empty()) {
        throw std::invalid_argument("decompose_curve needs a non-empty grid");
    }
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        if (tau_grid[i] < 0.0 ||
            (i > 0 && tau_grid[i] <= tau_grid[i - 1])) {
            throw std::invalid_argument(
                "lag grid must be nonnegative and strictly increasing");
        }
    }
    GaussianEngine engine(net);
    const PairContext ctx = make_context(engine, src, dst, condition_parents);

    DecompositionCurve curve;
    curve.source = src;
    curve.target = dst;
    if (condition_parents) {
        curve.conditioned_on = net.parents({src, dst});
    }
    curve.points.reserve(tau_grid.size());
    std::vector<double> i_lags, cs;
    i_lags.reserve(tau_grid.size());
    cs.reserve(tau_grid.size());
    for (double tau : tau_grid) {
        curve.points.push_back(decompose_with(engine, ctx, tau));
        i_lags.push_back(curve.points.back().i_lag);
        cs.push_back(curve.points.back().c);
    }
    const std::size_t opt = detail::argmax_small_tie(i_lags);
    const std::size_t res = detail::argmax_small_tie(cs);
    curve.tau_opt = curve.points[opt].tau;
    curve.peak_i = curve.points[opt].i_lag;
    curve.tau_res = curve.points[res].tau;
    curve.peak_c = curve.points[res].c;
    return curve;
}

}  // namespace causalflow
