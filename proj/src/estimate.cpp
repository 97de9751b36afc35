#include "causalflow/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "causalflow/errors.hpp"
#include "causalflow/gausscov.hpp"

namespace causalflow {

namespace {

int label_index(const TrajectoryEnsemble& ens, const std::string& name) {
    for (std::size_t i = 0; i < ens.labels.size(); ++i) {
        if (ens.labels[i] == name) {
            return static_cast<int>(i);
        }
    }
    throw UnknownNode("trajectory data has no variable '" + name + "'");
}

}  // namespace

LaggedSampleCov sample_lagged_cov(const TrajectoryEnsemble& ens,
                                  std::span<const std::string> vars_now,
                                  std::span<const std::string> vars_later,
                                  int lag_steps,
                                  double slowest_time_constant) {
    if (lag_steps < 0) {
        throw std::invalid_argument("lag_steps must be >= 0");
    }
    const int rows = ens.steps + 1;
    if (lag_steps >= rows) {
        throw InsufficientData("lag of " + std::to_string(lag_steps) +
                               " steps exceeds trajectory length");
    }
    std::vector<int> idx_now, idx_later;
    for (const std::string& v : vars_now) {
        idx_now.push_back(label_index(ens, v));
    }
    for (const std::string& v : vars_later) {
        idx_later.push_back(label_index(ens, v));
    }
    const int a = static_cast<int>(idx_now.size());
    const int b = static_cast<int>(idx_later.size());
    const int d = a + b;
    const int window = rows - lag_steps;
    const long pairs = static_cast<long>(window) * ens.n_traj;
    if (pairs < 10) {
        throw InsufficientData("need at least 10 sample pairs, have " +
                               std::to_string(pairs));
    }

    // pooled means over the windows actually used
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const Eigen::MatrixXd& traj : ens.data) {
        for (int j = 0; j < window; ++j) {
            for (int i = 0; i < a; ++i) {
                mean[i] += traj(j, idx_now[static_cast<std::size_t>(i)]);
            }
            for (int i = 0; i < b; ++i) {
                mean[a + i] +=
                    traj(j + lag_steps, idx_later[static_cast<std::size_t>(i)]);
            }
        }
    }
    mean /= static_cast<double>(pairs);

    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd sample(d);
    for (const Eigen::MatrixXd& traj : ens.data) {
        for (int j = 0; j < window; ++j) {
            for (int i = 0; i < a; ++i) {
                sample[i] = traj(j, idx_now[static_cast<std::size_t>(i)]);
            }
            for (int i = 0; i < b; ++i) {
                sample[a + i] =
                    traj(j + lag_steps, idx_later[static_cast<std::size_t>(i)]);
            }
            sample -= mean;
            scatter.selfadjointView<Eigen::Lower>().rankUpdate(sample);
        }
    }
    scatter = scatter.selfadjointView<Eigen::Lower>();

    LaggedSampleCov out;
    out.labels_now.assign(vars_now.begin(), vars_now.end());
    out.labels_later.assign(vars_later.begin(), vars_later.end());
    out.lag_steps = lag_steps;
    out.values = scatter / static_cast<double>(pairs - 1);
    out.pair_count = pairs;
    const double per_sample =
        slowest_time_constant > 0.0
            ? std::min(1.0, ens.dt / (2.0 * slowest_time_constant))
            : 1.0;
    out.effective_n = std::max(1.0, static_cast<double>(pairs) * per_sample);
    return out;
}

DecompositionPoint empirical_decomposition(const TrajectoryEnsemble& ens,
                                           const ValidatedNetwork& net,
                                           const std::string& src,
                                           const std::string& dst,
                                           int lag_steps,
                                           bool condition_parents,
                                           double* effective_n_out) {
    if (src == dst) {
        throw std::invalid_argument("source and target must differ");
    }
    std::vector<std::string> now_vars;
    if (condition_parents) {
        now_vars = net.parents({src, dst}).members;
    }
    const int n_parents = static_cast<int>(now_vars.size());
    now_vars.push_back(src);
    now_vars.push_back(dst);
    const std::vector<std::string> later_vars = {dst};

    const LaggedSampleCov cov = sample_lagged_cov(
        ens, now_vars, later_vars, lag_steps, net.characteristic_time());
    if (effective_n_out != nullptr) {
        *effective_n_out = cov.effective_n;
    }

    // joint order: parents..., src, dst, dst(t+tau)
    const int i_src = n_parents;
    const int i_dst = n_parents + 1;
    const int i_fut = n_parents + 2;
    std::vector<int> p_idx(static_cast<std::size_t>(n_parents));
    for (int i = 0; i < n_parents; ++i) {
        p_idx[static_cast<std::size_t>(i)] = i;
    }
    auto with = [&p_idx](std::initializer_list<int> extra) {
        std::vector<int> v = p_idx;
        v.insert(v.end(), extra.begin(), extra.end());
        return v;
    };
    const Eigen::MatrixXd& joint = cov.values;
    auto var_given = [&joint](int target, const std::vector<int>& given) {
        return schur_conditioned(joint, given)(target, target);
    };

    const double fv_p = var_given(i_fut, with({}));
    const double fv_px = var_given(i_fut, with({i_src}));
    const double fv_py = var_given(i_fut, with({i_dst}));
    const double fv_pxy = var_given(i_fut, with({i_src, i_dst}));
    const double pv_p = var_given(i_dst, with({}));
    const double pv_px = var_given(i_dst, with({i_src}));

    DecompositionPoint pt =
        assemble_point(lag_steps * ens.dt, fv_p, fv_px, fv_py, fv_pxy, pv_p,
                       pv_px, joint(i_fut, i_fut), lag_steps == 0);
    if (lag_steps == 0 && !(net.noise_diagonal()[net.index(dst)] > 0.0)) {
        pt.te = kInfiniteInformation;
        pt.s = kInfiniteInformation;
    }
    return pt;
}

}  // namespace causalflow
