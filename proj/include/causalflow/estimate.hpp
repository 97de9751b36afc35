#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causalflow/measures.hpp"
#include "causalflow/network.hpp"
#include "causalflow/simulate.hpp"

namespace causalflow {

// Pooled cross-trajectory estimate of the stationary lagged covariance
// between vars_now at step j and vars_later at step j + lag. Means are
// subtracted per variable over the windows actually used.
struct LaggedSampleCov {
    std::vector<std::string> labels_now;
    std::vector<std::string> labels_later;
    int lag_steps = 0;
    Eigen::MatrixXd values;  // block order (now..., later...)
    long pair_count = 0;
    // Pair count discounted by the integrated autocorrelation time of the
    // slowest node, 2 * t_slow / dt; honest error bars for correlated draws.
    double effective_n = 0.0;
};

// Throws InsufficientData when fewer than 10 pairs are available.
LaggedSampleCov sample_lagged_cov(const TrajectoryEnsemble& ens,
                                  std::span<const std::string> vars_now,
                                  std::span<const std::string> vars_later,
                                  int lag_steps,
                                  double slowest_time_constant);

// Gaussian plug-in decomposition from trajectory data: the same pipeline as
// measures::decompose fed with sample moments, so the closure identities
// hold exactly whatever the sampling noise. The network supplies node
// labels, the parent sets and the autocorrelation scale; it must match the
// ensemble's labels.
DecompositionPoint empirical_decomposition(const TrajectoryEnsemble& ens,
                                           const ValidatedNetwork& net,
                                           const std::string& src,
                                           const std::string& dst,
                                           int lag_steps,
                                           bool condition_parents,
                                           double* effective_n_out = nullptr);

}  // namespace causalflow
