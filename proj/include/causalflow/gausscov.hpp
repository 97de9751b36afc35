#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causalflow/network.hpp"

namespace causalflow {

// Label of one Gaussian variable: a node observed at a time offset.
struct VariableTag {
    std::string name;
    double shift = 0.0;

    friend bool operator==(const VariableTag&, const VariableTag&) = default;
};

// Symmetric positive semidefinite matrix with named rows/columns.
class CovarianceMatrix {
  public:
    CovarianceMatrix() = default;
    // Checks symmetry (1e-12 relative) and positive semidefiniteness
    // (smallest eigenvalue >= -1e-10 * trace); throws NumericalFailure.
    CovarianceMatrix(std::vector<VariableTag> labels, Eigen::MatrixXd values);

    const std::vector<VariableTag>& labels() const { return labels_; }
    const Eigen::MatrixXd& values() const { return values_; }
    int size() const { return static_cast<int>(labels_.size()); }

    int index(const VariableTag& tag) const;  // throws UnknownNode

  private:
    std::vector<VariableTag> labels_;
    Eigen::MatrixXd values_;
};

// Joint zero-mean Gaussian law over variables at time t and t + lag.
struct LaggedGaussian {
    CovarianceMatrix base;
    double lag = 0.0;
};

// e^(A tau) by scaling-and-squaring with a fixed-order rational approximant;
// no eigendecomposition, so repeated decay rates need no special casing.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a, double tau);

// Steady-state second moments: solves A S + S A^T + Q = 0 with
// Q = diag(noise). Kronecker-vectorized linear solve, O(n^6); fine at desk
// scale. Residual is refined below 1e-10 * max|Q|, else NumericalFailure.
CovarianceMatrix stationary_covariance(const ValidatedNetwork& net);

// Joint law of (vars_now at t, vars_later at t+tau); cross block is
// <v(t+tau) v(t)^T> = e^(A tau) S. Negative shifts are expressed by
// swapping the two groups.
LaggedGaussian lagged_joint(const ValidatedNetwork& net,
                            std::span<const std::string> vars_now,
                            std::span<const std::string> vars_later,
                            double tau);

// Gaussian conditioning: S_keep - S_kg S_g^-1 S_gk, via a symmetric
// eigenfactorization of the conditioning block. Directions of S_given with
// eigenvalue below 1e-12 * trace are admissible only when the cross
// covariance onto them is negligible; otherwise SingularConditioning.
CovarianceMatrix conditional_covariance(const CovarianceMatrix& joint,
                                        std::span<const VariableTag> keep,
                                        std::span<const VariableTag> given);

// Sequential Gaussian conditioning of a covariance matrix on a subset of
// its own variables; rows and columns of conditioned variables come back
// zeroed. Throws SingularConditioning when a conditioning variable has
// numerically zero variance while other variables still load on it.
Eigen::MatrixXd schur_conditioned(const Eigen::MatrixXd& cov,
                                  std::span<const int> given);

// Exact second-moment engine for one validated network. Precomputes the
// stationary solution once; per-lag quantities are evaluated on demand.
// The accumulated process-noise covariance P(tau) = S - e^(A tau) S e^(A^T tau)
// is computed cancellation-free for small lags (truncated Taylor series of
// the integral form), which keeps conditional variances of nearly
// deterministic targets accurate to full relative precision.
class GaussianEngine {
  public:
    explicit GaussianEngine(const ValidatedNetwork& net);

    const ValidatedNetwork& network() const { return net_; }
    const Eigen::MatrixXd& stationary() const { return sigma_; }
    const Eigen::MatrixXd& drift() const { return drift_; }

    Eigen::MatrixXd transition(double tau) const;  // e^(A tau)
    Eigen::MatrixXd step_noise(double tau) const;  // P(tau), symmetric PSD

    // Covariance of the full state at time t conditioned on a subset of
    // nodes observed at time t.
    Eigen::MatrixXd conditioned_state(std::span<const int> given) const;

    // var(target(t+tau) | given(t)). Exact: the conditional mean of the
    // future state is linear in the present, so the variance splits into a
    // propagated present part plus accumulated process noise.
    double future_var(int target, double tau, std::span<const int> given) const;

    // var(target(t) | given(t)).
    double present_var(int target, std::span<const int> given) const;

    // cov(v(t), target(t+tau) | given(t)) for one present variable v.
    double future_cross(int present, int target, double tau,
                        std::span<const int> given) const;

  private:
    ValidatedNetwork net_;
    Eigen::MatrixXd drift_;
    Eigen::VectorXd noise_;
    Eigen::MatrixXd sigma_;
};

}  // namespace causalflow
