#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causalflow/gausscov.hpp"
#include "causalflow/network.hpp"
#include "causalflow/rng.hpp"

namespace causalflow {

enum class Scheme {
    exact,           // Gaussian transition sampling, unbiased at any dt
    euler_maruyama,  // explicit first-order scheme, O(dt) bias
};

Scheme parse_scheme(const std::string& name);  // "exact" | "em"

// Seeded stationary sample paths. data[k] is a (steps+1) x n matrix of node
// values for trajectory k, row j at time j*dt. Bit-exactly reproducible
// from (seed, scheme, parameters); trajectory k uses substream k.
struct TrajectoryEnsemble {
    std::vector<std::string> labels;
    double dt = 0.0;
    int steps = 0;
    int n_traj = 0;
    std::uint64_t seed = 0;
    std::vector<Eigen::MatrixXd> data;
};

// One-step exact transition kernel v -> e^(A dt) v + xi with
// xi ~ N(0, S - e^(A dt) S e^(A^T dt)). The noise factor comes from a
// symmetric eigendecomposition with small negative eigenvalues clamped to
// zero (the step covariance is nearly singular for noiseless nodes at small
// dt); eigenvalues below -1e-10 * trace raise NumericalFailure.
class ExactStepSampler {
  public:
    ExactStepSampler(const ValidatedNetwork& net, double dt);

    void step(Eigen::VectorXd& state, CounterRng& rng) const;
    const Eigen::MatrixXd& mean_factor() const { return transition_; }
    const Eigen::MatrixXd& noise_factor() const { return noise_factor_; }
    int normals_per_step() const { return static_cast<int>(transition_.rows()); }

  private:
    Eigen::MatrixXd transition_;
    Eigen::MatrixXd noise_factor_;
};

// Explicit Euler-Maruyama kernel v -> v + A v dt + sqrt(noise dt) xi.
// Requires dt < 0.1 / max(decay), else StepTooLarge.
class EulerMaruyamaStepper {
  public:
    EulerMaruyamaStepper(const ValidatedNetwork& net, double dt);

    void step(Eigen::VectorXd& state, CounterRng& rng) const;
    int normals_per_step() const { return static_cast<int>(drift_.rows()); }

  private:
    Eigen::MatrixXd drift_;
    Eigen::VectorXd noise_scale_;
    double dt_;
};

// Generate n_traj stationary trajectories of `steps` transitions each
// (steps+1 recorded rows). Initial states are drawn from the exact
// stationary law. burn_in_steps applies to the Euler-Maruyama scheme only
// (lets the chain settle into its own biased stationary law); -1 selects
// the default of 10 characteristic times, and the exact scheme needs none.
TrajectoryEnsemble generate(const ValidatedNetwork& net, Scheme scheme,
                            double dt, int steps, int n_traj,
                            std::uint64_t seed, int burn_in_steps = -1);

// Trajectory CSV: header `time,<node1>,...`, one block per trajectory
// introduced by `# trajectory <k>`, floats at 17 significant digits.
void write_trajectory_csv(std::ostream& out, const TrajectoryEnsemble& ens);
TrajectoryEnsemble read_trajectory_csv(std::istream& in);

}  // namespace causalflow
