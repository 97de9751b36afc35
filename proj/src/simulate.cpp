#include "causalflow/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "causalflow/errors.hpp"
#include "causalflow/numeric.hpp"

namespace causalflow {

Scheme parse_scheme(const std::string& name) {
    if (name == "exact") {
        return Scheme::exact;
    }
    if (name == "em") {
        return Scheme::euler_maruyama;
    }
    throw UsageError("unknown scheme '" + name + "'; use exact or em");
}

namespace {

// Symmetric square root with clamping of the small negative eigenvalues the
// nearly singular one-step covariance produces for noiseless nodes.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const double floor = -num::psd_tol() * std::max(cov.trace(), 0.0);
    Eigen::VectorXd lambda = eig.eigenvalues();
    for (int i = 0; i < lambda.size(); ++i) {
        if (lambda[i] < floor) {
            throw NumericalFailure(
                "step covariance has a significantly negative eigenvalue");
        }
        lambda[i] = std::sqrt(std::max(lambda[i], 0.0));
    }
    return eig.eigenvectors() * lambda.asDiagonal();
}

}  // namespace

ExactStepSampler::ExactStepSampler(const ValidatedNetwork& net, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("exact sampler needs dt > 0");
    }
    GaussianEngine engine(net);
    transition_ = engine.transition(dt);
    noise_factor_ = psd_sqrt(engine.step_noise(dt));
}

void ExactStepSampler::step(Eigen::VectorXd& state, CounterRng& rng) const {
    const int n = static_cast<int>(state.size());
    Eigen::VectorXd xi(n);
    for (int i = 0; i < n; ++i) {
        xi[i] = rng.next_normal();
    }
    state = transition_ * state + noise_factor_ * xi;
}

EulerMaruyamaStepper::EulerMaruyamaStepper(const ValidatedNetwork& net,
                                           double dt)
    : drift_(net.drift_matrix()), dt_(dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("stepper needs dt > 0");
    }
    double max_decay = 0.0;
    for (const NodeSpec& node : net.definition().nodes) {
        max_decay = std::max(max_decay, node.decay);
    }
    if (!(dt < 0.1 / max_decay)) {
        throw StepTooLarge("dt=" + std::to_string(dt) +
                           " too coarse for fastest decay " +
                           std::to_string(max_decay) +
                           "; need dt < " + std::to_string(0.1 / max_decay));
    }
    const Eigen::VectorXd q = net.noise_diagonal();
    noise_scale_ = (q * dt).cwiseSqrt();
}

void EulerMaruyamaStepper::step(Eigen::VectorXd& state,
                                CounterRng& rng) const {
    const int n = static_cast<int>(state.size());
    Eigen::VectorXd xi(n);
    for (int i = 0; i < n; ++i) {
        xi[i] = rng.next_normal();
    }
    state += drift_ * state * dt_ + noise_scale_.cwiseProduct(xi);
}

TrajectoryEnsemble generate(const ValidatedNetwork& net, Scheme scheme,
                            double dt, int steps, int n_traj,
                            std::uint64_t seed, int burn_in_steps) {
    if (!(dt > 0.0) || steps < 0 || n_traj < 0) {
        throw std::invalid_argument("generate needs dt > 0, steps/n_traj >= 0");
    }
    const int n = net.size();
    TrajectoryEnsemble ens;
    for (int i = 0; i < n; ++i) {
        ens.labels.push_back(net.name(i));
    }
    ens.dt = dt;
    ens.steps = steps;
    ens.n_traj = n_traj;
    ens.seed = seed;
    if (n_traj == 0) {
        return ens;
    }

    GaussianEngine engine(net);
    const Eigen::MatrixXd stationary_factor = psd_sqrt(engine.stationary());

    std::optional<ExactStepSampler> exact;
    std::optional<EulerMaruyamaStepper> em;
    int burn = 0;
    if (scheme == Scheme::exact) {
        exact.emplace(net, dt);  // the stationary start needs no settling
    } else {
        em.emplace(net, dt);
        burn = burn_in_steps >= 0
                   ? burn_in_steps
                   : static_cast<int>(
                         std::ceil(10.0 * net.characteristic_time() / dt));
    }

    ens.data.reserve(static_cast<std::size_t>(n_traj));
    for (int k = 0; k < n_traj; ++k) {
        CounterRng rng(seed, static_cast<std::uint64_t>(k));
        Eigen::VectorXd state(n);
        for (int i = 0; i < n; ++i) {
            state[i] = rng.next_normal();
        }
        state = stationary_factor * state;
        for (int j = 0; j < burn; ++j) {
            em->step(state, rng);
        }
        Eigen::MatrixXd rows(steps + 1, n);
        rows.row(0) = state.transpose();
        for (int j = 1; j <= steps; ++j) {
            if (exact) {
                exact->step(state, rng);
            } else {
                em->step(state, rng);
            }
            rows.row(j) = state.transpose();
        }
        if (!rows.allFinite()) {
            throw NumericalFailure("trajectory diverged; reduce dt");
        }
        ens.data.push_back(std::move(rows));
    }
    return ens;
}

namespace {

void append_float(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const TrajectoryEnsemble& ens) {
    std::string line = "time";
    for (const std::string& label : ens.labels) {
        line += ',';
        line += label;
    }
    line += '\n';
    out << line;
    for (int k = 0; k < ens.n_traj; ++k) {
        out << "# trajectory " << k << '\n';
        const Eigen::MatrixXd& rows = ens.data[static_cast<std::size_t>(k)];
        for (int j = 0; j < rows.rows(); ++j) {
            line.clear();
            append_float(line, j * ens.dt);
            for (int i = 0; i < rows.cols(); ++i) {
                line += ',';
                append_float(line, rows(j, i));
            }
            line += '\n';
            out << line;
        }
    }
}

TrajectoryEnsemble read_trajectory_csv(std::istream& in) {
    TrajectoryEnsemble ens;
    std::string line;
    if (!std::getline(in, line) || line.rfind("time", 0) != 0) {
        throw UsageError("trajectory CSV must start with a time,... header");
    }
    {
        std::size_t pos = 4;  // after "time"
        while (pos < line.size() && line[pos] == ',') {
            std::size_t next = line.find(',', pos + 1);
            if (next == std::string::npos) {
                next = line.size();
            }
            ens.labels.push_back(line.substr(pos + 1, next - pos - 1));
            pos = next;
        }
    }
    if (ens.labels.empty()) {
        throw UsageError("trajectory CSV header names no variables");
    }

    std::vector<std::vector<double>> block;
    std::vector<double> times;
    auto flush_block = [&]() {
        if (block.empty()) {
            return;
        }
        const int rows = static_cast<int>(block.size());
        const int cols = static_cast<int>(ens.labels.size());
        Eigen::MatrixXd m(rows, cols);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                m(r, c) = block[static_cast<std::size_t>(r)]
                               [static_cast<std::size_t>(c)];
            }
        }
        ens.data.push_back(std::move(m));
        block.clear();
    };

    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            if (line.rfind("# trajectory", 0) == 0) {
                flush_block();
            }
            continue;
        }
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t next = line.find(',', pos);
            if (next == std::string::npos) {
                next = line.size();
            }
            double v = 0.0;
            auto [p, ec] =
                std::from_chars(line.data() + pos, line.data() + next, v);
            if (ec != std::errc{} || p != line.data() + next) {
                throw UsageError("bad float in trajectory CSV: " +
                                 line.substr(pos, next - pos));
            }
            row.push_back(v);
            pos = next + 1;
            if (next == line.size()) {
                break;
            }
        }
        if (row.size() != ens.labels.size() + 1) {
            throw UsageError("trajectory CSV row has wrong column count");
        }
        times.push_back(row.front());
        row.erase(row.begin());
        block.push_back(std::move(row));
    }
    flush_block();

    ens.n_traj = static_cast<int>(ens.data.size());
    if (ens.n_traj == 0) {
        throw UsageError("trajectory CSV contains no data rows");
    }
    ens.steps = static_cast<int>(ens.data.front().rows()) - 1;
    for (const Eigen::MatrixXd& m : ens.data) {
        if (m.rows() != ens.steps + 1) {
            throw UsageError("trajectories have inconsistent lengths");
        }
    }
    ens.dt = ens.steps > 0 && times.size() >= 2 ? times[1] - times[0] : 1.0;
    return ens;
}

}  // namespace causalflow
