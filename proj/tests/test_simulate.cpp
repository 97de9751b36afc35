#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "causalflow/errors.hpp"
#include "causalflow/gausscov.hpp"
#include "causalflow/network.hpp"
#include "causalflow/rng.hpp"
#include "causalflow/simulate.hpp"

using namespace causalflow;

namespace {

ValidatedNetwork blrm_net() {
    LinearNetwork net;
    net.nodes = {{"x", 0.1, 10.0}, {"y", 0.2, 0.0}};
    net.edges = {{"x", "y", 0.1}};
    return validate(net);
}

ValidatedNetwork single_ou(double decay, double noise) {
    LinearNetwork net;
    net.nodes = {{"x", decay, noise}};
    return validate(net);
}

// batch-mean standard error: honest for autocorrelated series
double batch_se(const std::vector<double>& values, int batches) {
    const std::size_t per = values.size() / static_cast<std::size_t>(batches);
    std::vector<double> means;
    for (int b = 0; b < batches; ++b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < per; ++i) {
            sum += values[static_cast<std::size_t>(b) * per + i];
        }
        means.push_back(sum / static_cast<double>(per));
    }
    double mu = 0.0;
    for (double m : means) {
        mu += m;
    }
    mu /= batches;
    double var = 0.0;
    for (double m : means) {
        var += (m - mu) * (m - mu);
    }
    var /= (batches - 1);
    return std::sqrt(var / batches);
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("counter rng is a pure function of seed, stream and index") {
    CounterRng a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_bits() == b.next_bits());
    }
    CHECK(a.at(7) == b.at(7));
    CHECK(a.at(7) != c.at(7));
    CHECK(a.at(7) != d.at(7));
    CounterRng e(1, 0);
    double m = 0.0;
    for (int i = 0; i < 10000; ++i) {
        m += e.next_normal();
    }
    CHECK(std::abs(m / 10000.0) < 0.05);
}

TEST_CASE("exact one-step kernel of a single relaxing node") {
    const double decay = 0.1, noise = 10.0, dt = 0.7;
    const ExactStepSampler sampler(single_ou(decay, noise), dt);
    CHECK(sampler.mean_factor()(0, 0) ==
          doctest::Approx(std::exp(-decay * dt)).epsilon(1e-13));
    const double var =
        sampler.noise_factor()(0, 0) * sampler.noise_factor()(0, 0);
    const double sigma2 = noise / (2.0 * decay);
    CHECK(var == doctest::Approx(sigma2 * (1.0 - std::exp(-2.0 * decay * dt)))
                     .epsilon(1e-12));
}

TEST_CASE("a long exact step forgets the state") {
    const ExactStepSampler sampler(blrm_net(), 500.0);
    CHECK(sampler.mean_factor().cwiseAbs().maxCoeff() <= 1e-12);
    GaussianEngine engine(blrm_net());
    const Eigen::MatrixXd noise_cov =
        sampler.noise_factor() * sampler.noise_factor().transpose();
    CHECK((noise_cov - engine.stationary()).cwiseAbs().maxCoeff() <=
          1e-9 * engine.stationary().cwiseAbs().maxCoeff());
}

TEST_CASE("euler-maruyama step is exact for a noiseless node") {
    LinearNetwork def;
    def.nodes = {{"x", 0.5, 1.0}, {"y", 1.0, 0.0}};
    def.edges = {{"x", "y", 2.0}};
    const ValidatedNetwork net = validate(def);
    const double dt = 0.05;
    const EulerMaruyamaStepper stepper(net, dt);
    Eigen::VectorXd v(2);
    v << 3.0, -1.0;
    Eigen::VectorXd expected = v;
    expected[1] += (2.0 * v[0] - 1.0 * v[1]) * dt;  // y has no noise term
    CounterRng rng(9, 0);
    Eigen::VectorXd state = v;
    stepper.step(state, rng);
    CHECK(state[1] == doctest::Approx(expected[1]).epsilon(1e-15));
}

TEST_CASE("euler-maruyama rejects coarse steps") {
    CHECK_THROWS_AS(EulerMaruyamaStepper(single_ou(1.0, 1.0), 1.0),
                    StepTooLarge);
    CHECK_THROWS_AS(
        generate(single_ou(1.0, 1.0), Scheme::euler_maruyama, 0.5, 10, 1, 1),
        StepTooLarge);
}

TEST_CASE("generation is deterministic per seed") {
    const ValidatedNetwork net = blrm_net();
    const TrajectoryEnsemble a = generate(net, Scheme::exact, 0.1, 500, 3, 7);
    const TrajectoryEnsemble b = generate(net, Scheme::exact, 0.1, 500, 3, 7);
    const TrajectoryEnsemble c = generate(net, Scheme::exact, 0.1, 500, 3, 8);
    REQUIRE(a.data.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK((a.data[static_cast<std::size_t>(k)] -
               b.data[static_cast<std::size_t>(k)]).cwiseAbs().maxCoeff() ==
              0.0);
    }
    CHECK((a.data[0] - c.data[0]).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("empty ensemble is valid") {
    const TrajectoryEnsemble ens =
        generate(blrm_net(), Scheme::exact, 0.1, 100, 0, 1);
    CHECK(ens.n_traj == 0);
    CHECK(ens.data.empty());
    CHECK(ens.labels.size() == 2);
}

TEST_CASE("exact sampler reproduces stationary and lagged moments") {
    const ValidatedNetwork net = blrm_net();
    GaussianEngine engine(net);
    const double dt = 0.25;
    const int steps = 200000;
    const TrajectoryEnsemble ens =
        generate(net, Scheme::exact, dt, steps, 1, 2024);
    const Eigen::MatrixXd& path = ens.data[0];

    SUBCASE("variance of the signal") {
        std::vector<double> sq(static_cast<std::size_t>(steps + 1));
        for (int j = 0; j <= steps; ++j) {
            sq[static_cast<std::size_t>(j)] = path(j, 0) * path(j, 0);
        }
        const double se = batch_se(sq, 20);
        CHECK(std::abs(mean_of(sq) - 50.0) <= 4.0 * se);
    }

    SUBCASE("exponentially decaying autocorrelation of the signal") {
        for (int lag_steps : {4, 16, 48}) {
            std::vector<double> prod;
            for (int j = 0; j + lag_steps <= steps; ++j) {
                prod.push_back(path(j, 0) * path(j + lag_steps, 0));
            }
            const double expected =
                50.0 * std::exp(-lag_steps * dt / 10.0);
            const double se = batch_se(prod, 20);
            CHECK(std::abs(mean_of(prod) - expected) <= 4.0 * se);
        }
    }

    SUBCASE("lagged cross covariance matches the engine") {
        const int lag_steps = 12;
        const Eigen::MatrixXd lagged =
            engine.transition(lag_steps * dt) * engine.stationary();
        std::vector<double> prod;
        for (int j = 0; j + lag_steps <= steps; ++j) {
            prod.push_back(path(j, 0) * path(j + lag_steps, 1));
        }
        const double se = batch_se(prod, 20);
        CHECK(std::abs(mean_of(prod) - lagged(1, 0)) <= 4.0 * se);
    }

    SUBCASE("stationarity along the path") {
        const int third = (steps + 1) / 3;
        std::vector<double> head, tail;
        for (int j = 0; j < third; ++j) {
            head.push_back(path(j, 1) * path(j, 1));
            tail.push_back(path(steps - j, 1) * path(steps - j, 1));
        }
        const double gap = std::abs(mean_of(head) - mean_of(tail));
        const double se = std::hypot(batch_se(head, 16), batch_se(tail, 16));
        CHECK(gap <= 4.0 * se);
    }
}

TEST_CASE("euler-maruyama bias halves with the step") {
    // matched driving noise against the exact sampler isolates the scheme
    // bias from the Monte Carlo noise
    const ValidatedNetwork net = single_ou(1.0, 2.0);  // unit variance
    const int steps = 1500000;
    auto em_variance_error = [&](double dt) {
        const TrajectoryEnsemble em =
            generate(net, Scheme::euler_maruyama, dt, steps, 1, 99, 0);
        const TrajectoryEnsemble exact =
            generate(net, Scheme::exact, dt, steps, 1, 99, 0);
        double var_em = 0.0, var_exact = 0.0;
        for (int j = 0; j <= steps; ++j) {
            var_em += em.data[0](j, 0) * em.data[0](j, 0);
            var_exact += exact.data[0](j, 0) * exact.data[0](j, 0);
        }
        return std::abs(var_em - var_exact) / (steps + 1);
    };
    const double coarse = em_variance_error(0.08);
    const double fine = em_variance_error(0.04);
    CHECK(coarse / fine >= 1.8);
}

TEST_CASE("trajectory csv round trips bit-exactly") {
    const TrajectoryEnsemble ens =
        generate(blrm_net(), Scheme::exact, 0.3, 40, 2, 5);
    std::ostringstream out;
    write_trajectory_csv(out, ens);
    std::istringstream in(out.str());
    const TrajectoryEnsemble back = read_trajectory_csv(in);
    REQUIRE(back.n_traj == ens.n_traj);
    REQUIRE(back.steps == ens.steps);
    CHECK(back.dt == ens.dt);
    CHECK(back.labels == ens.labels);
    for (int k = 0; k < ens.n_traj; ++k) {
        CHECK((back.data[static_cast<std::size_t>(k)] -
               ens.data[static_cast<std::size_t>(k)]).cwiseAbs().maxCoeff() ==
              0.0);
    }
}

TEST_CASE("trajectory csv rejects malformed input") {
    std::istringstream bad1("not a header\n");
    CHECK_THROWS_AS(read_trajectory_csv(bad1), UsageError);
    std::istringstream bad2("time,x\n# trajectory 0\n0.0,1.0,2.0\n");
    CHECK_THROWS_AS(read_trajectory_csv(bad2), UsageError);
    std::istringstream bad3("time,x\n");
    CHECK_THROWS_AS(read_trajectory_csv(bad3), UsageError);
}
