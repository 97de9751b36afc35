#include "causalflow/gausscov.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "causalflow/errors.hpp"
#include "causalflow/numeric.hpp"

namespace causalflow {

CovarianceMatrix::CovarianceMatrix(std::vector<VariableTag> labels,
                                   Eigen::MatrixXd values)
    : labels_(std::move(labels)), values_(std::move(values)) {
    const int n = static_cast<int>(labels_.size());
    if (values_.rows() != n || values_.cols() != n) {
        throw NumericalFailure("covariance shape does not match labels");
    }
    if (n == 0) {
        return;
    }
    const double scale = std::max(1e-300, values_.cwiseAbs().maxCoeff());
    const double asym = (values_ - values_.transpose()).cwiseAbs().maxCoeff();
    if (asym > num::symmetry_tol() * scale) {
        throw NumericalFailure("covariance not symmetric: max asymmetry " +
                               std::to_string(asym));
    }
    values_ = 0.5 * (values_ + values_.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(values_);
    const double floor = -num::psd_tol() * std::max(values_.trace(), 0.0);
    if (eig.eigenvalues().minCoeff() < floor) {
        throw NumericalFailure(
            "covariance not positive semidefinite: min eigenvalue " +
            std::to_string(eig.eigenvalues().minCoeff()));
    }
}

int CovarianceMatrix::index(const VariableTag& tag) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == tag) {
            return static_cast<int>(i);
        }
    }
    throw UnknownNode("no variable '" + tag.name + "' at shift " +
                      std::to_string(tag.shift));
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a, double tau) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("matrix_exponential needs a square matrix");
    }
    return (a * tau).exp();
}

namespace {

// Continuous-time Lyapunov solve A S + S A^T = -Q by Kronecker
// vectorization, followed by iterative refinement with long double
// residuals; keeps max|A S + S A^T + Q| <= 1e-10 max|Q| even for strongly
// separated time scales.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a,
                               const Eigen::VectorXd& q_diag) {
    const int n = static_cast<int>(a.rows());
    const int nn = n * n;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nn, nn);
    for (int j = 0; j < n; ++j) {
        k.block(j * n, j * n, n, n) += a;  // I (x) A acting on vec columns
    }
    for (int bi = 0; bi < n; ++bi) {
        for (int bj = 0; bj < n; ++bj) {
            for (int r = 0; r < n; ++r) {
                k(bi * n + r, bj * n + r) += a(bi, bj);  // A (x) I
            }
        }
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(nn);
    for (int i = 0; i < n; ++i) {
        b[i * n + i] = -q_diag[i];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(k);
    Eigen::VectorXd x = lu.solve(b);
    if (!x.allFinite()) {
        throw NumericalFailure("Lyapunov system is singular");
    }

    using LongMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using LongVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const LongMat kl = k.cast<long double>();
    const LongVec bl = b.cast<long double>();
    for (int pass = 0; pass < 3; ++pass) {
        LongVec resid = bl - kl * x.cast<long double>();
        Eigen::VectorXd dx = lu.solve(resid.cast<double>());
        x += dx;
        if (dx.cwiseAbs().maxCoeff() <=
            1e-18 * std::max(1.0, x.cwiseAbs().maxCoeff())) {
            break;
        }
    }

    Eigen::MatrixXd sigma = Eigen::Map<Eigen::MatrixXd>(x.data(), n, n);
    sigma = 0.5 * (sigma + sigma.transpose()).eval();

    const LongMat al = a.cast<long double>();
    const LongMat sl = sigma.cast<long double>();
    LongMat resid = al * sl + sl * al.transpose();
    for (int i = 0; i < n; ++i) {
        resid(i, i) += static_cast<long double>(q_diag[i]);
    }
    const double resid_max = static_cast<double>(resid.cwiseAbs().maxCoeff());
    const double q_max = q_diag.cwiseAbs().maxCoeff();
    if (resid_max > num::lyapunov_tol() * q_max) {
        throw NumericalFailure("Lyapunov residual " +
                               std::to_string(resid_max) + " exceeds bound");
    }
    return sigma;
}

std::vector<VariableTag> node_tags(const ValidatedNetwork& net) {
    std::vector<VariableTag> tags;
    tags.reserve(static_cast<std::size_t>(net.size()));
    for (int i = 0; i < net.size(); ++i) {
        tags.push_back({net.name(i), 0.0});
    }
    return tags;
}

}  // namespace

CovarianceMatrix stationary_covariance(const ValidatedNetwork& net) {
    Eigen::MatrixXd sigma =
        solve_lyapunov(net.drift_matrix(), net.noise_diagonal());
    return CovarianceMatrix(node_tags(net), std::move(sigma));
}

LaggedGaussian lagged_joint(const ValidatedNetwork& net,
                            std::span<const std::string> vars_now,
                            std::span<const std::string> vars_later,
                            double tau) {
    if (tau < 0.0) {
        throw std::invalid_argument(
            "lagged_joint needs tau >= 0; swap the groups for negative shifts");
    }
    GaussianEngine engine(net);
    const Eigen::MatrixXd& sigma = engine.stationary();
    const Eigen::MatrixXd cross = engine.transition(tau) * sigma;  // <v_tau v^T>

    const int a = static_cast<int>(vars_now.size());
    const int b = static_cast<int>(vars_later.size());
    std::vector<int> idx_now, idx_later;
    std::vector<VariableTag> labels;
    for (const std::string& v : vars_now) {
        idx_now.push_back(net.index(v));
        labels.push_back({v, 0.0});
    }
    for (const std::string& v : vars_later) {
        idx_later.push_back(net.index(v));
        labels.push_back({v, tau});
    }
    Eigen::MatrixXd joint(a + b, a + b);
    for (int i = 0; i < a; ++i) {
        for (int j = 0; j < a; ++j) {
            joint(i, j) = sigma(idx_now[static_cast<std::size_t>(i)],
                                idx_now[static_cast<std::size_t>(j)]);
        }
        for (int j = 0; j < b; ++j) {
            joint(i, a + j) = cross(idx_later[static_cast<std::size_t>(j)],
                                    idx_now[static_cast<std::size_t>(i)]);
            joint(a + j, i) = joint(i, a + j);
        }
    }
    for (int i = 0; i < b; ++i) {
        for (int j = 0; j < b; ++j) {
            joint(a + i, a + j) = sigma(idx_later[static_cast<std::size_t>(i)],
                                        idx_later[static_cast<std::size_t>(j)]);
        }
    }
    return LaggedGaussian{CovarianceMatrix(std::move(labels), std::move(joint)),
                          tau};
}

CovarianceMatrix conditional_covariance(const CovarianceMatrix& joint,
                                        std::span<const VariableTag> keep,
                                        std::span<const VariableTag> given) {
    std::vector<int> keep_idx, given_idx;
    for (const VariableTag& tag : keep) {
        keep_idx.push_back(joint.index(tag));
    }
    for (const VariableTag& tag : given) {
        given_idx.push_back(joint.index(tag));
    }
    for (int ki : keep_idx) {
        if (std::find(given_idx.begin(), given_idx.end(), ki) !=
            given_idx.end()) {
            throw std::invalid_argument(
                "keep and given sets must be disjoint");
        }
    }

    const Eigen::MatrixXd& s = joint.values();
    const int nk = static_cast<int>(keep_idx.size());
    const int ng = static_cast<int>(given_idx.size());
    Eigen::MatrixXd s_kk(nk, nk), s_kg(nk, ng), s_gg(ng, ng);
    for (int i = 0; i < nk; ++i) {
        for (int j = 0; j < nk; ++j) {
            s_kk(i, j) = s(keep_idx[static_cast<std::size_t>(i)],
                           keep_idx[static_cast<std::size_t>(j)]);
        }
        for (int j = 0; j < ng; ++j) {
            s_kg(i, j) = s(keep_idx[static_cast<std::size_t>(i)],
                           given_idx[static_cast<std::size_t>(j)]);
        }
    }
    for (int i = 0; i < ng; ++i) {
        for (int j = 0; j < ng; ++j) {
            s_gg(i, j) = s(given_idx[static_cast<std::size_t>(i)],
                           given_idx[static_cast<std::size_t>(j)]);
        }
    }

    std::vector<VariableTag> labels;
    for (const VariableTag& tag : keep) {
        labels.push_back(tag);
    }
    if (ng == 0) {
        return CovarianceMatrix(std::move(labels), std::move(s_kk));
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s_gg);
    const double lambda_floor = num::conditioning_tol() *
                                std::max(s_gg.trace(), 0.0);
    const double keep_scale =
        std::max(s_kk.diagonal().maxCoeff(), 1e-300);
    Eigen::MatrixXd projected = s_kg * eig.eigenvectors();  // nk x ng
    Eigen::MatrixXd result = s_kk;
    for (int j = 0; j < ng; ++j) {
        const double lambda = eig.eigenvalues()[j];
        const Eigen::VectorXd col = projected.col(j);
        if (lambda <= lambda_floor) {
            // Null direction of the conditioning block: legal only if the
            // kept variables do not load on it.
            const double significance =
                col.cwiseAbs2().maxCoeff() / std::max(lambda, 1e-300);
            if (significance > num::psd_tol() * keep_scale) {
                throw SingularConditioning(
                    "conditioning block is singular along a direction the "
                    "kept variables load on");
            }
            continue;
        }
        result -= (col * col.transpose()) / lambda;
    }
    result = 0.5 * (result + result.transpose()).eval();
    // wipe rounding-level negative curvature against the pre-conditioning
    // scale, so fully explained blocks come back as clean zeros
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> out_eig(result);
    const double floor = num::psd_tol() * std::max(s_kk.trace(), 0.0);
    if (out_eig.eigenvalues().minCoeff() < -floor) {
        throw NumericalFailure("conditional covariance lost definiteness");
    }
    Eigen::VectorXd lambda = out_eig.eigenvalues().cwiseMax(0.0);
    result = out_eig.eigenvectors() * lambda.asDiagonal() *
             out_eig.eigenvectors().transpose();
    return CovarianceMatrix(std::move(labels), std::move(result));
}

GaussianEngine::GaussianEngine(const ValidatedNetwork& net)
    : net_(net),
      drift_(net.drift_matrix()),
      noise_(net.noise_diagonal()),
      sigma_(solve_lyapunov(drift_, noise_)) {}

Eigen::MatrixXd GaussianEngine::transition(double tau) const {
    return (drift_ * tau).exp();
}

Eigen::MatrixXd GaussianEngine::step_noise(double tau) const {
    const int n = static_cast<int>(drift_.rows());
    if (tau == 0.0) {
        return Eigen::MatrixXd::Zero(n, n);
    }
    const double norm1 = (drift_ * tau).cwiseAbs().colwise().sum().maxCoeff();
    if (norm1 <= 0.5) {
        // Truncated series of integral_0^tau e^(As) Q e^(A^T s) ds. The
        // coefficient recurrence M_{j+1} = (A M_j + M_j A^T)/(j+1) follows
        // from differentiating the integrand; entries are sums without the
        // catastrophic cancellation of the subtraction form, so nearly
        // deterministic targets keep full relative precision.
        Eigen::MatrixXd m = noise_.asDiagonal();
        Eigen::MatrixXd p = tau * m;
        double t_pow = tau;
        for (int j = 1; j <= 80; ++j) {
            m = ((drift_ * m + m * drift_.transpose()) / j).eval();
            t_pow *= tau;
            Eigen::MatrixXd term = (t_pow / (j + 1)) * m;
            p += term;
            const double pmax = std::max(p.cwiseAbs().maxCoeff(), 1e-300);
            if (term.cwiseAbs().maxCoeff() <= 1e-20 * pmax) {
                break;
            }
        }
        return 0.5 * (p + p.transpose()).eval();
    }
    const Eigen::MatrixXd e = transition(tau);
    Eigen::MatrixXd p = sigma_ - e * sigma_ * e.transpose();
    return 0.5 * (p + p.transpose()).eval();
}

Eigen::MatrixXd schur_conditioned(const Eigen::MatrixXd& cov,
                                  std::span<const int> given) {
    Eigen::MatrixXd s = cov;
    const double trace0 = std::max(cov.trace(), 0.0);
    const double var_floor = num::conditioning_tol() * trace0;
    for (int g : given) {
        const double v = s(g, g);
        if (v <= var_floor) {
            // A direction the earlier conditioning already exhausted (or a
            // degenerate variable). Consistent only if nothing loads on it.
            double significance = 0.0;
            for (int k = 0; k < s.rows(); ++k) {
                if (k == g) {
                    continue;
                }
                significance = std::max(
                    significance, s(k, g) * s(k, g) / std::max(v, 1e-300));
            }
            if (significance >
                num::psd_tol() * std::max(s.diagonal().maxCoeff(), 1e-300)) {
                throw SingularConditioning(
                    "conditioning variable " + std::to_string(g) +
                    " has numerically zero variance");
            }
        } else {
            const Eigen::VectorXd col = s.col(g);
            s -= (col * col.transpose()) / v;
        }
        s.row(g).setZero();
        s.col(g).setZero();
    }
    return 0.5 * (s + s.transpose()).eval();
}

Eigen::MatrixXd GaussianEngine::conditioned_state(
    std::span<const int> given) const {
    return schur_conditioned(sigma_, given);
}

double GaussianEngine::future_var(int target, double tau,
                                  std::span<const int> given) const {
    const Eigen::MatrixXd sv = conditioned_state(given);
    const Eigen::RowVectorXd row = transition(tau).row(target);
    const double propagated = row * sv * row.transpose();
    return std::max(propagated, 0.0) + step_noise(tau)(target, target);
}

double GaussianEngine::present_var(int target,
                                   std::span<const int> given) const {
    return conditioned_state(given)(target, target);
}

double GaussianEngine::future_cross(int present, int target, double tau,
                                    std::span<const int> given) const {
    const Eigen::MatrixXd sv = conditioned_state(given);
    const Eigen::RowVectorXd row = transition(tau).row(target);
    return row * sv.col(present);
}

}  // namespace causalflow
