#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "mechcluster/errors.hpp"
#include "mechcluster/model.hpp"
#include "mechcluster/numerics.hpp"

namespace mechcluster {

/// Drift matrix of the linearized dynamics in the ordering
/// (a_1..a_n, c_1..c_n, a_1^dag..a_n^dag, c_1^dag..c_n^dag).
inline ComplexMatrix drift_matrix(const SystemParams& params, const BogoliubovPair& pair) {
    params.validate();
    detail::require_pair_shapes(pair, "drift_matrix");
    const int n = params.n;
    if (pair.n() != n)
        throw ShapeError("drift_matrix: pair size " + std::to_string(pair.n())
                         + " does not match n = " + std::to_string(n));
    const DampingMatrices damping = damping_matrices(pair, params.gamma);
    const std::complex<double> i_unit(0.0, 1.0);
    const Eigen::VectorXcd half_kappa = (0.5 * params.kappa.array()).cast<std::complex<double>>();
    const Eigen::VectorXcd g = params.g_tilde.cast<std::complex<double>>();

    ComplexMatrix m = ComplexMatrix::Zero(4 * n, 4 * n);
    auto block = [&](int row, int col) { return m.block(row * n, col * n, n, n); };
    block(0, 0) = (-half_kappa).asDiagonal();
    block(0, 1) = (-i_unit * g.array()).matrix().asDiagonal();
    block(1, 0) = block(0, 1);
    block(1, 1) = -damping.w;
    block(1, 3) = -damping.t;
    block(2, 2) = (-half_kappa).asDiagonal();
    block(2, 3) = (i_unit * g.array()).matrix().asDiagonal();
    block(3, 2) = block(2, 3);
    block(3, 1) = -damping.t.conjugate();
    block(3, 3) = -damping.w.conjugate();
    return m;
}

/// Noise matrix matching drift_matrix, from the cavity input noise and
/// the collective mechanical noise kernels.
inline ComplexMatrix noise_matrix(const SystemParams& params, const NoiseBlocks& blocks) {
    params.validate();
    const int n = params.n;
    if (blocks.minus_plus.rows() != n || blocks.plus_minus.rows() != n
        || blocks.minus_minus.rows() != n || blocks.plus_plus.rows() != n)
        throw ShapeError("noise_matrix: noise blocks do not match n = " + std::to_string(n));
    ComplexMatrix q = ComplexMatrix::Zero(4 * n, 4 * n);
    auto block = [&](int row, int col) { return q.block(row * n, col * n, n, n); };
    block(0, 2) = params.kappa.cast<std::complex<double>>().asDiagonal();
    block(1, 1) = blocks.minus_minus;
    block(1, 3) = blocks.minus_plus;
    block(3, 1) = blocks.plus_minus;
    block(3, 3) = blocks.plus_plus;
    return q;
}

/// Steady state of the driven network and its quality metrics.
struct SteadyStateResult {
    ComplexMatrix correlations;        ///< 4n x 4n steady second moments
    Eigen::MatrixXd v_collective;      ///< quadrature covariance of the collective modes
    Eigen::MatrixXd v_mechanical;      ///< quadrature covariance of the mechanical modes
    double fidelity = 0.0;             ///< overlap with the vacuum of the collective modes
    Eigen::VectorXd nullifier_variance;
    Eigen::VectorXd nullifier_db;
    double stability = 0.0;            ///< spectral abscissa of the drift [rad/s]
    Eigen::VectorXd cooperativity;
};

/// Uhlmann fidelity between the Gaussian state of covariance v (vacuum
/// variance 1) and the vacuum.
inline double fidelity_from_covariance(const Eigen::MatrixXd& v) {
    if (v.rows() != v.cols() || v.rows() < 2 || v.rows() % 2 != 0)
        throw ShapeError("fidelity_from_covariance: expected a 2n x 2n covariance, got "
                         + std::to_string(v.rows()) + "x" + std::to_string(v.cols()));
    const auto n = v.rows() / 2;
    const Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(2 * n, 2 * n) + v;
    const double logdet = logdet_posdef(sum);
    const double fidelity = std::exp(static_cast<double>(n) * std::log(2.0) - 0.5 * logdet);
    if (fidelity > 1.0 + 1e-9)
        throw DefinitenessError("fidelity_from_covariance: covariance lies below vacuum (fidelity "
                                + std::to_string(fidelity) + ")");
    return std::min(fidelity, 1.0);
}

/// Variances of the nullifiers p_j - sum_j' a(j, j') x_j' under the
/// mechanical covariance v (ordering x_1..x_n, p_1..p_n).
inline Eigen::VectorXd nullifier_variances(const Eigen::MatrixXd& v, const Eigen::MatrixXd& a) {
    require_valid_adjacency(a);
    const auto n = a.rows();
    if (v.rows() != 2 * n || v.cols() != 2 * n)
        throw ShapeError("nullifier_variances: covariance must be " + std::to_string(2 * n) + "x"
                         + std::to_string(2 * n) + ", got " + std::to_string(v.rows()) + "x"
                         + std::to_string(v.cols()));
    Eigen::MatrixXd o(n, 2 * n);
    o.leftCols(n) = -a;
    o.rightCols(n) = Eigen::MatrixXd::Identity(n, n);
    return (o * v * o.transpose()).diagonal();
}

/// Smallest eigenvalue of V + i Omega for the symplectic form in the
/// (x_1..x_n, p_1..p_n) ordering; >= 0 for physical covariances.
inline double physicality_margin(const Eigen::MatrixXd& v) {
    if (v.rows() != v.cols() || v.rows() < 2 || v.rows() % 2 != 0)
        throw ShapeError("physicality_margin: expected a 2n x 2n covariance");
    const auto n = v.rows() / 2;
    ComplexMatrix h = v.cast<std::complex<double>>();
    const std::complex<double> i_unit(0.0, 1.0);
    h.topRightCorner(n, n).diagonal().array() += i_unit;
    h.bottomLeftCorner(n, n).diagonal().array() -= i_unit;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("physicality_margin: eigenvalue solve failed");
    return solver.eigenvalues().minCoeff();
}

namespace detail {

/// Projects the steady 4n x 4n moments onto the (c, c^dag) sector and
/// returns the symmetrized quadrature covariance, optionally mapped back
/// to the original modes through the Bogoliubov matrix.
inline Eigen::MatrixXd quadrature_covariance(const ComplexMatrix& correlations, int n,
                                             const ComplexMatrix* back_transform) {
    ComplexMatrix sector(2 * n, 2 * n);
    const auto c0 = n, d0 = 3 * n;
    sector.topLeftCorner(n, n) = correlations.block(c0, c0, n, n);
    sector.topRightCorner(n, n) = correlations.block(c0, d0, n, n);
    sector.bottomLeftCorner(n, n) = correlations.block(d0, c0, n, n);
    sector.bottomRightCorner(n, n) = correlations.block(d0, d0, n, n);
    ComplexMatrix sym = 0.5 * (sector + sector.transpose());
    if (back_transform) sym = (*back_transform) * sym * back_transform->transpose();

    ComplexMatrix r(2 * n, 2 * n);
    const std::complex<double> i_unit(0.0, 1.0);
    r.topLeftCorner(n, n) = ComplexMatrix::Identity(n, n);
    r.topRightCorner(n, n) = ComplexMatrix::Identity(n, n);
    r.bottomLeftCorner(n, n) = -i_unit * ComplexMatrix::Identity(n, n);
    r.bottomRightCorner(n, n) = i_unit * ComplexMatrix::Identity(n, n);
    const ComplexMatrix v = r * sym * r.transpose();

    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    const double imag = v.imag().cwiseAbs().maxCoeff();
    if (imag > policy::imag_discard_rel * scale)
        throw NumericalError("steady covariance has a non-negligible imaginary residue "
                             + std::to_string(imag) + " at scale " + std::to_string(scale));
    return v.real();
}

}

/// Exact steady state of the linearized network stabilizing the cluster
/// state of graph a, with fidelity, nullifier, and cooperativity metrics.
inline SteadyStateResult solve_steady(const SystemParams& params, const Eigen::MatrixXd& a) {
    params.validate();
    require_valid_adjacency(a);
    if (a.rows() != params.n)
        throw ShapeError("solve_steady: adjacency size " + std::to_string(a.rows())
                         + " does not match n = " + std::to_string(params.n));
    const int n = params.n;
    const BogoliubovPair pair = cluster_bogoliubov(a, params.squeezing);
    const Eigen::VectorXd nbar = params.occupancies();
    const NoiseBlocks blocks = noise_blocks(pair, params.gamma, nbar);
    const ComplexMatrix m = drift_matrix(params, pair);
    const ComplexMatrix q = noise_matrix(params, blocks);

    SteadyStateResult result;
    result.stability = spectral_abscissa(m);
    result.correlations = solve_lyapunov(m, q);
    result.v_collective = detail::quadrature_covariance(result.correlations, n, nullptr);
    const ComplexMatrix back = bogoliubov_matrix(pair);
    result.v_mechanical = detail::quadrature_covariance(result.correlations, n, &back);
    result.fidelity = fidelity_from_covariance(result.v_collective);
    result.nullifier_variance = nullifier_variances(result.v_mechanical, a);
    result.nullifier_db.resize(n);
    for (int j = 0; j < n; ++j) {
        if (!(result.nullifier_variance(j) > 0.0))
            throw DefinitenessError("solve_steady: nullifier variance " + std::to_string(j + 1)
                                    + " is not positive");
        result.nullifier_db(j) = 10.0 * std::log10(result.nullifier_variance(j));
    }
    result.cooperativity = effective_noise(params, a).cooperativity;
    return result;
}

}
