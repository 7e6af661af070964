#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "mechcluster/errors.hpp"

namespace mechcluster {

using ComplexMatrix = Eigen::MatrixXcd;

/// Central numeric tolerances. All residual bounds are relative to the
/// natural scale of the quantities involved.
namespace policy {
/// Lyapunov residual bound: |M C + C M^T + Q|_max <= rel * (|M||C| + |Q|).
inline constexpr double lyapunov_residual_rel = 1e-10;
/// Hurwitz gate: spectral abscissa must lie below -rel * |M|_max.
inline constexpr double hurwitz_margin_rel = 1e-14;
/// Required relative symmetry of matrices passed to logdet_posdef.
inline constexpr double symmetry_tol_rel = 1e-10;
/// Imaginary parts of covariance entries below rel * scale are discarded,
/// larger ones raise an error.
inline constexpr double imag_discard_rel = 1e-10;
/// Bogoliubov pairs are accepted when both condition residuals stay below
/// rel * (1 + |X|_F^2 + |Y|_F^2).
inline constexpr double symplectic_check_rel = 1e-10;
/// Covariances count as physical while min eig(V + i Omega) >= floor.
inline constexpr double physicality_floor = -1e-9;
}

namespace detail {

inline void require_square(const ComplexMatrix& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw ShapeError(std::string(who) + ": expected a nonempty square matrix, got "
                         + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

}

/// Largest real part among the eigenvalues of m.
inline double spectral_abscissa(const ComplexMatrix& m) {
    detail::require_square(m, "spectral_abscissa");
    if (!m.allFinite()) throw DomainError("spectral_abscissa: matrix contains non-finite entries");
    Eigen::ComplexSchur<ComplexMatrix> schur(m, false);
    if (schur.info() != Eigen::Success)
        throw NumericalError("spectral_abscissa: Schur decomposition did not converge");
    return schur.matrixT().diagonal().real().maxCoeff();
}

/// Solves M C + C M^T + Q = 0 for C (plain transpose, not adjoint).
///
/// M must be Hurwitz; otherwise no steady solution exists and a
/// StabilityError is thrown. Uses a Schur reduction of M and triangular
/// back-substitution, then verifies the residual against the policy bound.
inline ComplexMatrix solve_lyapunov(const ComplexMatrix& m, const ComplexMatrix& q) {
    detail::require_square(m, "solve_lyapunov");
    if (q.rows() != m.rows() || q.cols() != m.cols())
        throw ShapeError("solve_lyapunov: Q must match M, got " + std::to_string(q.rows()) + "x"
                         + std::to_string(q.cols()) + " vs " + std::to_string(m.rows()) + "x"
                         + std::to_string(m.cols()));
    if (!m.allFinite() || !q.allFinite())
        throw DomainError("solve_lyapunov: inputs contain non-finite entries");

    const auto n = m.rows();
    const double m_norm = m.cwiseAbs().maxCoeff();
    const double q_norm = q.cwiseAbs().maxCoeff();

    Eigen::ComplexSchur<ComplexMatrix> schur(m, true);
    if (schur.info() != Eigen::Success)
        throw NumericalError("solve_lyapunov: Schur decomposition did not converge");
    const ComplexMatrix& u = schur.matrixU();
    const ComplexMatrix& t = schur.matrixT();

    const double abscissa = t.diagonal().real().maxCoeff();
    if (!(abscissa < -policy::hurwitz_margin_rel * std::max(m_norm, 1e-300)))
        throw StabilityError("solve_lyapunov: drift matrix is not Hurwitz (spectral abscissa "
                             + std::to_string(abscissa) + ")");

    // With C~ = U^H C conj(U) the equation becomes T C~ + C~ T^T = -Q~,
    // Q~ = U^H Q conj(U), solvable column by column from the right since
    // T is upper triangular.
    const ComplexMatrix qt = u.adjoint() * q * u.conjugate();
    ComplexMatrix ct(n, n);
    ComplexMatrix shifted = t;
    for (Eigen::Index j = n - 1; j >= 0; --j) {
        Eigen::VectorXcd rhs = -qt.col(j);
        const auto tail = n - 1 - j;
        if (tail > 0)
            rhs.noalias() -= ct.rightCols(tail) * t.row(j).segment(j + 1, tail).transpose();
        shifted.diagonal() = t.diagonal().array() + t(j, j);
        ct.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
    }
    ComplexMatrix c = u * ct * u.transpose();

    const double residual = (m * c + c * m.transpose() + q).cwiseAbs().maxCoeff();
    const double c_norm = c.cwiseAbs().maxCoeff();
    const double bound = policy::lyapunov_residual_rel * (m_norm * c_norm + q_norm);
    if (!(residual <= bound) || !c.allFinite()) {
        double min_pair = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j2 = 0; j2 < n; ++j2)
                min_pair = std::min(min_pair, std::abs(t(i, i) + t(j2, j2)));
        throw NumericalError("solve_lyapunov: residual " + std::to_string(residual)
                             + " exceeds bound " + std::to_string(bound)
                             + " (condition estimate |M|/min|lambda_i+lambda_j| = "
                             + std::to_string(m_norm / std::max(min_pair, 1e-300)) + ")");
    }
    return c;
}

/// log det V for a symmetric positive definite V, via Cholesky.
inline double logdet_posdef(const Eigen::MatrixXd& v) {
    if (v.rows() != v.cols() || v.rows() < 1)
        throw ShapeError("logdet_posdef: expected a nonempty square matrix, got "
                         + std::to_string(v.rows()) + "x" + std::to_string(v.cols()));
    if (!v.allFinite()) throw DomainError("logdet_posdef: matrix contains non-finite entries");
    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    const double asym = (v - v.transpose()).cwiseAbs().maxCoeff();
    if (asym > policy::symmetry_tol_rel * scale)
        throw ShapeError("logdet_posdef: matrix is not symmetric (residual "
                         + std::to_string(asym) + " at scale " + std::to_string(scale) + ")");
    const Eigen::MatrixXd sym = 0.5 * (v + v.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(sym);
    if (llt.info() != Eigen::Success)
        throw DefinitenessError("logdet_posdef: matrix is not positive definite");
    const auto& l = llt.matrixLLT();
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < sym.rows(); ++i) {
        if (!(l(i, i) > 0.0))
            throw DefinitenessError("logdet_posdef: matrix is not positive definite");
        logdet += 2.0 * std::log(l(i, i));
    }
    return logdet;
}

}
