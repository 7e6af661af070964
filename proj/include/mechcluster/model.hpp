#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "mechcluster/constants.hpp"
#include "mechcluster/errors.hpp"
#include "mechcluster/graphs.hpp"
#include "mechcluster/numerics.hpp"

namespace mechcluster {

/// Mean thermal occupancy of a mode at angular frequency omega [rad/s]
/// and temperature t [K].
inline double thermal_occupancy(double omega, double temperature) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw DomainError("thermal_occupancy: frequency must be positive, got " + std::to_string(omega));
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        throw DomainError("thermal_occupancy: temperature must be >= 0, got " + std::to_string(temperature));
    if (temperature == 0.0) return 0.0;
    const double x = constants::hbar * omega / (constants::k_boltzmann * temperature);
    return 1.0 / std::expm1(x);
}

/// Physical parameters of n mechanical modes, each coupled to its own
/// driven cavity mode. All frequencies and rates are angular [rad/s].
struct SystemParams {
    int n = 0;
    Eigen::VectorXd omega_m;   ///< mechanical frequencies, strictly positive and distinct
    Eigen::VectorXd kappa;     ///< cavity linewidths
    Eigen::VectorXd gamma;     ///< mechanical linewidths
    Eigen::VectorXd g_tilde;   ///< effective linearized couplings
    double squeezing = 0.0;    ///< target squeezing parameter r
    double temperature = 0.0;  ///< bath temperature [K]

    /// Bare single-photon couplings g(k, j); empty means uniform 1
    /// (drive amplitudes are then reported in units of g).
    Eigen::MatrixXd g_single;
    /// Per-cavity drive detunings; empty means 0.
    Eigen::VectorXd delta;
    /// Absolute cavity frequencies; when empty, drive tones are reported
    /// relative to the effective cavity frequency.
    Eigen::VectorXd omega_c;
    /// Testing hook: fixed bath occupancies overriding the thermal law.
    Eigen::VectorXd nbar_override;

    void validate() const {
        if (n < 1) throw DomainError("SystemParams: n must be >= 1, got " + std::to_string(n));
        auto check_vec = [&](const Eigen::VectorXd& v, const char* name, bool required) {
            if (!required && v.size() == 0) return;
            if (v.size() != n)
                throw ShapeError(std::string("SystemParams: ") + name + " must have length "
                                 + std::to_string(n) + ", got " + std::to_string(v.size()));
            if (!v.allFinite())
                throw DomainError(std::string("SystemParams: ") + name + " contains non-finite entries");
        };
        check_vec(omega_m, "omega_m", true);
        check_vec(kappa, "kappa", true);
        check_vec(gamma, "gamma", true);
        check_vec(g_tilde, "g_tilde", true);
        check_vec(delta, "delta", false);
        check_vec(omega_c, "omega_c", false);
        check_vec(nbar_override, "nbar_override", false);
        if ((omega_m.array() <= 0.0).any())
            throw DomainError("SystemParams: mechanical frequencies must be positive");
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                if (omega_m(j) == omega_m(k))
                    throw DomainError("SystemParams: mechanical frequencies must be distinct (modes "
                                      + std::to_string(j + 1) + " and " + std::to_string(k + 1) + ")");
        if ((kappa.array() < 0.0).any()) throw DomainError("SystemParams: kappa must be >= 0");
        if ((gamma.array() < 0.0).any()) throw DomainError("SystemParams: gamma must be >= 0");
        if ((g_tilde.array() < 0.0).any()) throw DomainError("SystemParams: g_tilde must be >= 0");
        if (!(squeezing >= 0.0) || !std::isfinite(squeezing))
            throw DomainError("SystemParams: squeezing must be >= 0, got " + std::to_string(squeezing));
        if (!(temperature >= 0.0) || !std::isfinite(temperature))
            throw DomainError("SystemParams: temperature must be >= 0, got " + std::to_string(temperature));
        if (g_single.size() != 0) {
            if (g_single.rows() != n || g_single.cols() != n)
                throw ShapeError("SystemParams: g_single must be " + std::to_string(n) + "x"
                                 + std::to_string(n));
            if (!g_single.allFinite() || (g_single.array() < 0.0).any())
                throw DomainError("SystemParams: g_single entries must be finite and >= 0");
        }
        if (nbar_override.size() != 0 && (nbar_override.array() < 0.0).any())
            throw DomainError("SystemParams: nbar_override entries must be >= 0");
    }

    /// Bath occupancies per mechanical mode.
    Eigen::VectorXd occupancies() const {
        if (nbar_override.size() != 0) return nbar_override;
        Eigen::VectorXd nb(n);
        for (int j = 0; j < n; ++j) nb(j) = thermal_occupancy(omega_m(j), temperature);
        return nb;
    }

    /// Smallest gap between two mechanical frequencies.
    double min_spacing() const {
        double spacing = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                spacing = std::min(spacing, std::abs(omega_m(j) - omega_m(k)));
        return n > 1 ? spacing : omega_m(0);
    }

    /// Per-cavity detuning with the empty default resolved.
    double delta_at(int k) const { return delta.size() ? delta(k) : 0.0; }

    /// Bare coupling with the empty default resolved.
    double g_single_at(int k, int j) const { return g_single.size() ? g_single(k, j) : 1.0; }
};

/// Coefficient pair (X, Y) of collective modes c_k = sum_j X_kj b_j + Y_kj b_j^dag.
struct BogoliubovPair {
    ComplexMatrix x;
    ComplexMatrix y;
    int n() const { return static_cast<int>(x.rows()); }
};

struct BogoliubovCheck {
    double unitarity_residual = 0.0;  ///< |X X^H - Y Y^H - I|_max
    double symmetry_residual = 0.0;   ///< |X Y^T - Y X^T|_max
    bool pass = false;
};

namespace detail {

inline void require_pair_shapes(const BogoliubovPair& pair, const char* who) {
    if (pair.x.rows() != pair.x.cols() || pair.x.rows() < 1)
        throw ShapeError(std::string(who) + ": X must be a nonempty square matrix");
    if (pair.y.rows() != pair.x.rows() || pair.y.cols() != pair.x.cols())
        throw ShapeError(std::string(who) + ": Y must match X, got " + std::to_string(pair.y.rows())
                         + "x" + std::to_string(pair.y.cols()));
    if (!pair.x.allFinite() || !pair.y.allFinite())
        throw DomainError(std::string(who) + ": pair contains non-finite entries");
}

inline double pair_scale(const BogoliubovPair& pair) {
    return 1.0 + pair.x.squaredNorm() + pair.y.squaredNorm();
}

}

/// Verifies the two Bogoliubov conditions X X^H - Y Y^H = I and
/// X Y^T = Y X^T within an absolute tolerance.
inline BogoliubovCheck check_bogoliubov(const BogoliubovPair& pair, double tol) {
    detail::require_pair_shapes(pair, "check_bogoliubov");
    const auto n = pair.x.rows();
    BogoliubovCheck out;
    out.unitarity_residual = (pair.x * pair.x.adjoint() - pair.y * pair.y.adjoint()
                              - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    out.symmetry_residual = (pair.x * pair.y.transpose() - pair.y * pair.x.transpose()).cwiseAbs().maxCoeff();
    out.pass = out.unitarity_residual <= tol && out.symmetry_residual <= tol;
    return out;
}

/// Bogoliubov pair whose collective modes have the Gaussian cluster state
/// of graph a, squeezed by r in each nullifier, as their joint vacuum.
inline BogoliubovPair cluster_bogoliubov(const Eigen::MatrixXd& a, double r) {
    require_valid_adjacency(a);
    if (!std::isfinite(r)) throw DomainError("cluster_bogoliubov: squeezing must be finite");
    const auto n = a.rows();
    const std::complex<double> half_i(0.0, 0.5);
    BogoliubovPair pair;
    pair.x = std::cosh(r) * ComplexMatrix::Identity(n, n) - half_i * std::exp(r) * a;
    pair.y = -std::sinh(r) * ComplexMatrix::Identity(n, n) - half_i * std::exp(r) * a;
    return pair;
}

/// 2n x 2n matrix mapping collective correlations back to the original
/// modes, (b, b^dag) = B (c, c^dag). Rejects pairs that fail the
/// Bogoliubov conditions at the policy tolerance.
inline ComplexMatrix bogoliubov_matrix(const BogoliubovPair& pair) {
    detail::require_pair_shapes(pair, "bogoliubov_matrix");
    const double tol = policy::symplectic_check_rel * detail::pair_scale(pair);
    const BogoliubovCheck check = check_bogoliubov(pair, tol);
    if (!check.pass)
        throw DomainError("bogoliubov_matrix: pair violates the Bogoliubov conditions (residuals "
                          + std::to_string(check.unitarity_residual) + ", "
                          + std::to_string(check.symmetry_residual) + " at tolerance "
                          + std::to_string(tol) + ")");
    const auto n = pair.x.rows();
    ComplexMatrix b(2 * n, 2 * n);
    b.topLeftCorner(n, n) = pair.x.adjoint();
    b.topRightCorner(n, n) = -pair.y.transpose();
    b.bottomLeftCorner(n, n) = -pair.y.adjoint();
    b.bottomRightCorner(n, n) = pair.x.transpose();
    return b;
}

struct DampingMatrices {
    ComplexMatrix w;  ///< collective damping kernel
    ComplexMatrix t;  ///< anomalous damping kernel
};

/// Damping kernels of the collective modes for per-mode mechanical
/// linewidths gamma_j.
inline DampingMatrices damping_matrices(const BogoliubovPair& pair, const Eigen::VectorXd& gamma) {
    detail::require_pair_shapes(pair, "damping_matrices");
    const auto n = pair.x.rows();
    if (gamma.size() != n)
        throw ShapeError("damping_matrices: gamma must have length " + std::to_string(n)
                         + ", got " + std::to_string(gamma.size()));
    if (!gamma.allFinite() || (gamma.array() < 0.0).any())
        throw DomainError("damping_matrices: gamma must be finite and >= 0");
    const Eigen::VectorXcd half = (0.5 * gamma.array()).cast<std::complex<double>>();
    DampingMatrices out;
    out.w = pair.x * half.asDiagonal() * pair.x.adjoint() - pair.y * half.asDiagonal() * pair.y.adjoint();
    out.t = pair.x * half.asDiagonal() * pair.y.transpose() - pair.y * half.asDiagonal() * pair.x.transpose();
    return out;
}

/// Second moments of the collective noise forces, grouped by operator
/// ordering. minus_plus is <F F^dag>-like, plus_minus <F^dag F>-like,
/// minus_minus <F F>-like, plus_plus <F^dag F^dag>-like.
struct NoiseBlocks {
    ComplexMatrix minus_plus;
    ComplexMatrix plus_minus;
    ComplexMatrix minus_minus;
    ComplexMatrix plus_plus;
};

inline NoiseBlocks noise_blocks(const BogoliubovPair& pair, const Eigen::VectorXd& gamma,
                                const Eigen::VectorXd& nbar) {
    detail::require_pair_shapes(pair, "noise_blocks");
    const auto n = pair.x.rows();
    if (gamma.size() != n || nbar.size() != n)
        throw ShapeError("noise_blocks: gamma and nbar must have length " + std::to_string(n));
    if (!gamma.allFinite() || (gamma.array() < 0.0).any())
        throw DomainError("noise_blocks: gamma must be finite and >= 0");
    if (!nbar.allFinite() || (nbar.array() < 0.0).any())
        throw DomainError("noise_blocks: nbar must be finite and >= 0");
    const Eigen::VectorXcd gn = (gamma.array() * nbar.array()).cast<std::complex<double>>();
    const Eigen::VectorXcd gn1 = (gamma.array() * (nbar.array() + 1.0)).cast<std::complex<double>>();
    const ComplexMatrix& x = pair.x;
    const ComplexMatrix& y = pair.y;
    NoiseBlocks out;
    out.minus_plus = x * gn1.asDiagonal() * x.adjoint() + y * gn.asDiagonal() * y.adjoint();
    out.plus_minus = x.conjugate() * gn.asDiagonal() * x.transpose()
                     + y.conjugate() * gn1.asDiagonal() * y.transpose();
    out.minus_minus = x * gn1.asDiagonal() * y.transpose() + y * gn.asDiagonal() * x.transpose();
    out.plus_plus = x.conjugate() * gn.asDiagonal() * y.adjoint() + y.conjugate() * gn1.asDiagonal() * x.adjoint();
    return out;
}

/// Effective thermal decoherence rates of the collective modes and the
/// resulting quantum cooperativities.
struct EffectiveNoise {
    Eigen::VectorXd xi_exact;    ///< diagonal of the normally ordered noise kernel
    Eigen::VectorXd xi_approx;   ///< large-squeezing approximation
    double xi_star = 0.0;        ///< graph-independent average rate
    Eigen::VectorXd cooperativity;  ///< 4 g_tilde_k^2 / (kappa_k xi_k)
};

inline EffectiveNoise effective_noise(const SystemParams& params, const Eigen::MatrixXd& a) {
    params.validate();
    require_valid_adjacency(a);
    if (a.rows() != params.n)
        throw ShapeError("effective_noise: adjacency size " + std::to_string(a.rows())
                         + " does not match n = " + std::to_string(params.n));
    const int n = params.n;
    const Eigen::VectorXd nb = params.occupancies();
    const BogoliubovPair pair = cluster_bogoliubov(a, params.squeezing);
    const NoiseBlocks blocks = noise_blocks(pair, params.gamma, nb);
    const double e2r = std::exp(2.0 * params.squeezing);

    EffectiveNoise out;
    out.xi_exact = blocks.plus_minus.diagonal().real();
    out.xi_approx.resize(n);
    const Eigen::VectorXd weights = params.gamma.array() * (nb.array() + 0.5);
    for (int j = 0; j < n; ++j) {
        double neighbors = 0.0;
        for (int jp = 0; jp < n; ++jp) neighbors += a(j, jp) * a(j, jp) * weights(jp);
        out.xi_approx(j) = 0.5 * e2r * (weights(j) + neighbors);
    }
    out.xi_star = 0.5 * e2r * weights.sum();
    out.cooperativity.resize(n);
    for (int k = 0; k < n; ++k) {
        const double denom = params.kappa(k) * out.xi_exact(k);
        out.cooperativity(k) = denom > 0.0 ? 4.0 * params.g_tilde(k) * params.g_tilde(k) / denom
                                           : std::numeric_limits<double>::infinity();
    }
    return out;
}

/// Uniform mechanical linewidth at which the average decoherence rate
/// matches the collective optical damping 4 g_tilde^2 / kappa. Assumes the
/// uniform kappa, g_tilde profile of the first mode.
inline double gamma_star_uniform(const SystemParams& params) {
    params.validate();
    const Eigen::VectorXd nb = params.occupancies();
    const double sum = (nb.array() + 0.5).sum();
    const double gt = params.g_tilde(0);
    const double kappa = params.kappa(0);
    if (!(kappa > 0.0) || !(sum > 0.0))
        throw DomainError("gamma_star_uniform: requires kappa > 0 and a nonempty mode set");
    return 8.0 * gt * gt / (kappa * std::exp(2.0 * params.squeezing) * sum);
}

/// Complete description of the 2n drive tones per cavity.
struct DriveSet {
    /// Tone frequencies, n x 2n: column m < n is the red tone addressing
    /// mechanical mode m, column m + n the corresponding blue tone.
    /// Absolute when the cavity frequencies are known, otherwise relative
    /// to the effective cavity frequency.
    Eigen::MatrixXd lambda;
    Eigen::MatrixXcd epsilon;    ///< drive amplitudes
    Eigen::MatrixXcd alpha_bar;  ///< steady intracavity amplitudes per tone
    bool absolute = false;
};

/// Tone frequency table of the drive pattern; see DriveSet::lambda.
inline Eigen::MatrixXd drive_frequencies(const SystemParams& params) {
    params.validate();
    const int n = params.n;
    Eigen::MatrixXd lambda(n, 2 * n);
    for (int k = 0; k < n; ++k) {
        const double base = params.omega_c.size() ? params.omega_c(k) + params.delta_at(k) : 0.0;
        for (int m = 0; m < n; ++m) {
            lambda(k, m) = base - params.omega_m(m);
            lambda(k, m + n) = base + params.omega_m(m);
        }
    }
    return lambda;
}

/// Drive amplitudes realizing the engineered couplings for the cluster
/// state of graph a: tone (k, j) carries the red weight X_kj, tone
/// (k, j+n) the blue weight Y_kj, scaled by g_tilde_k / g_single(k, j).
inline DriveSet synthesize_drives(const SystemParams& params, const Eigen::MatrixXd& a) {
    params.validate();
    require_valid_adjacency(a);
    if (a.rows() != params.n)
        throw ShapeError("synthesize_drives: adjacency size " + std::to_string(a.rows())
                         + " does not match n = " + std::to_string(params.n));
    const int n = params.n;
    const BogoliubovPair pair = cluster_bogoliubov(a, params.squeezing);

    DriveSet out;
    out.lambda = drive_frequencies(params);
    out.absolute = params.omega_c.size() != 0;
    out.epsilon = Eigen::MatrixXcd::Zero(n, 2 * n);
    out.alpha_bar = Eigen::MatrixXcd::Zero(n, 2 * n);
    for (int k = 0; k < n; ++k) {
        const double dk = params.delta_at(k);
        const std::complex<double> half_kappa(0.0, 0.5 * params.kappa(k));
        for (int j = 0; j < n; ++j) {
            const std::complex<double> xkj = pair.x(k, j);
            const std::complex<double> ykj = pair.y(k, j);
            const double g = params.g_single_at(k, j);
            if (xkj != 0.0 || ykj != 0.0) {
                if (!(g > 0.0))
                    throw SynthesisError("synthesize_drives: tones (" + std::to_string(k + 1) + ", "
                                         + std::to_string(j + 1)
                                         + ") require a positive bare coupling g_single("
                                         + std::to_string(k + 1) + ", " + std::to_string(j + 1) + ")");
                const double weight = params.g_tilde(k) / g;
                out.alpha_bar(k, j) = weight * xkj;
                out.alpha_bar(k, j + n) = weight * ykj;
                out.epsilon(k, j) = (dk - params.omega_m(j) + half_kappa) * out.alpha_bar(k, j);
                out.epsilon(k, j + n) = (dk + params.omega_m(j) + half_kappa) * out.alpha_bar(k, j + n);
            }
        }
    }
    return out;
}

/// One scattering channel of the validity analysis: tone m' of cavity k
/// driving a spurious process at the frequency scale rhs.
struct RwaTriple {
    int k = 0;
    int m = 0;
    int mp = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

/// Margins of the rotating-wave treatment underlying the model.
struct RwaReport {
    double safety = 1.0;
    double scalar_ratio = 0.0;    ///< max g_tilde e^r / (2 min spacing)
    double sideband_ratio = 0.0;  ///< max kappa / min spacing
    /// Direct off-resonant beam-splitter / squeezing processes.
    std::vector<RwaTriple> family1;
    /// Mechanically mediated processes near the difference frequencies.
    std::vector<RwaTriple> family2;
    /// Mechanically mediated processes near the sum frequencies.
    std::vector<RwaTriple> family3;
    /// All ratios, including both mediated families, within 1/safety.
    bool pass_full = false;
    /// Scalar, sideband, and direct-process ratios within 1/safety.
    bool pass_first_order = false;

    double worst_family(const std::vector<RwaTriple>& fam) const {
        double worst = 0.0;
        for (const auto& t : fam) worst = std::max(worst, t.ratio);
        return worst;
    }
    /// Largest first-order ratio; the margin the pass gate uses.
    double first_order_ratio() const {
        return std::max({scalar_ratio, sideband_ratio, worst_family(family1)});
    }
    double worst_ratio() const {
        return std::max({first_order_ratio(), worst_family(family2), worst_family(family3)});
    }
};

/// Evaluates every validity ratio of the drive pattern for the cluster
/// state of graph a. Requires distinct mechanical frequencies.
inline RwaReport check_rwa(const SystemParams& params, const Eigen::MatrixXd& a, double safety = 1.0) {
    params.validate();
    require_valid_adjacency(a);
    if (a.rows() != params.n)
        throw ShapeError("check_rwa: adjacency size " + std::to_string(a.rows())
                         + " does not match n = " + std::to_string(params.n));
    if (!(safety >= 1.0))
        throw DomainError("check_rwa: safety factor must be >= 1, got " + std::to_string(safety));
    const int n = params.n;
    const double spacing = params.min_spacing();
    if (!(spacing > 0.0))
        throw DomainError("check_rwa: mechanical frequencies are degenerate");

    const double r = params.squeezing;
    const double cr = std::cosh(r);
    const double er2 = 0.5 * std::exp(r);
    // |X(k, m)| with the zero diagonal of a: cosh r on the diagonal,
    // (e^r / 2) |a| elsewhere. Bounds |Y(k, m)| as well.
    auto mag = [&](int k, int m) { return (k == m ? cr : 0.0) + er2 * std::abs(a(k, m)); };
    const double inf = std::numeric_limits<double>::infinity();

    RwaReport report;
    report.safety = safety;
    report.scalar_ratio = params.g_tilde.maxCoeff() * std::exp(r) / (2.0 * spacing);
    report.sideband_ratio = params.kappa.maxCoeff() / spacing;

    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m)
            for (int mp = 0; mp < n; ++mp) {
                if (m == mp) continue;
                const double weight = mag(k, mp);
                const double rhs = std::abs(params.omega_m(m) - params.omega_m(mp));
                double lhs = 0.0;
                if (weight > 0.0) {
                    const double g_mp = params.g_single_at(k, mp);
                    lhs = g_mp > 0.0 ? params.g_tilde(k) * params.g_single_at(k, m) / g_mp * weight : inf;
                }
                report.family1.push_back({k, m, mp, lhs, rhs, lhs / rhs});
            }

    for (int family = 2; family <= 3; ++family)
        for (int k = 0; k < n; ++k)
            for (int m = 0; m < n; ++m)
                for (int mp = 0; mp < n; ++mp) {
                    if (family == 2 && m == mp) continue;
                    const double rhs = family == 2
                        ? std::abs(params.omega_m(m) - params.omega_m(mp))
                        : params.omega_m(m) + params.omega_m(mp);
                    const double num = mag(k, m) * mag(k, mp);
                    double lhs = 0.0;
                    if (num > 0.0) {
                        const double g_m = params.g_single_at(k, m);
                        const double g_mp = params.g_single_at(k, mp);
                        if (!(g_m > 0.0) || !(g_mp > 0.0)) {
                            lhs = inf;
                        } else {
                            for (int j = 0; j < n; ++j) {
                                const double gj = params.g_single_at(k, j);
                                double detune;
                                if (family == 2) {
                                    const double base = params.omega_m(mp) - params.omega_m(m);
                                    detune = std::min(std::abs(base - params.omega_m(j)),
                                                      std::abs(base + params.omega_m(j)));
                                } else {
                                    detune = std::abs(params.omega_m(mp) + params.omega_m(m)
                                                      - params.omega_m(j));
                                }
                                const double denom = std::sqrt(detune * detune
                                                               + 0.25 * params.gamma(j) * params.gamma(j));
                                const double term = denom > 0.0
                                    ? 2.0 * params.g_tilde(k) * params.g_tilde(k) * gj * gj * num
                                          / (g_m * g_mp * denom)
                                    : inf;
                                lhs = std::max(lhs, term);
                            }
                        }
                    }
                    auto& fam = family == 2 ? report.family2 : report.family3;
                    fam.push_back({k, m, mp, lhs, rhs, lhs / rhs});
                }

    const double limit = 1.0 / safety;
    report.pass_first_order = report.first_order_ratio() <= limit;
    report.pass_full = report.pass_first_order && report.worst_family(report.family2) <= limit
                       && report.worst_family(report.family3) <= limit;
    return report;
}

}
