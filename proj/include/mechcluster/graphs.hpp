#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "mechcluster/errors.hpp"

namespace mechcluster {

enum class GraphKind { linear, rectangular, complete };

inline const char* to_string(GraphKind kind) {
    switch (kind) {
        case GraphKind::linear: return "linear";
        case GraphKind::rectangular: return "rectangular";
        case GraphKind::complete: return "complete";
    }
    throw DomainError("unknown graph kind");
}

inline GraphKind graph_kind_from_string(const std::string& name) {
    if (name == "linear") return GraphKind::linear;
    if (name == "rectangular") return GraphKind::rectangular;
    if (name == "complete") return GraphKind::complete;
    throw DomainError("unknown graph kind '" + name + "' (expected linear, rectangular, or complete)");
}

/// Builds the adjacency matrix of a standard graph on n nodes.
///
/// linear: a path 1-2-...-n. complete: every pair connected. rectangular:
/// a 2 x n/2 ladder, nodes 1..n/2 forming the first row, n/2+1..n the
/// second, with edges along each row and rungs between the rows; requires
/// n even and n >= 4.
inline Eigen::MatrixXd make_graph(GraphKind kind, int n) {
    if (n < 1) throw ShapeError("make_graph: node count must be >= 1, got " + std::to_string(n));
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    switch (kind) {
        case GraphKind::linear:
            for (int j = 0; j + 1 < n; ++j) a(j, j + 1) = a(j + 1, j) = 1.0;
            break;
        case GraphKind::complete:
            a.setOnes();
            a.diagonal().setZero();
            break;
        case GraphKind::rectangular: {
            if (n % 2 != 0 || n < 4)
                throw ShapeError("make_graph: rectangular graph requires an even node count >= 4, got "
                                 + std::to_string(n));
            const int cols = n / 2;
            for (int row = 0; row < 2; ++row)
                for (int j = 0; j + 1 < cols; ++j) {
                    const int u = row * cols + j;
                    a(u, u + 1) = a(u + 1, u) = 1.0;
                }
            for (int j = 0; j < cols; ++j) a(j, cols + j) = a(cols + j, j) = 1.0;
            break;
        }
    }
    return a;
}

struct AdjacencyReport {
    double symmetry_residual = 0.0;
    double diagonal_residual = 0.0;
    bool finite = true;
    bool pass = false;
};

/// Checks that a candidate adjacency matrix is square, finite, symmetric,
/// and has a zero diagonal, within an absolute tolerance on the residuals.
inline AdjacencyReport validate_adjacency(const Eigen::MatrixXd& a, double tol = 0.0) {
    if (a.rows() != a.cols() || a.rows() < 1)
        throw ShapeError("validate_adjacency: expected a nonempty square matrix, got "
                         + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    AdjacencyReport report;
    report.finite = a.allFinite();
    if (report.finite) {
        report.symmetry_residual = (a - a.transpose()).cwiseAbs().maxCoeff();
        report.diagonal_residual = a.diagonal().cwiseAbs().maxCoeff();
    } else {
        report.symmetry_residual = report.diagonal_residual = std::numeric_limits<double>::infinity();
    }
    report.pass = report.finite && report.symmetry_residual <= tol && report.diagonal_residual <= tol;
    return report;
}

/// Throws unless the matrix is a valid weighted adjacency matrix.
inline void require_valid_adjacency(const Eigen::MatrixXd& a) {
    const double scale = a.size() > 0 && a.allFinite() ? std::max(1.0, a.cwiseAbs().maxCoeff()) : 1.0;
    const AdjacencyReport report = validate_adjacency(a, 1e-12 * scale);
    if (!report.finite) throw DomainError("adjacency matrix contains non-finite entries");
    if (!report.pass)
        throw DomainError("adjacency matrix must be symmetric with zero diagonal (symmetry residual "
                          + std::to_string(report.symmetry_residual) + ", diagonal residual "
                          + std::to_string(report.diagonal_residual) + ")");
}

/// Writes a square matrix as plain text: the size n on the first line,
/// then n lines of n space-separated entries at full double precision.
inline void save_square_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw ShapeError("save_square_matrix: expected a nonempty square matrix");
    const auto n = m.rows();
    out << n << "\n";
    char buf[40];
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            out << (j ? " " : "") << buf;
        }
        out << "\n";
    }
    if (!out) throw ConfigError("save_square_matrix: write failed");
}

inline Eigen::MatrixXd load_square_matrix(std::istream& in) {
    long long n = 0;
    if (!(in >> n)) throw ConfigError("matrix file: missing or malformed size line");
    if (n < 1 || n > 100000) throw ConfigError("matrix file: invalid size " + std::to_string(n));
    Eigen::MatrixXd m(n, n);
    for (long long i = 0; i < n; ++i)
        for (long long j = 0; j < n; ++j) {
            double v = 0.0;
            if (!(in >> v))
                throw ConfigError("matrix file: expected " + std::to_string(n * n)
                                  + " entries, failed at row " + std::to_string(i + 1)
                                  + " column " + std::to_string(j + 1));
            if (!std::isfinite(v))
                throw ConfigError("matrix file: non-finite entry at row " + std::to_string(i + 1)
                                  + " column " + std::to_string(j + 1));
            m(i, j) = v;
        }
    std::string trailing;
    if (in >> trailing) throw ConfigError("matrix file: unexpected trailing content '" + trailing + "'");
    return m;
}

inline void save_adjacency(std::ostream& out, const Eigen::MatrixXd& a) {
    require_valid_adjacency(a);
    save_square_matrix(out, a);
}

inline Eigen::MatrixXd load_adjacency(std::istream& in) {
    Eigen::MatrixXd a = load_square_matrix(in);
    require_valid_adjacency(a);
    return a;
}

inline void save_adjacency_file(const std::string& path, const Eigen::MatrixXd& a) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    save_adjacency(out, a);
}

inline Eigen::MatrixXd load_adjacency_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open adjacency file '" + path + "'");
    try {
        return load_adjacency(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline Eigen::MatrixXd load_square_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open matrix file '" + path + "'");
    try {
        return load_square_matrix(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}
