#pragma once

// Rigid transforms: an orthogonal matrix plus a translation, acting
// state-wise on a time series. Orthogonality means orthonormal columns
// (M^T M = I within tolerance); mirroring is allowed, so determinants
// of -1 are as valid as +1.

#include <Eigen/Dense>
#include <Eigen/QR>

#include <cmath>
#include <random>
#include <utility>

#include "tscong/errors.hpp"
#include "tscong/time_series.hpp"

namespace tscong {

inline constexpr double kOrthogonalityTol = 1e-9;

// True iff max |(M^T M - I)_{ij}| <= tol. Non-square matrices fail.
inline bool validate_orthogonal(const Eigen::MatrixXd& m, double tol = kOrthogonalityTol) {
    if (m.rows() != m.cols() || m.rows() == 0) return false;
    Eigen::MatrixXd gram = m.transpose() * m;
    gram.diagonal().array() -= 1.0;
    return gram.cwiseAbs().maxCoeff() <= tol;
}

struct RigidTransform {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd translation;

    RigidTransform(Eigen::MatrixXd m, Eigen::VectorXd v, double tol = kOrthogonalityTol)
        : matrix(std::move(m)), translation(std::move(v)) {
        if (matrix.rows() != matrix.cols())
            throw InputError("rigid transform matrix must be square");
        if (translation.size() != matrix.rows())
            throw InputError("rigid transform translation has mismatched dimension");
        if (!validate_orthogonal(matrix, tol))
            throw InputError("rigid transform matrix is not orthogonal");
    }

    static RigidTransform identity(Eigen::Index k) {
        return RigidTransform(Eigen::MatrixXd::Identity(k, k), Eigen::VectorXd::Zero(k));
    }

    Eigen::Index dim() const { return matrix.rows(); }
};

// State i of the result is M * t_i + v.
inline TimeSeries apply_transform(const RigidTransform& tr, const TimeSeries& t) {
    if (tr.dim() != t.dim()) throw InputError("apply_transform: dimension mismatch");
    Eigen::MatrixXd moved =
        (t.states() * tr.matrix.transpose()).rowwise() + tr.translation.transpose();
    return TimeSeries(std::move(moved));
}

// Orthonormalized Gaussian matrix: QR with the R-diagonal sign fix,
// which makes the draw Haar-distributed over the orthogonal group.
template <class URBG>
Eigen::MatrixXd random_orthogonal(Eigen::Index k, URBG& rng) {
    if (k < 1) throw InputError("random_orthogonal: dimension must be >= 1");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd g(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
        for (Eigen::Index c = 0; c < k; ++c) g(r, c) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::VectorXd rdiag = qr.matrixQR().diagonal();
    for (Eigen::Index j = 0; j < k; ++j)
        if (rdiag(j) < 0) q.col(j) = -q.col(j);
    return q;
}

inline Eigen::Matrix2d rotation2(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::Matrix2d m;
    m << c, -s, s, c;
    return m;
}

// Reflection across the line at angle theta/2.
inline Eigen::Matrix2d reflection2(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::Matrix2d m;
    m << c, s, s, -c;
    return m;
}

}  // namespace tscong
