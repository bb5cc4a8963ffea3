#pragma once

// Congruence-distance solvers.
//
// The congruence distance d^C_p(S, T) = min over orthogonal M and
// translation v of d_p(S, M*T + v) is NP-hard to compute exactly, so
// this module offers a contract split by matrix class:
//   - certified exact minima over enumerable classes (axis-sign
//     "boolean" matrices, signed permutations) and over a dense
//     rotation/reflection grid in the plane with a reported Lipschitz
//     error bound;
//   - elsewhere, an alternating upper-bound optimizer with restarts:
//     translation via the geometric median (Weiszfeld) and matrix via
//     IRLS-weighted orthogonal alignment (SVD projection).
// Every result carries the witness transform and a certification flag.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "tscong/errors.hpp"
#include "tscong/parallel.hpp"
#include "tscong/rigid_transform.hpp"
#include "tscong/rng.hpp"
#include "tscong/time_series.hpp"

namespace tscong {

enum class SolverMode { Iterative, BooleanMatrices, GridK2, SignedPermutations };

struct SolverConfig {
    SolverMode mode = SolverMode::Iterative;
    double grid_resolution = 1e-3;  // radians, grid-k2 only
    int max_iters = 500;
    double weiszfeld_tol = 1e-10;
    double irls_eps = 1e-12;
    int restarts = 8;
    std::uint64_t seed = 0;
    int boolean_k_max = 20;

    void validate() const {
        if (!(grid_resolution > 0)) throw InputError("grid_resolution must be > 0");
        if (max_iters < 1) throw InputError("max_iters must be >= 1");
        if (!(weiszfeld_tol > 0)) throw InputError("weiszfeld_tol must be > 0");
        if (!(irls_eps > 0)) throw InputError("irls_eps must be > 0");
        if (restarts < 1) throw InputError("restarts must be >= 1");
        if (boolean_k_max < 1) throw InputError("boolean_k_max must be >= 1");
    }
};

struct CongruenceResult {
    double value = 0.0;
    RigidTransform transform;
    SolverMode mode = SolverMode::Iterative;
    bool certified_exact = false;
    // Grid mode only: the optimum over the continuous group lies within
    // this bound below the reported value.
    double error_bound = 0.0;
};

// d_p(S, M*T + v) for series of equal length.
inline double transformed_series_distance(const TimeSeries& s, const TimeSeries& t,
                                          const Eigen::MatrixXd& m, const Eigen::VectorXd& v,
                                          double p) {
    Eigen::MatrixXd moved = (t.states() * m.transpose()).rowwise() + v.transpose();
    Eigen::VectorXd gaps = (s.states() - moved).rowwise().norm();
    return lp_norm(gaps, p);
}

namespace detail {

inline void require_congruence_pair(const TimeSeries& s, const TimeSeries& t) {
    if (s.size() != t.size()) throw InputError("congruence distance: length mismatch");
    if (s.dim() != t.dim()) throw InputError("congruence distance: dimension mismatch");
}

// Geometric median of the rows of `points` (minimizer of the summed
// Euclidean distances) by Weiszfeld iteration. When an iterate pins to
// a data point the iterate is nudged by `eps` along the first
// coordinate, the usual degeneracy fix.
inline Eigen::VectorXd geometric_median(const Eigen::MatrixXd& points, double tol, int max_iters,
                                        double eps) {
    const Eigen::Index n = points.rows();
    if (n == 1) return points.row(0);
    Eigen::VectorXd v = points.colwise().mean();
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXd num = Eigen::VectorXd::Zero(points.cols());
        double den = 0.0;
        bool pinned = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = (points.row(i).transpose() - v).norm();
            if (d < eps) pinned = true;
            const double w = 1.0 / std::max(d, eps);
            num += w * points.row(i).transpose();
            den += w;
        }
        Eigen::VectorXd next = num / den;
        const double step = (next - v).norm();
        v = next;
        if (step <= tol * (1.0 + v.norm())) break;
        if (pinned && step < eps) v(0) += eps;
    }
    return v;
}

// Minimizer of sum_i ||p_i - v||^p via IRLS; exact mean for p = 2,
// Weiszfeld for p = 1.
inline Eigen::VectorXd lp_center(const Eigen::MatrixXd& points, double p, double tol,
                                 int max_iters, double eps) {
    if (p == 1.0) return geometric_median(points, tol, max_iters, eps);
    if (p == 2.0) return points.colwise().mean();
    Eigen::VectorXd v = points.colwise().mean();
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXd num = Eigen::VectorXd::Zero(points.cols());
        double den = 0.0;
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            const double d = std::max((points.row(i).transpose() - v).norm(), eps);
            const double w = std::pow(d, p - 2.0);
            num += w * points.row(i).transpose();
            den += w;
        }
        Eigen::VectorXd next = num / den;
        const double step = (next - v).norm();
        v = next;
        if (step <= tol * (1.0 + v.norm())) break;
    }
    return v;
}

// Orthogonal M maximizing tr(M^T C) for C = sum_i w_i a_i b_i^T, i.e.
// the minimizer of sum_i w_i ||a_i - M b_i||^2. Reflections are
// admissible group elements, so no determinant correction is applied.
inline Eigen::MatrixXd weighted_orthogonal_alignment(const Eigen::MatrixXd& a_rows,
                                                     const Eigen::MatrixXd& b_rows,
                                                     const Eigen::VectorXd& weights) {
    Eigen::MatrixXd cross = a_rows.transpose() * weights.asDiagonal() * b_rows;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace detail

// Upper bound on d^C_p with a witness transform. Alternates a
// translation step (l_p center of the residuals s_i - M t_i, exact for
// p = 1 via Weiszfeld) with an IRLS-weighted orthogonal alignment of
// the translated states, keeping the best iterate seen across
// `restarts` random orthogonal starts. The identity start makes the
// result never worse than d_p(S, T).
inline CongruenceResult congruence_distance_upper(const TimeSeries& s, const TimeSeries& t,
                                                  double p, const SolverConfig& cfg = {}) {
    detail::require_congruence_pair(s, t);
    require_p(p);
    cfg.validate();
    const Eigen::Index k = s.dim();
    const Eigen::Index n = s.size();

    Eigen::MatrixXd best_m = Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd best_v = Eigen::VectorXd::Zero(k);
    double best_value = transformed_series_distance(s, t, best_m, best_v, p);

    auto consider = [&](const Eigen::MatrixXd& m, const Eigen::VectorXd& v) {
        const double value = transformed_series_distance(s, t, m, v, p);
        if (value < best_value) {
            best_value = value;
            best_m = m;
            best_v = v;
        }
        return value;
    };

    for (int r = 0; r < cfg.restarts; ++r) {
        Eigen::MatrixXd m;
        if (r == 0) {
            m = Eigen::MatrixXd::Identity(k, k);
        } else {
            auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(r));
            m = random_orthogonal(k, rng);
            if (r % 2 == 0) m.col(0) = -m.col(0);  // cover both components
        }
        double prev = std::numeric_limits<double>::infinity();
        for (int it = 0; it < cfg.max_iters; ++it) {
            Eigen::MatrixXd residuals = s.states() - t.states() * m.transpose();
            Eigen::VectorXd v =
                detail::lp_center(residuals, p, cfg.weiszfeld_tol, cfg.max_iters, cfg.irls_eps);

            Eigen::VectorXd weights(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d = std::max((residuals.row(i).transpose() - v).norm(), cfg.irls_eps);
                weights(i) = p == 2.0 ? 1.0 : std::pow(d, p - 2.0);
            }
            Eigen::MatrixXd shifted = s.states().rowwise() - v.transpose();
            m = detail::weighted_orthogonal_alignment(shifted, t.states(), weights);

            const double value = consider(m, v);
            if (std::abs(prev - value) <= cfg.weiszfeld_tol * (1.0 + value)) break;
            prev = value;
        }
    }

    CongruenceResult result{best_value, RigidTransform(best_m, best_v), SolverMode::Iterative,
                            false, 0.0};
    return result;
}

// Exact minimum of d_1(S, M*T) over the 2^k axis-sign matrices
// (diagonal +-1). With `with_translation` the translation is
// additionally Weiszfeld-optimized per candidate, which forfeits the
// exactness certificate. Enumeration order is the sign mask in
// ascending binary order, bit d flipping dimension d; ties keep the
// smallest mask.
inline CongruenceResult congruence_distance_boolean(const TimeSeries& s, const TimeSeries& t,
                                                    bool with_translation = false,
                                                    const SolverConfig& cfg = {}) {
    detail::require_congruence_pair(s, t);
    cfg.validate();
    const Eigen::Index k = s.dim();
    if (k > cfg.boolean_k_max)
        throw CapabilityError("boolean matrix search is capped at dimension " +
                              std::to_string(cfg.boolean_k_max));
    const Eigen::Index n = s.size();
    const std::uint64_t masks = std::uint64_t(1) << k;

    struct Best {
        double value = std::numeric_limits<double>::infinity();
        std::uint64_t mask = 0;
        Eigen::VectorXd v;
    };

    auto chunk = [&](std::size_t begin, std::size_t end) {
        Best best;
        Eigen::VectorXd signs(k);
        for (std::size_t mask = begin; mask < end; ++mask) {
            for (Eigen::Index d = 0; d < k; ++d)
                signs(d) = (mask >> d) & 1 ? -1.0 : 1.0;
            double value = 0.0;
            Eigen::VectorXd v = Eigen::VectorXd::Zero(k);
            if (with_translation) {
                Eigen::MatrixXd residuals = s.states() - t.states() * signs.asDiagonal();
                v = detail::geometric_median(residuals, cfg.weiszfeld_tol, cfg.max_iters,
                                             cfg.irls_eps);
                value = (residuals.rowwise() - v.transpose()).rowwise().norm().sum();
            } else {
                for (Eigen::Index i = 0; i < n; ++i) {
                    double ss = 0.0;
                    for (Eigen::Index d = 0; d < k; ++d) {
                        const double diff = s.states()(i, d) - signs(d) * t.states()(i, d);
                        ss += diff * diff;
                    }
                    value += std::sqrt(ss);
                }
            }
            if (value < best.value) best = Best{value, mask, v};
        }
        return best;
    };
    auto combine = [](Best acc, Best part) { return part.value < acc.value ? part : acc; };

    const bool threaded = static_cast<double>(masks) * static_cast<double>(n) *
                              static_cast<double>(k) > 2e6;
    Best best = parallel_reduce(static_cast<std::size_t>(masks),
                                Best{std::numeric_limits<double>::infinity(), 0,
                                     Eigen::VectorXd::Zero(k)},
                                chunk, combine, threaded);

    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(k, k);
    for (Eigen::Index d = 0; d < k; ++d)
        if ((best.mask >> d) & 1) m(d, d) = -1.0;
    return CongruenceResult{best.value, RigidTransform(std::move(m), best.v),
                            SolverMode::BooleanMatrices, !with_translation, 0.0};
}

// Dense-grid oracle for the plane: enumerates rotations and reflections
// at `grid_resolution` radians, Weiszfeld-optimizes the translation per
// candidate, and reports a Lipschitz error bound L * grid_resolution
// with L = (sum_i ||t_i||^p)^(1/p), so the continuous optimum is at
// least value - error_bound. Rotations are scanned before reflections;
// ties keep the first candidate.
inline CongruenceResult congruence_distance_grid_k2(const TimeSeries& s, const TimeSeries& t,
                                                    const SolverConfig& cfg = {}, double p = 1.0) {
    if (s.dim() != 2 || t.dim() != 2)
        throw CapabilityError("grid search is only available for dimension 2");
    detail::require_congruence_pair(s, t);
    require_p(p);
    cfg.validate();

    const std::size_t angles =
        static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / cfg.grid_resolution));
    const std::size_t candidates = 2 * angles;

    struct Best {
        double value = std::numeric_limits<double>::infinity();
        Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
        Eigen::Vector2d v = Eigen::Vector2d::Zero();
    };

    auto chunk = [&](std::size_t begin, std::size_t end) {
        Best best;
        for (std::size_t c = begin; c < end; ++c) {
            const double theta = static_cast<double>(c % angles) * cfg.grid_resolution;
            const Eigen::Matrix2d m = c < angles ? rotation2(theta) : reflection2(theta);
            Eigen::MatrixXd residuals = s.states() - t.states() * m.transpose();
            Eigen::VectorXd v =
                detail::lp_center(residuals, p, cfg.weiszfeld_tol, cfg.max_iters, cfg.irls_eps);
            const double value = lp_norm((residuals.rowwise() - v.transpose()).rowwise().norm(), p);
            if (value < best.value) best = Best{value, m, v};
        }
        return best;
    };
    auto combine = [](Best acc, Best part) { return part.value < acc.value ? part : acc; };
    Best best = parallel_reduce(candidates, Best{}, chunk, combine,
                                candidates * static_cast<std::size_t>(s.size()) > 50000);

    const double lipschitz = lp_norm(t.states().rowwise().norm(), p);
    return CongruenceResult{best.value,
                            RigidTransform(best.m, best.v),
                            SolverMode::GridK2,
                            false,
                            lipschitz * cfg.grid_resolution};
}

// Exact minimum of d_1(S, M*T) over signed permutation matrices
// (k! * 2^k candidates, v = 0). Permutations are scanned in
// lexicographic order with sign masks ascending inside each.
inline CongruenceResult signed_permutation_search(const TimeSeries& s, const TimeSeries& t) {
    detail::require_congruence_pair(s, t);
    const Eigen::Index k = s.dim();
    if (k > 6) throw CapabilityError("signed permutation search is capped at dimension 6");
    const Eigen::Index n = s.size();

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);

    double best_value = std::numeric_limits<double>::infinity();
    std::vector<Eigen::Index> best_perm = perm;
    std::uint64_t best_mask = 0;

    Eigen::VectorXd mapped(k);
    do {
        for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << k); ++mask) {
            double value = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                // (M t)[perm[c]] = sign_c * t[c]
                for (Eigen::Index c = 0; c < k; ++c) {
                    const double sign = (mask >> c) & 1 ? -1.0 : 1.0;
                    mapped(perm[static_cast<std::size_t>(c)]) = sign * t.states()(i, c);
                }
                value += (s.states().row(i).transpose() - mapped).norm();
            }
            if (value < best_value) {
                best_value = value;
                best_perm = perm;
                best_mask = mask;
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index c = 0; c < k; ++c)
        m(best_perm[static_cast<std::size_t>(c)], c) = (best_mask >> c) & 1 ? -1.0 : 1.0;
    return CongruenceResult{best_value, RigidTransform(std::move(m), Eigen::VectorXd::Zero(k)),
                            SolverMode::SignedPermutations, true, 0.0};
}

}  // namespace tscong
