#pragma once

// Time series over R^k and the l_p family of series distances: states
// are compared with the Euclidean distance, per-state distances are
// aggregated with a vector p-norm, and series of different lengths are
// compared by sliding the shorter one as a window over the longer and
// keeping the best offset.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tscong/errors.hpp"

namespace tscong {

inline void require_p(double p) {
    if (!(p >= 1.0)) throw InputError("norm exponent p must be >= 1");
}

// p-norm of a vector for runtime p >= 1.
inline double lp_norm(const Eigen::VectorXd& v, double p) {
    require_p(p);
    if (p == 1.0) return v.cwiseAbs().sum();
    if (p == 2.0) return v.norm();
    return std::pow(v.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

class TimeSeries {
public:
    // One state per row; n x k with n >= 1, k >= 1.
    explicit TimeSeries(Eigen::MatrixXd states) : states_(std::move(states)) {
        if (states_.rows() < 1) throw InputError("time series must contain at least one state");
        if (states_.cols() < 1) throw InputError("time series states must have dimension >= 1");
    }

    static TimeSeries from_states(const std::vector<Eigen::VectorXd>& states) {
        if (states.empty()) throw InputError("time series must contain at least one state");
        Eigen::MatrixXd m(static_cast<Eigen::Index>(states.size()), states.front().size());
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (states[i].size() != m.cols())
                throw InputError("state " + std::to_string(i) + " has mismatched dimension");
            m.row(static_cast<Eigen::Index>(i)) = states[i];
        }
        return TimeSeries(std::move(m));
    }

    Eigen::Index size() const { return states_.rows(); }
    Eigen::Index dim() const { return states_.cols(); }

    Eigen::MatrixXd::ConstRowXpr state(Eigen::Index i) const { return states_.row(i); }
    const Eigen::MatrixXd& states() const { return states_; }

    double max_state_norm() const { return states_.rowwise().norm().maxCoeff(); }

    TimeSeries negated() const { return TimeSeries(-states_); }

    bool operator==(const TimeSeries& other) const {
        return states_.rows() == other.states_.rows() &&
               states_.cols() == other.states_.cols() &&
               states_.cwiseEqual(other.states_).all();
    }

private:
    Eigen::MatrixXd states_;
};

inline TimeSeries concat(const TimeSeries& a, const TimeSeries& b) {
    if (a.dim() != b.dim()) throw InputError("concat: dimension mismatch");
    Eigen::MatrixXd m(a.size() + b.size(), a.dim());
    m.topRows(a.size()) = a.states();
    m.bottomRows(b.size()) = b.states();
    return TimeSeries(std::move(m));
}

// States b .. b+len-1 of t, in order.
inline TimeSeries subseries(const TimeSeries& t, Eigen::Index b, Eigen::Index len) {
    if (b < 0 || b >= t.size()) throw InputError("subseries: start index out of range");
    if (len < 1 || len > t.size() - b) throw InputError("subseries: length out of range");
    return TimeSeries(t.states().middleRows(b, len));
}

inline double state_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double p) {
    if (x.size() != y.size()) throw InputError("state_distance: dimension mismatch");
    return lp_norm(x - y, p);
}

// ||(d2(s_i, t_i))_i||_p for series of equal length.
inline double series_distance_equal(const TimeSeries& s, const TimeSeries& t, double p) {
    require_p(p);
    if (s.size() != t.size()) throw InputError("series_distance_equal: length mismatch");
    if (s.dim() != t.dim()) throw InputError("series_distance_equal: dimension mismatch");
    Eigen::VectorXd gaps = (s.states() - t.states()).rowwise().norm();
    return lp_norm(gaps, p);
}

struct WindowedValue {
    double value = std::numeric_limits<double>::infinity();
    // Start of the best window in the longer series; ties go to the
    // smallest offset. 0 when both series have the same length.
    Eigen::Index offset = 0;
};

// Best-window series distance; symmetric in (s, t).
inline WindowedValue series_distance(const TimeSeries& s, const TimeSeries& t, double p) {
    require_p(p);
    if (s.dim() != t.dim()) throw InputError("series_distance: dimension mismatch");
    const TimeSeries& shorter = s.size() <= t.size() ? s : t;
    const TimeSeries& longer = s.size() <= t.size() ? t : s;
    const Eigen::Index m = shorter.size();
    WindowedValue best;
    for (Eigen::Index b = 0; b + m <= longer.size(); ++b) {
        Eigen::VectorXd gaps =
            (shorter.states() - longer.states().middleRows(b, m)).rowwise().norm();
        const double v = lp_norm(gaps, p);
        if (v < best.value) {
            best.value = v;
            best.offset = b;
        }
    }
    return best;
}

}  // namespace tscong
