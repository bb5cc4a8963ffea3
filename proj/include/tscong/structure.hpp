#pragma once

// Self-similarity structures and the delta distances built on them.
//
// The full structure of a series T of length n holds every pairwise
// state distance d2(t_i, t_{i+j}), arranged as a ragged triangle indexed
// by start i and lag j >= 1. It is invariant under rigid transforms of
// T, which is what makes comparing structures a lower-bound filter for
// congruence. The reduced structure keeps only lags that are powers of
// two, trading the exact congruence characterization for O(n log n)
// size.
//
// Delta distances compare two structures entrywise under a matrix norm
// and slide a window when the series lengths differ. Note on norms: a
// "column" of the triangle is the set of entries sharing the same lag j,
// not the same start index, so the max-column norm maximizes per-lag
// absolute sums.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "tscong/errors.hpp"
#include "tscong/parallel.hpp"
#include "tscong/time_series.hpp"

namespace tscong {

enum class LagSet { Full, Pow2 };

struct StructureNorm {
    enum class Kind { MaxColumn, PNorm };
    Kind kind = Kind::MaxColumn;
    double p = 1.0;

    static StructureNorm max_column() { return {Kind::MaxColumn, 1.0}; }
    static StructureNorm p_norm(double p) {
        require_p(p);
        return {Kind::PNorm, p};
    }
};

class StructureMatrix {
public:
    static StructureMatrix full(const TimeSeries& t) { return StructureMatrix(t, LagSet::Full); }
    static StructureMatrix reduced(const TimeSeries& t) { return StructureMatrix(t, LagSet::Pow2); }

    Eigen::Index series_length() const { return n_; }
    LagSet lag_set() const { return lags_; }

    // Row i holds the entries d2(t_i, t_{i+j}) by increasing lag; a
    // length-1 series has no rows.
    std::size_t row_count() const { return rows_.size(); }
    const std::vector<double>& row(std::size_t i) const { return rows_[i]; }

    // Lag of slot a within any row: slots are a prefix of row 0's lags.
    Eigen::Index lag_at(std::size_t slot) const {
        return lags_ == LagSet::Full ? static_cast<Eigen::Index>(slot) + 1
                                     : Eigen::Index(1) << slot;
    }

    bool same_shape(const StructureMatrix& other) const {
        return n_ == other.n_ && lags_ == other.lags_;
    }

private:
    StructureMatrix(const TimeSeries& t, LagSet lags) : n_(t.size()), lags_(lags) {
        const Eigen::MatrixXd& s = t.states();
        if (n_ < 2) return;
        rows_.resize(static_cast<std::size_t>(n_ - 1));
        for (Eigen::Index i = 0; i + 1 < n_; ++i) {
            auto& row = rows_[static_cast<std::size_t>(i)];
            if (lags_ == LagSet::Full) {
                row.reserve(static_cast<std::size_t>(n_ - 1 - i));
                for (Eigen::Index j = 1; j < n_ - i; ++j)
                    row.push_back((s.row(i) - s.row(i + j)).norm());
            } else {
                for (Eigen::Index j = 1; j < n_ - i; j *= 2)
                    row.push_back((s.row(i) - s.row(i + j)).norm());
            }
        }
    }

    std::vector<std::vector<double>> rows_;
    Eigen::Index n_ = 0;
    LagSet lags_ = LagSet::Full;
};

inline StructureMatrix structure(const TimeSeries& t) { return StructureMatrix::full(t); }
inline StructureMatrix reduced_structure(const TimeSeries& t) { return StructureMatrix::reduced(t); }

// Matrix norm of the entrywise difference A - B; zero for empty
// structures (the empty-sum convention).
inline double norm_of_difference(const StructureMatrix& a, const StructureMatrix& b,
                                 const StructureNorm& norm) {
    if (!a.same_shape(b)) throw InputError("norm_of_difference: structure shape mismatch");
    if (a.row_count() == 0) return 0.0;

    if (norm.kind == StructureNorm::Kind::MaxColumn) {
        std::vector<double> column_sums(a.row(0).size(), 0.0);
        for (std::size_t i = 0; i < a.row_count(); ++i) {
            const auto& ra = a.row(i);
            const auto& rb = b.row(i);
            for (std::size_t slot = 0; slot < ra.size(); ++slot)
                column_sums[slot] += std::abs(ra[slot] - rb[slot]);
        }
        double best = 0.0;
        for (double c : column_sums) best = std::max(best, c);
        return best;
    }

    require_p(norm.p);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.row_count(); ++i) {
        const auto& ra = a.row(i);
        const auto& rb = b.row(i);
        for (std::size_t slot = 0; slot < ra.size(); ++slot) {
            const double d = std::abs(ra[slot] - rb[slot]);
            acc += norm.p == 1.0 ? d : std::pow(d, norm.p);
        }
    }
    return norm.p == 1.0 ? acc : std::pow(acc, 1.0 / norm.p);
}

namespace detail {

// Windows the longer series and recomputes the window structure per
// offset: O(w * m^2 * k) full, O(w * m log m * k) reduced, with w the
// number of windows. No incremental sharing between windows.
inline WindowedValue windowed_structure_distance(const TimeSeries& s, const TimeSeries& t,
                                                 const StructureNorm& norm, LagSet lags) {
    if (s.dim() != t.dim()) throw InputError("delta distance: dimension mismatch");
    const TimeSeries& shorter = s.size() <= t.size() ? s : t;
    const TimeSeries& longer = s.size() <= t.size() ? t : s;
    const Eigen::Index m = shorter.size();
    const std::size_t windows = static_cast<std::size_t>(longer.size() - m + 1);

    const StructureMatrix ref = lags == LagSet::Full ? StructureMatrix::full(shorter)
                                                     : StructureMatrix::reduced(shorter);

    const double per_window = static_cast<double>(m) * static_cast<double>(m) *
                              static_cast<double>(shorter.dim());
    const bool threaded = windows > 1 && per_window * static_cast<double>(windows) > 4e6;

    auto chunk = [&](std::size_t begin, std::size_t end) {
        WindowedValue best;
        for (std::size_t b = begin; b < end; ++b) {
            const TimeSeries window = subseries(longer, static_cast<Eigen::Index>(b), m);
            const StructureMatrix sw = lags == LagSet::Full ? StructureMatrix::full(window)
                                                            : StructureMatrix::reduced(window);
            const double v = norm_of_difference(ref, sw, norm);
            if (v < best.value) {
                best.value = v;
                best.offset = static_cast<Eigen::Index>(b);
            }
        }
        return best;
    };
    auto combine = [](WindowedValue acc, WindowedValue part) {
        return part.value < acc.value ? part : acc;
    };
    return parallel_reduce(windows, WindowedValue{}, chunk, combine, threaded);
}

}  // namespace detail

// Minimum over windows of || full structure difference ||; symmetric.
inline WindowedValue delta_distance(const TimeSeries& s, const TimeSeries& t,
                                    const StructureNorm& norm = StructureNorm::max_column()) {
    return detail::windowed_structure_distance(s, t, norm, LagSet::Full);
}

// Same minimization over reduced (power-of-two lag) structures.
inline WindowedValue reduced_delta_distance(const TimeSeries& s, const TimeSeries& t,
                                            const StructureNorm& norm = StructureNorm::max_column()) {
    return detail::windowed_structure_distance(s, t, norm, LagSet::Pow2);
}

}  // namespace tscong
