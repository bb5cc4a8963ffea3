#pragma once

// Wall-clock scaling measurements for the distance measures, with a
// log-log regression of median times against series length.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tscong/errors.hpp"
#include "tscong/gen.hpp"
#include "tscong/structure.hpp"
#include "tscong/time_series.hpp"

namespace tscong {

enum class BenchMeasure { Series, Delta, ReducedDelta };

struct BenchRow {
    std::size_t length = 0;
    double median_seconds = 0.0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    double fitted_exponent = 0.0;
};

// Least-squares slope of log t against log n.
inline double fit_exponent(const std::vector<BenchRow>& rows) {
    if (rows.size() < 2) throw InputError("exponent fit needs at least two lengths");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rows) {
        const double x = std::log(static_cast<double>(r.length));
        const double y = std::log(r.median_seconds);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(rows.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline BenchResult run_bench(const std::vector<std::size_t>& lengths, Eigen::Index dim,
                             BenchMeasure measure, int repeats, std::uint64_t seed) {
    if (repeats < 1) throw InputError("repeats must be >= 1");
    if (lengths.size() < 2) throw InputError("bench needs at least two lengths");
    for (std::size_t n : lengths)
        if (n < 2) throw InputError("bench lengths must be >= 2");

    using clock = std::chrono::steady_clock;
    BenchResult result;
    double sink = 0.0;

    for (std::size_t n : lengths) {
        const auto pair = synth_corpus(2, static_cast<Eigen::Index>(n), dim,
                                       CorpusKind::RandomWalk, seed ^ n);
        const TimeSeries& a = pair[0];
        const TimeSeries& b = pair[1];

        auto eval = [&]() {
            switch (measure) {
                case BenchMeasure::Series:
                    return series_distance_equal(a, b, 1.0);
                case BenchMeasure::Delta:
                    return delta_distance(a, b, StructureNorm::max_column()).value;
                case BenchMeasure::ReducedDelta:
                    return reduced_delta_distance(a, b, StructureNorm::max_column()).value;
            }
            return 0.0;
        };

        // Calibrate the inner loop so one sample spans a few ms.
        auto t0 = clock::now();
        sink += eval();
        double once = std::chrono::duration<double>(clock::now() - t0).count();
        const int iters = std::max(1, static_cast<int>(std::ceil(0.004 / std::max(once, 1e-7))));

        std::vector<double> samples;
        samples.reserve(static_cast<std::size_t>(repeats));
        for (int r = 0; r < repeats; ++r) {
            t0 = clock::now();
            for (int i = 0; i < iters; ++i) sink += eval();
            const double span = std::chrono::duration<double>(clock::now() - t0).count();
            samples.push_back(span / iters);
        }
        std::sort(samples.begin(), samples.end());
        result.rows.push_back(BenchRow{n, samples[samples.size() / 2]});
    }

    if (!std::isfinite(sink)) throw VerificationError("bench produced a non-finite distance");
    result.fitted_exponent = fit_exponent(result.rows);
    return result;
}

}  // namespace tscong
