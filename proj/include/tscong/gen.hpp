#pragma once

// Randomized perturbation generator and the ratio-experiment harness.
//
// Each explosion picks a random subset of states, computes their
// barycenter, and scales the subset about it by a factor mu drawn from
// [1/eta, eta]. Perturbed series stay roughly aligned with their
// origin, so the plain series distance is a usable stand-in for the
// congruence distance when measuring how tight the delta distances are.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "tscong/errors.hpp"
#include "tscong/parallel.hpp"
#include "tscong/rng.hpp"
#include "tscong/structure.hpp"
#include "tscong/time_series.hpp"

namespace tscong {

struct GenParams {
    double eta = 2.0;
    int explosions = 1;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(eta > 1.0)) throw InputError("eta must be > 1");
        if (explosions < 1) throw InputError("explosion count must be >= 1");
    }
};

// One explosion with everything random already drawn: scales the listed
// states about their barycenter by mu. mu = 1 is the identity, and a
// singleton subset is always left unchanged (the state is its own
// barycenter).
inline void scale_about_barycenter(Eigen::MatrixXd& states,
                                   const std::vector<Eigen::Index>& subset, double mu) {
    if (subset.empty()) throw InputError("explosion subset must be non-empty");
    Eigen::RowVectorXd barycenter = Eigen::RowVectorXd::Zero(states.cols());
    for (Eigen::Index i : subset) barycenter += states.row(i);
    barycenter /= static_cast<double>(subset.size());
    for (Eigen::Index i : subset)
        states.row(i) = barycenter + mu * (states.row(i) - barycenter);
}

// Applies `explosions` rounds of random subset scaling. Subsets include
// each index independently with probability 1/2 and are redrawn while
// empty; mu is uniform on [1/eta, eta]. Deterministic per (input, rng
// state).
template <class URBG>
TimeSeries gen(const TimeSeries& series, double eta, int explosions, URBG& rng) {
    if (!(eta > 1.0)) throw InputError("eta must be > 1");
    if (explosions < 1) throw InputError("explosion count must be >= 1");

    Eigen::MatrixXd states = series.states();
    std::bernoulli_distribution keep(0.5);
    std::uniform_real_distribution<double> scale(1.0 / eta, eta);

    std::vector<Eigen::Index> subset;
    for (int e = 0; e < explosions; ++e) {
        subset.clear();
        do {
            subset.clear();
            for (Eigen::Index i = 0; i < series.size(); ++i)
                if (keep(rng)) subset.push_back(i);
        } while (subset.empty());
        scale_about_barycenter(states, subset, scale(rng));
    }
    return TimeSeries(std::move(states));
}

inline TimeSeries gen(const TimeSeries& series, const GenParams& params) {
    params.validate();
    auto rng = make_rng(params.seed);
    return gen(series, params.eta, params.explosions, rng);
}

enum class CorpusKind { RandomWalk, Smooth, Loop };

// Seeded synthetic corpus; member i is generated from the stream
// (seed, i), so the corpus is reproducible and order-independent.
//   random-walk: standard Gaussian increments
//   smooth:      three-component low-frequency sinusoid mix per dimension
//   loop:        closed planar curves (circle / ellipse / square by turn)
inline std::vector<TimeSeries> synth_corpus(std::size_t count, Eigen::Index length,
                                            Eigen::Index dim, CorpusKind kind,
                                            std::uint64_t seed) {
    if (count < 1) throw InputError("corpus count must be >= 1");
    if (length < 1 || dim < 1) throw InputError("corpus length and dim must be >= 1");
    if (kind == CorpusKind::Loop && dim < 2)
        throw InputError("loop corpus requires dimension >= 2");

    std::vector<TimeSeries> corpus;
    corpus.reserve(count);
    for (std::size_t idx = 0; idx < count; ++idx) {
        auto rng = make_rng(seed, idx);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::MatrixXd states(length, dim);

        switch (kind) {
            case CorpusKind::RandomWalk: {
                Eigen::RowVectorXd at(dim);
                for (Eigen::Index d = 0; d < dim; ++d) at(d) = gauss(rng);
                for (Eigen::Index i = 0; i < length; ++i) {
                    states.row(i) = at;
                    for (Eigen::Index d = 0; d < dim; ++d) at(d) += gauss(rng);
                }
                break;
            }
            case CorpusKind::Smooth: {
                std::uniform_real_distribution<double> amp(0.5, 1.5);
                std::uniform_real_distribution<double> freq(0.5, 3.0);
                std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
                for (Eigen::Index d = 0; d < dim; ++d) {
                    double a[3], f[3], ph[3];
                    for (int h = 0; h < 3; ++h) {
                        a[h] = amp(rng);
                        f[h] = freq(rng);
                        ph[h] = phase(rng);
                    }
                    for (Eigen::Index i = 0; i < length; ++i) {
                        const double u = static_cast<double>(i) / static_cast<double>(length);
                        double x = 0.0;
                        for (int h = 0; h < 3; ++h)
                            x += a[h] * std::sin(2.0 * std::numbers::pi * f[h] * u + ph[h]);
                        states(i, d) = x;
                    }
                }
                break;
            }
            case CorpusKind::Loop: {
                std::uniform_real_distribution<double> radius(0.5, 2.0);
                states.setZero();
                const int shape = static_cast<int>(idx % 3);
                const double r = radius(rng);
                if (shape == 0 || shape == 1) {
                    const double minor = shape == 0 ? r : r * 0.5;
                    for (Eigen::Index i = 0; i < length; ++i) {
                        const double ang =
                            2.0 * std::numbers::pi * static_cast<double>(i) /
                            static_cast<double>(length);
                        states(i, 0) = r * std::cos(ang);
                        states(i, 1) = minor * std::sin(ang);
                    }
                } else {
                    // square of side 2r traversed at uniform arclength
                    const double perimeter = 8.0 * r;
                    for (Eigen::Index i = 0; i < length; ++i) {
                        double u = perimeter * static_cast<double>(i) /
                                   static_cast<double>(length);
                        double x = 0.0, y = 0.0;
                        const double side = 2.0 * r;
                        if (u < side) {
                            x = -r + u;
                            y = -r;
                        } else if (u < 2 * side) {
                            x = r;
                            y = -r + (u - side);
                        } else if (u < 3 * side) {
                            x = r - (u - 2 * side);
                            y = r;
                        } else {
                            x = -r;
                            y = r - (u - 3 * side);
                        }
                        states(i, 0) = x;
                        states(i, 1) = y;
                    }
                }
                break;
            }
        }
        corpus.push_back(TimeSeries(std::move(states)));
    }
    return corpus;
}

struct RatioRecord {
    std::size_t series_id = 0;
    double d1 = 0.0;                // d_1(S, gen(S))
    double delta_m = 0.0;           // max-column delta distance
    double reduced_delta_m = 0.0;   // max-column reduced delta distance
    double e_delta = 0.0;           // d1 / (2 * delta_m)
    double e_reduced = 0.0;         // d1 / (2 * reduced_delta_m)
};

struct RatioExperimentResult {
    std::vector<RatioRecord> records;
    std::size_t excluded = 0;  // members whose denominators were zero
    double mean_e_delta = std::numeric_limits<double>::quiet_NaN();
    double mean_e_reduced = std::numeric_limits<double>::quiet_NaN();
};

// Perturbs every corpus member with gen and reports the ratio of the
// series distance to twice each delta distance. Per-member RNG streams
// derive from (seed, index), so parallel execution cannot change the
// outcome.
inline RatioExperimentResult ratio_experiment(const std::vector<TimeSeries>& corpus,
                                              const GenParams& params) {
    if (corpus.empty()) throw InputError("ratio experiment needs a non-empty corpus");
    params.validate();

    struct Partial {
        std::vector<RatioRecord> records;
        std::size_t excluded = 0;
    };
    auto chunk = [&](std::size_t begin, std::size_t end) {
        Partial part;
        for (std::size_t i = begin; i < end; ++i) {
            const TimeSeries& original = corpus[i];
            auto rng = make_rng(params.seed, i);
            const TimeSeries perturbed = gen(original, params.eta, params.explosions, rng);

            const double d1 = series_distance_equal(original, perturbed, 1.0);
            const double dm = delta_distance(original, perturbed, StructureNorm::max_column()).value;
            const double rm =
                reduced_delta_distance(original, perturbed, StructureNorm::max_column()).value;
            if (dm <= 0.0 || rm <= 0.0) {
                ++part.excluded;
                continue;
            }
            part.records.push_back(
                RatioRecord{i, d1, dm, rm, d1 / (2.0 * dm), d1 / (2.0 * rm)});
        }
        return part;
    };
    auto combine = [](Partial acc, Partial part) {
        acc.records.insert(acc.records.end(), part.records.begin(), part.records.end());
        acc.excluded += part.excluded;
        return acc;
    };
    Partial all = parallel_reduce(corpus.size(), Partial{}, chunk, combine, corpus.size() >= 4);

    RatioExperimentResult result;
    result.records = std::move(all.records);
    result.excluded = all.excluded;
    if (!result.records.empty()) {
        double sum_d = 0.0, sum_r = 0.0;
        for (const auto& rec : result.records) {
            sum_d += rec.e_delta;
            sum_r += rec.e_reduced;
        }
        result.mean_e_delta = sum_d / static_cast<double>(result.records.size());
        result.mean_e_reduced = sum_r / static_cast<double>(result.records.size());
    }
    return result;
}

}  // namespace tscong
