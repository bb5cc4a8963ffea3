#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "tscong/parallel.hpp"
#include "tscong/rigid_transform.hpp"
#include "tscong/rng.hpp"
#include "tscong/structure.hpp"

using namespace tscong;
using Catch::Approx;

namespace {

// The pair whose full structures differ in exactly one entry while the
// reduced structures coincide.
TimeSeries diverging_s() {
    Eigen::MatrixXd m(4, 2);
    m << -4, 0, 0, 0, 0, 3, -4, 0;
    return TimeSeries(m);
}
TimeSeries diverging_t() {
    Eigen::MatrixXd m(4, 2);
    m << -4, 0, 0, 0, 0, 3, 4, 0;
    return TimeSeries(m);
}

TimeSeries random_series(Eigen::Index n, Eigen::Index k, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd m(n, k);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index d = 0; d < k; ++d) m(i, d) = gauss(rng);
    return TimeSeries(std::move(m));
}

void require_rows(const StructureMatrix& m, const std::vector<std::vector<double>>& expect) {
    REQUIRE(m.row_count() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) {
        REQUIRE(m.row(i).size() == expect[i].size());
        for (std::size_t a = 0; a < expect[i].size(); ++a)
            REQUIRE(m.row(i)[a] == Approx(expect[i][a]).margin(1e-12));
    }
}

}  // namespace

TEST_CASE("full structure entries", "[structure]") {
    require_rows(structure(diverging_s()), {{4, 5, 0}, {3, 4}, {5}});
    require_rows(structure(diverging_t()), {{4, 5, 8}, {3, 4}, {5}});

    const TimeSeries constant(Eigen::MatrixXd::Ones(5, 3));
    const StructureMatrix c = structure(constant);
    for (std::size_t i = 0; i < c.row_count(); ++i)
        for (double e : c.row(i)) REQUIRE(e == 0.0);

    REQUIRE(structure(TimeSeries(Eigen::MatrixXd::Zero(1, 2))).row_count() == 0);
}

TEST_CASE("reduced structure entries", "[structure]") {
    require_rows(reduced_structure(diverging_s()), {{4, 5}, {3, 4}, {5}});
    require_rows(reduced_structure(diverging_t()), {{4, 5}, {3, 4}, {5}});

    auto rng = make_rng(7);
    const TimeSeries two = random_series(2, 3, rng);
    const StructureMatrix full2 = structure(two);
    const StructureMatrix red2 = reduced_structure(two);
    REQUIRE(red2.row_count() == full2.row_count());
    REQUIRE(red2.row(0) == full2.row(0));

    const TimeSeries five = random_series(5, 2, rng);
    const StructureMatrix red5 = reduced_structure(five);
    REQUIRE(red5.row(0).size() == 3);  // lags 1, 2, 4
    REQUIRE(red5.lag_at(0) == 1);
    REQUIRE(red5.lag_at(1) == 2);
    REQUIRE(red5.lag_at(2) == 4);
}

TEST_CASE("norm of structure difference", "[structure]") {
    const StructureMatrix a = structure(diverging_s());
    const StructureMatrix b = structure(diverging_t());

    REQUIRE(norm_of_difference(a, a, StructureNorm::max_column()) == 0.0);
    REQUIRE(norm_of_difference(a, a, StructureNorm::p_norm(2.0)) == 0.0);

    // only the lag-3 column differs: |0 - 8|
    REQUIRE(norm_of_difference(a, b, StructureNorm::max_column()) == Approx(8.0));
    REQUIRE(norm_of_difference(a, b, StructureNorm::p_norm(1.0)) == Approx(8.0));

    auto rng = make_rng(9);
    const StructureMatrix other = structure(random_series(5, 2, rng));
    REQUIRE_THROWS_AS(norm_of_difference(a, other, StructureNorm::max_column()), InputError);
    REQUIRE_THROWS_AS(norm_of_difference(a, reduced_structure(diverging_t()),
                                         StructureNorm::max_column()),
                      InputError);
}

TEST_CASE("delta distance known values", "[structure]") {
    const WindowedValue w =
        delta_distance(diverging_s(), diverging_t(), StructureNorm::max_column());
    REQUIRE(w.value == Approx(8.0).margin(1e-12));
    REQUIRE(w.offset == 0);

    const WindowedValue r =
        reduced_delta_distance(diverging_s(), diverging_t(), StructureNorm::max_column());
    REQUIRE(r.value == Approx(0.0).margin(1e-12));
}

TEST_CASE("delta distance of the flattened-triangle family", "[structure]") {
    for (double eps : {0.5, 0.1, 0.01}) {
        const double a = std::sqrt(1.0 - eps * eps);
        Eigen::MatrixXd s(3, 2), t(3, 2);
        s << -a, 0, 0, 0, a, 0;
        t << -a, 0, 0, eps, a, 0;
        const double expected = 2.0 * (1.0 - a);
        REQUIRE(delta_distance(TimeSeries(s), TimeSeries(t), StructureNorm::p_norm(1.0)).value ==
                Approx(expected).margin(1e-12));
    }
}

TEST_CASE("delta distance vanishes on congruent series", "[structure][property]") {
    auto rng = make_rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 12);
        const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % 6);
        const TimeSeries s = random_series(n, k, rng);
        Eigen::VectorXd v(k);
        for (Eigen::Index d = 0; d < k; ++d) v(d) = gauss(rng);
        const TimeSeries moved = apply_transform(RigidTransform(random_orthogonal(k, rng), v), s);

        const double tol = 1e-9 * (1.0 + s.max_state_norm());
        REQUIRE(delta_distance(s, moved, StructureNorm::max_column()).value <= tol);
        REQUIRE(delta_distance(s, moved, StructureNorm::p_norm(1.0)).value <= tol);
    }
}

TEST_CASE("windowed delta distance", "[structure]") {
    auto rng = make_rng(29);
    const TimeSeries longer = random_series(12, 3, rng);
    const TimeSeries piece = subseries(longer, 4, 5);

    const WindowedValue w = delta_distance(piece, longer, StructureNorm::max_column());
    REQUIRE(w.value == Approx(0.0).margin(1e-12));

    const WindowedValue swapped = delta_distance(longer, piece, StructureNorm::max_column());
    REQUIRE(w.value == swapped.value);
    REQUIRE(w.offset == swapped.offset);

    // single-state series compare as zero everywhere
    const TimeSeries one(Eigen::MatrixXd::Ones(1, 3));
    REQUIRE(delta_distance(one, one, StructureNorm::max_column()).value == 0.0);
    REQUIRE(delta_distance(one, longer, StructureNorm::p_norm(2.0)).value == 0.0);

    REQUIRE_THROWS_AS(delta_distance(one, TimeSeries(Eigen::MatrixXd::Ones(1, 2))), InputError);
}

TEST_CASE("lower-bound inequalities", "[structure][property]") {
    auto rng = make_rng(37);
    for (int trial = 0; trial < 60; ++trial) {
        const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % 5);
        const Eigen::Index n1 = 1 + static_cast<Eigen::Index>(rng() % 14);
        const Eigen::Index n2 = trial % 2 == 0 ? n1 : 1 + static_cast<Eigen::Index>(rng() % 14);
        const TimeSeries a = random_series(n1, k, rng);
        const TimeSeries b = random_series(n2, k, rng);

        const double d1 = series_distance(a, b, 1.0).value;
        const double delta_max = delta_distance(a, b, StructureNorm::max_column()).value;
        const double delta_sum = delta_distance(a, b, StructureNorm::p_norm(1.0)).value;
        const double red_max = reduced_delta_distance(a, b, StructureNorm::max_column()).value;
        const double red_sum = reduced_delta_distance(a, b, StructureNorm::p_norm(1.0)).value;

        const double slack = 1e-9 * (1.0 + d1);
        const auto min_len = static_cast<double>(std::min(a.size(), b.size()));
        REQUIRE(delta_max <= 2.0 * d1 + slack);
        REQUIRE(delta_sum <= (min_len - 1.0) * d1 + slack);
        REQUIRE(red_max <= delta_max + slack);
        REQUIRE(red_sum <= delta_sum + slack);
        if (min_len >= 3) {
            const double factor = std::floor(2.0 * std::log2(min_len - 1.0));
            REQUIRE(red_sum <= factor * d1 + slack);
        }
    }
}

TEST_CASE("delta distance is symmetric and triangular", "[structure][property]") {
    auto rng = make_rng(41);
    for (const StructureNorm& norm : {StructureNorm::max_column(), StructureNorm::p_norm(1.0)}) {
        for (int trial = 0; trial < 20; ++trial) {
            const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 8);
            const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % 4);
            const TimeSeries a = random_series(n, k, rng);
            const TimeSeries b = random_series(n, k, rng);
            const TimeSeries c = random_series(n, k, rng);

            const double ab = delta_distance(a, b, norm).value;
            const double ba = delta_distance(b, a, norm).value;
            const double ac = delta_distance(a, c, norm).value;
            const double cb = delta_distance(c, b, norm).value;
            REQUIRE(ab == Approx(ba).margin(1e-12));
            REQUIRE(ab <= ac + cb + 1e-9);
        }
    }
}

TEST_CASE("window search is independent of the thread cap", "[structure]") {
    auto rng = make_rng(53);
    const TimeSeries a = random_series(80, 8, rng);
    const TimeSeries b = random_series(200, 8, rng);

    set_thread_cap(1);
    const WindowedValue serial = delta_distance(a, b, StructureNorm::max_column());
    set_thread_cap(4);
    const WindowedValue threaded = delta_distance(a, b, StructureNorm::max_column());
    set_thread_cap(0);

    REQUIRE(serial.value == threaded.value);
    REQUIRE(serial.offset == threaded.offset);
}
