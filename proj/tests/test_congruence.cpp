#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "tscong/congruence.hpp"
#include "tscong/rigid_transform.hpp"
#include "tscong/rng.hpp"
#include "tscong/structure.hpp"

using namespace tscong;
using Catch::Approx;

namespace {

TimeSeries random_series(Eigen::Index n, Eigen::Index k, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd m(n, k);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index d = 0; d < k; ++d) m(i, d) = gauss(rng);
    return TimeSeries(std::move(m));
}

RigidTransform random_rigid(Eigen::Index k, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 2.0);
    Eigen::VectorXd v(k);
    for (Eigen::Index d = 0; d < k; ++d) v(d) = gauss(rng);
    return RigidTransform(random_orthogonal(k, rng), v);
}

TimeSeries example_s() {
    Eigen::MatrixXd m(3, 2);
    m << -4, 0, 0, 0, 1, 0;
    return TimeSeries(m);
}
TimeSeries example_t() {
    Eigen::MatrixXd m(3, 2);
    m << 0, 3, 0, 0, 1, 0;
    return TimeSeries(m);
}

}  // namespace

TEST_CASE("iterative upper bound recovers congruent pairs", "[congruence]") {
    auto rng = make_rng(61);
    for (Eigen::Index k : {1, 2, 3, 4, 6}) {
        const TimeSeries s = random_series(4 * k + 2, k, rng);
        const TimeSeries t = apply_transform(random_rigid(k, rng), s);
        const CongruenceResult res = congruence_distance_upper(s, t, 1.0, {});
        REQUIRE(res.value <= 1e-6 * (1.0 + s.max_state_norm()));
        REQUIRE_FALSE(res.certified_exact);
        // reported value matches its own witness
        REQUIRE(res.value ==
                Approx(series_distance_equal(s, apply_transform(res.transform, t), 1.0))
                    .margin(1e-9 * (1.0 + res.value)));
    }
}

TEST_CASE("iterative upper bound on the rotated example", "[congruence]") {
    const CongruenceResult res = congruence_distance_upper(example_s(), example_t(), 1.0, {});
    REQUIRE(res.value <= 1.0 + std::sqrt(2.0) + 1e-9);
    REQUIRE(res.value >= 0.0);
}

TEST_CASE("iterative upper bound never exceeds the aligned distance", "[congruence][property]") {
    auto rng = make_rng(67);
    for (int trial = 0; trial < 15; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 10);
        const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % 5);
        const TimeSeries a = random_series(n, k, rng);
        const TimeSeries b = random_series(n, k, rng);
        const CongruenceResult res = congruence_distance_upper(a, b, 1.0, {});
        REQUIRE(res.value <= series_distance_equal(a, b, 1.0) + 1e-9);
    }
}

TEST_CASE("upper bound sandwiches the delta distances", "[congruence][property]") {
    auto rng = make_rng(71);
    for (int trial = 0; trial < 12; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 10);
        const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % 4);
        const TimeSeries a = random_series(n, k, rng);
        const TimeSeries b = random_series(n, k, rng);
        const double upper = congruence_distance_upper(a, b, 1.0, {}).value;

        const double slack = 1e-9 * (1.0 + upper);
        REQUIRE(delta_distance(a, b, StructureNorm::max_column()).value <= 2.0 * upper + slack);
        REQUIRE(reduced_delta_distance(a, b, StructureNorm::max_column()).value <=
                2.0 * upper + slack);
        REQUIRE(delta_distance(a, b, StructureNorm::p_norm(1.0)).value <=
                (static_cast<double>(n) - 1.0) * upper + slack);
    }
}

TEST_CASE("boolean search basics", "[congruence]") {
    auto rng = make_rng(73);
    const TimeSeries s = random_series(6, 3, rng);
    const CongruenceResult same = congruence_distance_boolean(s, s);
    REQUIRE(same.value == 0.0);
    REQUIRE(same.certified_exact);
    REQUIRE(same.transform.matrix.isApprox(Eigen::MatrixXd::Identity(3, 3)));

    Eigen::MatrixXd plus(1, 1), minus(1, 1);
    plus << 1;
    minus << -1;
    const CongruenceResult flip =
        congruence_distance_boolean(TimeSeries(plus), TimeSeries(minus));
    REQUIRE(flip.value == 0.0);
    REQUIRE(flip.transform.matrix(0, 0) == -1.0);

    SolverConfig tight;
    tight.boolean_k_max = 4;
    REQUIRE_THROWS_AS(congruence_distance_boolean(random_series(3, 5, rng),
                                                  random_series(3, 5, rng), false, tight),
                      CapabilityError);
}

TEST_CASE("boolean search is symmetric", "[congruence][property]") {
    auto rng = make_rng(79);
    for (int trial = 0; trial < 15; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 8);
        const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % 6);
        const TimeSeries a = random_series(n, k, rng);
        const TimeSeries b = random_series(n, k, rng);
        const double ab = congruence_distance_boolean(a, b).value;
        const double ba = congruence_distance_boolean(b, a).value;
        REQUIRE(ab == Approx(ba).margin(1e-12 * (1.0 + ab)));
    }
}

TEST_CASE("mirrored pairs need no translation", "[congruence][property]") {
    auto rng = make_rng(83);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 6);
        const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % 4);
        const TimeSeries a = random_series(n, k, rng);
        const TimeSeries b = random_series(n, k, rng);
        const TimeSeries abar = concat(a, a.negated());
        const TimeSeries bbar = concat(b, b.negated());

        const double fixed = congruence_distance_boolean(abar, bbar, false).value;
        const double translated = congruence_distance_boolean(abar, bbar, true).value;
        REQUIRE(translated == Approx(fixed).margin(1e-9 * (1.0 + fixed)));
    }
}

TEST_CASE("column sign geometry", "[congruence][property]") {
    // For every orthogonal M and axis i, the distances from M e_i to
    // e_i and -e_i lie on a circle of diameter 2.
    auto rng = make_rng(89);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % 8);
        const Eigen::MatrixXd m = random_orthogonal(k, rng);
        for (Eigen::Index i = 0; i < k; ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(k);
            e(i) = 1.0;
            const double a = (e - m.col(i)).norm();
            const double b = (e + m.col(i)).norm();
            REQUIRE(std::abs(a * a + b * b - 4.0) <= 1e-9);
        }
    }
}

TEST_CASE("grid search over the plane", "[congruence]") {
    auto rng = make_rng(97);
    SolverConfig coarse;
    coarse.grid_resolution = 1e-3;

    const TimeSeries s = random_series(8, 2, rng);
    const TimeSeries t = apply_transform(random_rigid(2, rng), s);
    const CongruenceResult res = congruence_distance_grid_k2(s, t, coarse);
    REQUIRE(res.value <= res.error_bound + 1e-9);
    REQUIRE_FALSE(res.certified_exact);

    const CongruenceResult ex = congruence_distance_grid_k2(example_s(), example_t(), coarse);
    REQUIRE(ex.value <= 1.0 + std::sqrt(2.0) + ex.error_bound);
    REQUIRE(ex.value >= 0.0);

    REQUIRE_THROWS_AS(congruence_distance_grid_k2(random_series(3, 3, rng),
                                                  random_series(3, 3, rng), coarse),
                      CapabilityError);
}

TEST_CASE("grid search certifies the flattened-triangle lower bound", "[congruence]") {
    const double eps = 0.5;
    const double a = std::sqrt(1.0 - eps * eps);
    Eigen::MatrixXd s(3, 2), t(3, 2);
    s << -a, 0, 0, 0, a, 0;
    t << -a, 0, 0, eps, a, 0;
    const CongruenceResult res = congruence_distance_grid_k2(TimeSeries(s), TimeSeries(t), {});
    REQUIRE(res.value >= eps / 2.0 - res.error_bound);
    REQUIRE(res.value <= eps + res.error_bound);  // identity alignment costs eps
}

TEST_CASE("signed permutation search", "[congruence]") {
    auto rng = make_rng(101);
    const TimeSeries s = random_series(7, 3, rng);

    Eigen::MatrixXd swapped = s.states();
    swapped.col(0).swap(swapped.col(2));
    const CongruenceResult res = signed_permutation_search(s, TimeSeries(swapped));
    REQUIRE(res.value == Approx(0.0).margin(1e-12));
    REQUIRE(res.certified_exact);

    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 6);
        const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % 4);
        const TimeSeries a = random_series(n, k, rng);
        const TimeSeries b = random_series(n, k, rng);
        // boolean matrices are a subset of signed permutations
        REQUIRE(signed_permutation_search(a, b).value <=
                congruence_distance_boolean(a, b).value + 1e-12);
    }

    REQUIRE_THROWS_AS(signed_permutation_search(random_series(2, 7, rng),
                                                random_series(2, 7, rng)),
                      CapabilityError);
}

TEST_CASE("signed permutations agree with the plane grid on axis-aligned optima",
          "[congruence]") {
    auto rng = make_rng(103);
    const TimeSeries base = random_series(5, 2, rng);
    const TimeSeries abar = concat(base, base.negated());

    // quarter turn is a signed permutation; the mirrored construction
    // keeps the optimal translation at zero
    Eigen::MatrixXd turned = abar.states() * rotation2(std::numbers::pi / 2.0).transpose();
    const TimeSeries bbar{std::move(turned)};

    const CongruenceResult sp = signed_permutation_search(abar, bbar);
    const CongruenceResult grid = congruence_distance_grid_k2(abar, bbar, {});
    REQUIRE(sp.value == Approx(0.0).margin(1e-9));
    REQUIRE(grid.value <= sp.value + grid.error_bound);

    // generic pairs: the grid scans a superset of the axis-aligned matrices
    for (int trial = 0; trial < 5; ++trial) {
        const TimeSeries a = concat(random_series(4, 2, rng), random_series(4, 2, rng).negated());
        const TimeSeries b = concat(random_series(4, 2, rng), random_series(4, 2, rng).negated());
        REQUIRE(congruence_distance_grid_k2(a, b, {}).value <=
                signed_permutation_search(a, b).value + 1e-9);
    }
}

TEST_CASE("solver input validation", "[congruence]") {
    auto rng = make_rng(107);
    const TimeSeries a = random_series(4, 2, rng);
    const TimeSeries b = random_series(5, 2, rng);
    REQUIRE_THROWS_AS(congruence_distance_upper(a, b, 1.0, {}), InputError);

    SolverConfig bad;
    bad.restarts = 0;
    REQUIRE_THROWS_AS(congruence_distance_upper(a, a, 1.0, bad), InputError);
    bad = SolverConfig{};
    bad.grid_resolution = 0.0;
    REQUIRE_THROWS_AS(congruence_distance_grid_k2(a, a, bad), InputError);
    REQUIRE_THROWS_AS(congruence_distance_upper(a, a, 0.0, {}), InputError);
}
