#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "qres/ranktest.hpp"

using namespace qres;

namespace {

CorrelationTable delta_table() {
    // p(0|x,y) = delta_{x,y} over 2 inputs each
    return CorrelationTable(2, 2, 2, {1, 0, 0, 1, 0, 1, 1, 0});
}

} // namespace

TEST_SUITE("ranktest") {

TEST_CASE("state test matrix layout") {
    const CorrelationMatrix m = build_state_test_matrix(delta_table(), 0);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 2);
    CHECK(m.entries(0, 0) == 1.0);
    CHECK(m.entries(0, 1) == 0.0);
    CHECK(m.entries(1, 1) == 1.0);

    const CorrelationMatrix mt = build_operation_test_matrix(delta_table(), 0);
    CHECK((m.entries - mt.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(build_state_test_matrix(delta_table(), 2), InvalidInput);
}

TEST_CASE("numerical rank basics") {
    CorrelationMatrix identity{Eigen::MatrixXd::Identity(4, 4)};
    CHECK(numerical_rank(identity) == 4);

    Eigen::VectorXd u(3), v(3);
    u << 0.2, 0.5, 0.9;
    v << 0.7, 0.1, 0.4;
    CorrelationMatrix outer{u * v.transpose()};
    CHECK(numerical_rank(outer) == 1);

    CorrelationMatrix zero{Eigen::MatrixXd::Zero(3, 5)};
    CHECK(numerical_rank(zero) == 0);

    // a generous tolerance collapses small singular values
    Eigen::MatrixXd nearly = Eigen::MatrixXd::Identity(3, 3);
    nearly(2, 2) = 1e-6;
    CHECK(numerical_rank(CorrelationMatrix{nearly}, 1e-8) == 3);
    CHECK(numerical_rank(CorrelationMatrix{nearly}, 1e-3) == 2);
}

TEST_CASE("numerical rank is invariant under permutation and scaling") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        // random rank-r matrix
        std::uniform_int_distribution<int> rdist(0, 3);
        const int r = rdist(rng);
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 5);
        std::normal_distribution<double> gauss;
        for (int i = 0; i < r; ++i) {
            Eigen::VectorXd u(4), v(5);
            for (int k = 0; k < 4; ++k) u(k) = gauss(rng);
            for (int k = 0; k < 5; ++k) v(k) = gauss(rng);
            m += u * v.transpose();
        }
        const int rank = numerical_rank(CorrelationMatrix{m});
        CHECK(rank <= r);

        Eigen::MatrixXd permuted = m;
        permuted.row(0).swap(permuted.row(3));
        permuted.col(1).swap(permuted.col(4));
        CHECK(numerical_rank(CorrelationMatrix{permuted}) == rank);
        CHECK(numerical_rank(CorrelationMatrix{Eigen::MatrixXd(scale(rng) * m)}) == rank);
    }
}

TEST_CASE("max-rank construction hits rank N+1 for d = 2, 3") {
    for (int d = 2; d <= 3; ++d) {
        for (int budget = 1; budget < d * d; ++budget) {
            const Realization r = max_rank_realization(d, budget + 1);
            const CorrelationTable t = simulate(r.preparations, r.operations);
            const CorrelationMatrix m = build_state_test_matrix(t, 0);
            CHECK(m.rows() == budget + 1);
            CHECK(m.cols() == d * d);
            CHECK(numerical_rank(m) == budget + 1);
        }
    }
    CHECK_THROWS_AS(max_rank_realization(2, 5), InvalidInput);
    CHECK_THROWS_AS(max_rank_realization(1, 1), InvalidInput);
}

TEST_CASE("four tomographically complete projectors give a rank-4 table") {
    const Realization r = max_rank_realization(2, 4);
    // states are {|0>, |1>, |+>, |+y>}, instruments project onto the same family
    const CorrelationTable t = simulate(r.preparations, r.operations);
    CHECK(numerical_rank(build_state_test_matrix(t, 0)) == 4);
}

TEST_CASE("incoherent qubit states keep rank at most 2") {
    std::mt19937_64 rng(29);
    const FreeSetSpec inc = incoherent(2);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<DensityMatrix> states;
        for (int y = 0; y < 3; ++y) states.push_back(testing::random_free_state(inc, rng));
        std::vector<std::vector<Effect>> instruments;
        for (int x = 0; x < 4; ++x) instruments.push_back(testing::random_instrument(2, 2, rng));
        const CorrelationTable t =
            simulate(PreparationBox(2, states), OperationBox(2, instruments));
        CHECK(numerical_rank(build_state_test_matrix(t, 0)) <= 2);
    }
}

TEST_CASE("detect fires on the construction and stays quiet on free tables") {
    const FreeSetSpec inc = incoherent(2);
    const Realization r = max_rank_realization(2, 4);
    const CorrelationTable t = simulate(r.preparations, r.operations);

    const DetectionVerdict v = detect(t, inc, DetectionMode::States);
    CHECK(v.verdict == Verdict::ResourceDetected);
    CHECK(v.rank() == 4);
    CHECK(v.budget() == 2);
    CHECK(!v.hypothesis_warning);
    REQUIRE(v.reports.size() == 1);
    CHECK(v.reports[0].singular_values.size() == 4);

    // diagonal states measured diagonally: consistent
    std::vector<DensityMatrix> diag_states = {DensityMatrix::pure(ket(2, 0)),
                                              DensityMatrix::pure(ket(2, 1)),
                                              DensityMatrix::maximally_mixed(2)};
    std::vector<Effect> zbasis = {Effect::projector(ket(2, 0)), Effect::projector(ket(2, 1))};
    const CorrelationTable tf =
        simulate(PreparationBox(2, diag_states), OperationBox(2, {zbasis, zbasis}));
    const DetectionVerdict vf = detect(tf, inc, DetectionMode::Both);
    CHECK(vf.verdict == Verdict::ConsistentWithFree);
    CHECK(vf.reports.size() == 2);
}

TEST_CASE("budget at d^2 leaves the test vacuous with a warning") {
    const Realization r = max_rank_realization(2, 4);
    const CorrelationTable t = simulate(r.preparations, r.operations);
    const DetectionVerdict v = detect(t, stabilizer_qubit(), DetectionMode::States);
    CHECK(v.verdict == Verdict::ConsistentWithFree);
    CHECK(v.hypothesis_warning);
}

TEST_CASE("soundness: free-side samples never trigger detection") {
    // states sampled free -> States mode; effects sampled free -> Operations
    // mode; arbitrary quantum objects on the other side.
    struct Case {
        FreeSetSpec spec;
        int samples;
    };
    const std::vector<Case> cases = {{incoherent(2), 1000}, {incoherent(3), 1000},
                                     {real_states(2), 1000}, {stabilizer_qubit(), 1000},
                                     {maximally_mixed(2), 1000}, {maximally_mixed(3), 1000}};
    std::mt19937_64 rng(101);
    for (const auto& c : cases) {
        const int d = c.spec.dim;
        for (int s = 0; s < c.samples; ++s) {
            // STATES side
            std::vector<DensityMatrix> states;
            for (int y = 0; y < c.spec.state_rank_budget + 1; ++y) {
                states.push_back(testing::random_free_state(c.spec, rng));
            }
            std::vector<std::vector<Effect>> instruments;
            for (int x = 0; x < d * d; ++x) {
                instruments.push_back(testing::random_instrument(d, 2, rng));
            }
            const CorrelationTable t =
                simulate(PreparationBox(d, states), OperationBox(d, instruments));
            const DetectionVerdict v = detect(t, c.spec, DetectionMode::States);
            CHECK(v.verdict == Verdict::ConsistentWithFree);
            CHECK(v.rank() <= c.spec.state_rank_budget);
        }
        for (int s = 0; s < c.samples; ++s) {
            // OPERATIONS side
            std::vector<DensityMatrix> states;
            for (int y = 0; y < d * d; ++y) {
                states.push_back(DensityMatrix::pure(testing::random_pure(d, rng)));
            }
            std::vector<std::vector<Effect>> instruments;
            for (int x = 0; x < c.spec.effect_rank_budget + 1; ++x) {
                instruments.push_back(testing::random_free_instrument(c.spec, 2, rng));
            }
            const CorrelationTable t =
                simulate(PreparationBox(d, states), OperationBox(d, instruments));
            const DetectionVerdict v = detect(t, c.spec, DetectionMode::Operations);
            CHECK(v.verdict == Verdict::ConsistentWithFree);
            CHECK(v.rank() <= c.spec.effect_rank_budget);
        }
    }
}

} // TEST_SUITE
