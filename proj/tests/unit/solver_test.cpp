#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "zbus/errors.hpp"
#include "zbus/reference_networks.hpp"
#include "zbus/solver.hpp"

namespace zbus {
namespace {

SolveTrace run(Feeder const& f, SolveConfig const& cfg = {}) {
    SystemMatrices const sys = assemble_system(f.network, f.loads);
    return solve(f.network, f.loads, sys, cfg);
}

TEST(SolveConfig, RejectsNonsense) {
    SolveConfig c;
    c.max_iters = 0;
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.tol = 0.0;
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.tol = std::nan("");
    EXPECT_THROW(c.validate(), InputError);
    EXPECT_NO_THROW(SolveConfig{}.validate());
}

TEST(Lambda, ResolvesAndValidates) {
    Feeder const f = three_node({0.1});
    SystemMatrices const sys = assemble_system(f.network, f.loads);
    EXPECT_EQ(LambdaChoice::identity().resolve(sys), CVector(6, 1.0));
    EXPECT_EQ(LambdaChoice::diag_w().resolve(sys), sys.w);
    EXPECT_THROW(LambdaChoice::custom(CVector(5, 1.0)).resolve(sys), InputError);
    CVector bad(6, 1.0);
    bad[2] = 0.0;
    EXPECT_THROW(LambdaChoice::custom(bad).resolve(sys), InputError);
    EXPECT_EQ(LambdaChoice::diag_w().describe(), "diag-w");
    EXPECT_EQ(LambdaChoice::custom(bad).describe(), "custom");
}

TEST(Solve, UnloadedNetworkLandsOnNoLoadVoltageInOneStep) {
    Feeder f = random_small_network({3, 4, 0.0});
    f.loads = LoadSet::none(f.network);
    SystemMatrices const sys = assemble_system(f.network, f.loads);
    SolveConfig cfg;
    cfg.init = InitialVoltage::flat;
    SolveTrace const t = solve(f.network, f.loads, sys, cfg);
    ASSERT_EQ(t.status, SolveStatus::converged);
    EXPECT_LT(inf_norm(subtract(t.iterates[1], sys.w)), 1e-15);
    EXPECT_LE(t.iterations(), 2u);
}

TEST(Solve, TwoNodeQuarterLoadStartsAtItsSolution) {
    TwoNodeParams const p{0.5, 0.5, 0.5, -0.25};
    Feeder const f = two_node(p);
    SolveTrace const t = run(f);
    ASSERT_EQ(t.status, SolveStatus::converged);
    auto const vs = default_slack_voltage();
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(t.solution->at(j) - 0.5 * vs[j]), 0.0, 1e-12);
    auto const root = two_node_nonnegative_solution(p);
    ASSERT_TRUE(root);
    EXPECT_NEAR(std::abs(t.solution->at(0)), *root, 1e-8);
}

TEST(Solve, TwoNodeHalfLoadOscillates) {
    SolveTrace const t = run(two_node({0.5, 0.5, 0.5, -0.5}));
    EXPECT_EQ(t.status, SolveStatus::max_iters_reached);
    EXPECT_TRUE(t.non_contracting_tail());
    EXPECT_EQ(t.iterations(), 100u);
    for (double r : t.ratios) EXPECT_NEAR(r, 1.0, 1e-9);
    EXPECT_NEAR(std::abs(t.iterates[1][0]), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(t.iterates[2][0]), 0.5, 1e-12);
}

TEST(Solve, ConvergedRunsSatisfyNodalBalance) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        Feeder const f = random_small_network({seed, 1 + seed % 5, 0.4});
        SolveTrace const t = run(f);
        ASSERT_EQ(t.status, SolveStatus::converged) << seed;
        EXPECT_LE(t.residual, kResidualTolerance);
        EXPECT_LE(testing::max_abs(testing::kcl_mismatch(f, *t.solution)), 1e-6) << seed;
    }
}

TEST(Solve, ThreeNodeDiffsDecreaseMonotonically) {
    SolveTrace const t = run(three_node({0.10}));
    ASSERT_EQ(t.status, SolveStatus::converged);
    for (std::size_t k = 1; k < t.diffs.size(); ++k) EXPECT_LT(t.diffs[k], t.diffs[k - 1]);
}

TEST(Solve, ZeroVoltageUnderConstantCurrentLoadIsReported) {
    // with s_L = 0 the first step lands exactly on v = 0
    SolveTrace const t = run(two_node({0.5, 0.5, 0.5, 0.0}));
    EXPECT_EQ(t.status, SolveStatus::singular_voltage);
    ASSERT_TRUE(t.singular_iterate.has_value());
    EXPECT_EQ(*t.singular_iterate, 1u);
    EXPECT_FALSE(t.message.empty());
}

TEST(Solve, HugeLoadDiverges) {
    Feeder const f = three_node({1.0});
    LoadSet const heavy = f.loads.scaled(1e9);
    SystemMatrices const sys = assemble_system(f.network, heavy);
    SolveTrace const t = solve(f.network, heavy, sys, {});
    EXPECT_EQ(t.status, SolveStatus::diverged);
}

TEST(Solve, CustomInitialVoltageIsUsed) {
    Feeder const f = three_node({0.05});
    SystemMatrices const sys = assemble_system(f.network, f.loads);
    SolveConfig cfg;
    cfg.init = InitialVoltage::custom;
    cfg.custom_initial = CVector(6, Complex{0.9, 0.1});
    SolveTrace const t = solve(f.network, f.loads, sys, cfg);
    EXPECT_EQ(t.iterates.front(), cfg.custom_initial);
    EXPECT_EQ(t.status, SolveStatus::converged);
    cfg.custom_initial.pop_back();
    EXPECT_THROW(solve(f.network, f.loads, sys, cfg), InputError);
}

TEST(ScaledMap, TrajectoryMatchesUnscaledIterationEntrywise) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        Feeder const f = random_small_network({seed, 5, 0.5});
        SystemMatrices const sys = assemble_system(f.network, f.loads);
        CVector lambda(sys.size());
        for (auto& l : lambda) l = std::polar(u(rng), u(rng));
        SolveConfig cfg;
        cfg.max_iters = 15;
        cfg.tol = 1e-300;
        SolveTrace const t = solve(f.network, f.loads, sys, cfg);
        auto const us = scaled_trajectory(f.network, f.loads, sys, lambda, t.iterates.front(), t.iterates.size() - 1);
        ASSERT_EQ(us.size(), t.iterates.size());
        for (std::size_t k = 0; k < us.size(); ++k) {
            for (std::size_t j = 0; j < sys.size(); ++j) {
                EXPECT_NEAR(std::abs(lambda[j] * us[k][j] - t.iterates[k][j]), 0.0, 1e-12) << seed << " " << k;
            }
        }
    }
}

TEST(Ball, MembershipIsInclusiveAndScaled) {
    CVector const w{1.0, 1.0};
    CVector const lambda{2.0, 0.5};
    EXPECT_TRUE(membership_in_ball(CVector{1.0 + 0.2, 1.0}, w, lambda, 0.1));
    EXPECT_FALSE(membership_in_ball(CVector{1.0, 1.0 + 0.2}, w, lambda, 0.1));
    EXPECT_TRUE(membership_in_ball(CVector{1.0, 1.05}, w, lambda, 0.1));
    EXPECT_DOUBLE_EQ(ball_distance(CVector{3.0, 1.0}, w, lambda), 1.0);
    EXPECT_THROW(membership_in_ball(w, w, lambda, 0.0), InputError);
}

TEST(Ball, FlatStartIsInsideTheCertifiedThreeNodeBall) {
    Feeder const f = three_node({0.08});
    SystemMatrices const sys = assemble_system(f.network, f.loads);
    EXPECT_TRUE(membership_in_ball(f.network.flat_profile(), sys, LambdaChoice::identity(), 0.2524));
}

TEST(EmpiricalRate, NeedsThreeIterates) {
    SolveTrace t;
    t.iterates = {CVector{1.0}, CVector{2.0}};
    EXPECT_THROW(empirical_rate(t), Error);
    t.iterates.push_back(CVector{2.5});
    EXPECT_DOUBLE_EQ(empirical_rate(t), 0.5);
    t.iterates.push_back(CVector{2.5});
    t.iterates.push_back(CVector{2.5 + 1e-12});
    EXPECT_DOUBLE_EQ(empirical_rate(t), 0.5);
    EXPECT_DOUBLE_EQ(empirical_rate(t, CVector{2.0}), 0.5);
}

TEST(GeometricBound, ConstantUsesLambdaSpread) {
    CVector const lambda{1.0, Complex{0, 4}};
    EXPECT_DOUBLE_EQ(geometric_bound_constant(lambda, CVector{1.0, 0.0}, CVector{0.0, 0.0}), 4.0);
    SolveTrace t;
    t.iterates = {CVector{1.0}, CVector{0.5}, CVector{0.25}, CVector{0.0}};
    EXPECT_FALSE(first_geometric_violation(t, CVector{1.0}, 0.5).has_value());
    EXPECT_EQ(first_geometric_violation(t, CVector{1.0}, 0.4), 1u);
}

TEST(Status, HasStableNames) {
    EXPECT_EQ(to_string(SolveStatus::converged), "converged");
    EXPECT_EQ(to_string(SolveStatus::max_iters_reached), "max_iters_reached");
    EXPECT_EQ(to_string(SolveStatus::diverged), "diverged");
    EXPECT_EQ(to_string(SolveStatus::singular_voltage), "singular_voltage");
}

}  // namespace
}  // namespace zbus
