#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "zbus/errors.hpp"
#include "zbus/reference_networks.hpp"
#include "zbus/system.hpp"

namespace zbus {
namespace {

TEST(BusAdmittance, TwoNodeIsHalfIdentity) {
    Feeder const f = two_node({});
    BusAdmittance const y = assemble_bus_admittance(f.network);
    CMatrix half = CMatrix::identity(3);
    half *= 0.5;
    EXPECT_EQ(y.y, half);
    CMatrix neg = half;
    neg *= -1.0;
    EXPECT_EQ(y.y_ns, neg);
    EXPECT_EQ(y.y_sn, neg);
    EXPECT_EQ(y.y_ss, half);
}

TEST(BusAdmittance, ThreeNodeBlocksMatchBranchData) {
    Feeder const f = three_node({0.1});
    BusAdmittance const y = assemble_bus_admittance(f.network);
    CMatrix const y1s = three_node_slack_branch();
    CMatrix const y12 = three_node_lateral_branch();
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            EXPECT_EQ(y.y(r, c), y1s(r, c) + y12(r, c));
            EXPECT_EQ(y.y(r, c + 3), -y12(r, c));
            EXPECT_EQ(y.y(r + 3, c), -y12(r, c));
            EXPECT_EQ(y.y(r + 3, c + 3), y12(r, c));
            EXPECT_EQ(y.y_ns(r, c), -y1s(r, c));
            EXPECT_EQ(y.y_ns(r + 3, c), Complex(0, 0));
        }
    }
}

TEST(FixedPointData, ThreeNodeNoLoadVoltageIsTheSlackVoltage) {
    Feeder const f = three_node({0.5});
    SystemMatrices const sys = assemble_system(f.network, f.loads);
    auto const vs = default_slack_voltage();
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(std::abs(sys.w[j] - vs[j % 3]), 0.0, 1e-12);
}

TEST(FixedPointData, TwoNodeNoLoadVoltageHalvesTheSlack) {
    Feeder const f = two_node({});
    SystemMatrices const sys = assemble_system(f.network, f.loads);
    auto const vs = default_slack_voltage();
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(sys.w[j] - 0.5 * vs[j]), 0.0, 1e-15);
    CMatrix const zyl = sys.z * (sys.blocks.y + sys.y_load);
    EXPECT_LT(inf_norm(zyl - CMatrix::identity(3)), 1e-14);
}

TEST(FixedPointData, NoLoadVoltageSolvesTheNetworkWithImpedanceLoadsOnly) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Feeder const f = random_small_network({seed, 4, 0.5});
        SystemMatrices const sys = assemble_system(f.network, f.loads);
        // with power and current parts removed, w is a power flow solution
        LoadSet const z_only = f.loads.scaled(0.0);
        Feeder const linear{f.network, z_only, {}};
        EXPECT_LT(testing::max_abs(testing::kcl_mismatch(linear, sys.w)), 1e-12) << seed;
    }
}

TEST(FixedPointData, FloatingNodeIsIllPosed) {
    std::vector<Phase> const abc{Phase::a, Phase::b, Phase::c};
    std::vector<NodeSpec> nodes{{"S", NodeKind::slack, abc, {}}, {"1", NodeKind::wye, abc, {}},
                                {"2", NodeKind::wye, abc, {}}};
    CMatrix y = CMatrix::identity(3);
    auto const net = NetworkModel::create(nodes, {{"S", "1", abc, y, {}, {}}});
    try {
        assemble_system(net, LoadSet::none(net));
        FAIL();
    } catch (IllPosedNetworkError const& e) {
        EXPECT_NE(std::string(e.what()).find("shunt"), std::string::npos);
    }
    // a shunt to ground regularizes it
    nodes[2].shunt = {Complex{0, 0.01}, Complex{0, 0.01}, Complex{0, 0.01}};
    auto const grounded = NetworkModel::create(nodes, {{"S", "1", abc, y, {}, {}}});
    EXPECT_NO_THROW(assemble_system(grounded, LoadSet::none(grounded)));
}

TEST(NetworkCurrent, AgreesWithBranchwiseKcl) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Feeder const f = random_small_network({seed, 5, 0.3});
        Feeder const unloaded{f.network, LoadSet::none(f.network), {}};
        SystemMatrices const sys = assemble_system(unloaded.network, unloaded.loads);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g;
        CVector v(sys.size());
        for (auto& x : v) x = {g(rng), g(rng)};
        CVector const kcl = testing::kcl_mismatch(unloaded, v);
        CVector const mine = network_current(sys, v);
        EXPECT_LT(inf_norm(subtract(kcl, mine)), 1e-11) << seed;
    }
}

TEST(SlackInjection, BalancesTheTwoNodeLine) {
    Feeder const f = two_node({});
    SystemMatrices const sys = assemble_system(f.network, f.loads);
    CVector const v = sys.w;
    CVector const is = slack_injection(sys, v);
    auto const vs = default_slack_voltage();
    for (std::size_t p = 0; p < 3; ++p) EXPECT_NEAR(std::abs(is[p] - 0.5 * (vs[p] - v[p])), 0.0, 1e-15);
}

}  // namespace
}  // namespace zbus
