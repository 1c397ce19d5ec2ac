#include <gtest/gtest.h>

#include "lemmas.hpp"

namespace zbus {
namespace {

TEST(Lemma, DeltaPowerAndCurrentTermsRegroupByPair) {
    testing::LemmaGaps const gaps = testing::lemma_gaps(200, 2024);
    EXPECT_LE(gaps.power, 1e-11);
    EXPECT_LE(gaps.current, 1e-11);
}

TEST(Lemma, RegroupingHoldsOnTwoPhaseDeltaNode) {
    std::vector<Phase> const abc{Phase::a, Phase::b, Phase::c};
    std::vector<NodeSpec> nodes{{"S", NodeKind::slack, abc, {}}, {"d", NodeKind::delta, {Phase::a, Phase::c}, {}}};
    CMatrix y{{Complex{1, -6}, Complex{0.02, -0.05}}, {Complex{0.02, -0.05}, Complex{1.5, -7}}};
    auto const net = NetworkModel::create(nodes, {{"S", "d", {Phase::a, Phase::c}, y, {}, {}}});
    LoadSet const loads =
        LoadSet::create(net, {}, std::vector<DeltaLoadEntry>{{"d", Phase::a, Phase::c, {{0.3, 0.1}, {0.1, 0.05}, {}}}});
    Feeder const f{net, loads, {}};
    CVector const v{std::polar(0.95, 0.05), std::polar(1.03, 2.0)};
    testing::LemmaSides const s = testing::evaluate_lemma_sides(f, v);
    for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_NEAR(std::abs(s.direct_pq[j] - s.paired_pq[j]), 0.0, 1e-13);
        EXPECT_NEAR(std::abs(s.direct_i[j] - s.paired_i[j]), 0.0, 1e-13);
        EXPECT_GT(std::abs(s.direct_pq[j]), 1e-3);
    }
}

TEST(Lemma, UnitPhasorDistanceBound) { EXPECT_EQ(testing::unit_phasor_violations(100000, 99), 0u); }

}  // namespace
}  // namespace zbus
