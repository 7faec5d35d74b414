#include <gtest/gtest.h>

#include "wrpipe/errors.hpp"
#include "wrpipe/grid.hpp"
#include "wrpipe/waveform.hpp"

using namespace wrpipe;

TEST(BuildGrid, PaperScale) {
    const auto g = build_grid(1.0, 0.1, 32000, 8192);
    EXPECT_DOUBLE_EQ(g.dx, 1.0 / 32001);
    EXPECT_DOUBLE_EQ(g.dt, 0.1 / 8192);
}

TEST(BuildGrid, SmallestGrid) {
    const auto g = build_grid(1.0, 1.0, 1, 1);
    EXPECT_EQ(g.dx, 0.5);
    EXPECT_EQ(g.dt, 1.0);
    EXPECT_EQ(g.node_count(), 3u);
}

TEST(BuildGrid, Arithmetic) {
    const auto g = build_grid(2.0, 0.5, 3, 4);
    EXPECT_EQ(g.dx, 0.5);
    EXPECT_EQ(g.dt, 0.125);
    EXPECT_EQ(g.x(4), 2.0);
    EXPECT_EQ(g.t(4), 0.5);
}

TEST(BuildGrid, RejectsNonPositive) {
    EXPECT_THROW(build_grid(0.0, 1.0, 3, 4), ConfigError);
    EXPECT_THROW(build_grid(1.0, -1.0, 3, 4), ConfigError);
    EXPECT_THROW(build_grid(1.0, 1.0, 0, 4), ConfigError);
    EXPECT_THROW(build_grid(1.0, 1.0, 3, 0), ConfigError);
}

TEST(Decompose, SymmetricSplit) {
    const auto d = decompose(build_grid(1.0, 1.0, 7, 4), 2, 1);
    ASSERT_EQ(d.interfaces.size(), 1u);
    EXPECT_EQ(d.interfaces[0], 0.5);
    EXPECT_EQ(d.pivot, 0u);
    EXPECT_EQ(d.local_nodes(0), 5u);
    EXPECT_EQ(d.local_nodes(1), 5u);
}

TEST(Decompose, PaperBlockLength) {
    const auto d = decompose(build_grid(1.0, 0.1, 31999, 8192), 8, 1024);
    EXPECT_EQ(d.block_len, 8u);
}

TEST(Decompose, DefaultPivotIsMiddle) {
    const auto d = decompose(build_grid(1.0, 1.0, 9, 8), 5, 4);
    EXPECT_EQ(d.pivot + 1, 3u);
    EXPECT_EQ(middle_pivot(8) + 1, 4u);
    EXPECT_EQ(middle_pivot(1), 0u);
}

TEST(Decompose, BlocksMustDivideSteps) {
    try {
        decompose(build_grid(1.0, 1.0, 7, 8), 2, 3);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("J must divide Nt"), std::string::npos);
    }
}

TEST(Decompose, ExactPlacementRejectsOffGrid) {
    try {
        decompose(build_grid(1.0, 1.0, 64, 8), 2, 1);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("off-grid"), std::string::npos);
    }
}

TEST(Decompose, NearestNodeSnapsHalfUp) {
    const auto g = build_grid(1.0, 1.0, 64, 8);  // 65 intervals
    const auto d = decompose(g, 2, 1, PivotPolicy::middle(), InterfacePlacement::NearestNode);
    EXPECT_EQ(d.boundary_nodes, (std::vector<std::size_t>{0, 33, 65}));
    const auto d8 = decompose(g, 8, 1, PivotPolicy::middle(), InterfacePlacement::NearestNode);
    for (std::size_t s = 1; s < 8; ++s) {
        EXPECT_LE(std::abs(static_cast<double>(d8.boundary_nodes[s]) - 65.0 * s / 8.0), 0.5);
    }
}

TEST(Decompose, WidthsAndTilde) {
    const auto g = build_grid(1.0, 1.0, 64, 8);
    const auto d = decompose(g, 2, 1, PivotPolicy::middle(), InterfacePlacement::NearestNode);
    EXPECT_DOUBLE_EQ(d.h_min, 32.0 / 65.0);
    EXPECT_DOUBLE_EQ(d.h_max, 33.0 / 65.0);
    EXPECT_EQ(d.h_tilde, d.h_min);
}

TEST(Decompose, ExplicitInterfaces) {
    const auto g = build_grid(1.0, 1.0, 9, 4);
    const auto d = decompose(g, std::vector<double>{0.3, 0.7}, 2);
    EXPECT_EQ(d.boundary_nodes, (std::vector<std::size_t>{0, 3, 7, 10}));
    EXPECT_THROW(decompose(g, std::vector<double>{0.35}, 2), ConfigError);
    EXPECT_THROW(decompose(g, std::vector<double>{0.7, 0.3}, 2), ConfigError);
}

TEST(Decompose, PivotOutOfRange) {
    EXPECT_THROW(decompose(build_grid(1.0, 1.0, 7, 4), 2, 1, PivotPolicy::at(2)), ConfigError);
}

TEST(Decompose, BlocksTileTheHorizon) {
    const auto d = decompose(build_grid(1.0, 1.0, 7, 48), 2, 6);
    std::size_t covered = 0;
    for (std::size_t j = 0; j < d.blocks; ++j) {
        EXPECT_EQ(d.block_begin(j), covered);
        covered += d.block_len;
    }
    EXPECT_EQ(covered, 48u);
}

TEST(DecomposedProblem, WithBlocksKeepsInterfaces) {
    const auto p = DecomposedProblem::make(HeatProblem::reference(), 64, 64, 4, 8);
    const auto q = p.with_blocks(1);
    EXPECT_EQ(q.decomposition.boundary_nodes, p.decomposition.boundary_nodes);
    EXPECT_EQ(q.decomposition.block_len, 64u);
    EXPECT_THROW(p.with_blocks(5), ConfigError);
}

TEST(InitialTraces, HeldConstantAtInitialValue) {
    const auto p = DecomposedProblem::make(HeatProblem::reference(), 7, 4, 2, 1);
    const auto w = initial_traces(p, {});
    ASSERT_EQ(w.interfaces(), 1u);
    for (double v : w.values[0]) {
        EXPECT_EQ(v, -0.25);
    }
    EXPECT_EQ(initial_traces(p, {InitialGuess::Zero, std::nullopt}).max_abs(), 0.0);
    EXPECT_THROW(initial_traces(p, {InitialGuess::Custom, std::nullopt}), ConfigError);
}
