#include <cmath>
#include <set>
#include <tuple>

#include <gtest/gtest.h>

#include "wrpipe/errors.hpp"
#include "wrpipe/nnwr.hpp"
#include "wrpipe/oracle.hpp"
#include "wrpipe/schedule.hpp"

using namespace wrpipe;

namespace {

nnwr::Config forced(int k) {
    nnwr::Config c;
    c.iterates = k;
    c.tol = 0.0;
    return c;
}

DecomposedProblem reference(std::size_t nx, std::size_t nt, std::size_t n, std::size_t j = 1) {
    return DecomposedProblem::make(HeatProblem::reference(), nx, nt, n, j);
}

}  // namespace

TEST(NnwrConfig, Validation) {
    nnwr::Config c;
    c.theta = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c.theta = 1.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c.theta = 1.0;
    c.iterates = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c.iterates = 1;
    c.tol = -1.0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(DirichletSweep, SingleSubdomainIsMonolithic) {
    const auto p = reference(31, 16, 1);
    const auto sd = nnwr::make_subdomain(p, 0, FluxStencil::Consistent);
    auto u = initial_state(sd.geom, p.problem.initial);
    nnwr::dirichlet_sweep(sd, u, {}, {}, 0);
    const auto mono = oracle::solve_monolithic(p.problem, p.grid);
    EXPECT_EQ(u.u, mono.final_state());
}

TEST(DirichletSweep, ZeroDataZeroFluxes) {
    const auto p = DecomposedProblem::make(HeatProblem::zero(), 15, 8, 2, 1, InterfacePlacement::Exact);
    const std::vector<double> w(8, 0.0);
    for (std::size_t s = 0; s < 2; ++s) {
        const auto sd = nnwr::make_subdomain(p, s, FluxStencil::Consistent);
        auto u = initial_state(sd.geom, {});
        const auto f = nnwr::dirichlet_sweep(sd, u, w, w, 0);
        for (double v : u.u) EXPECT_EQ(v, 0.0);
        for (double v : f.left) EXPECT_EQ(v, 0.0);
        for (double v : f.right) EXPECT_EQ(v, 0.0);
    }
}

TEST(DirichletSweep, ExactTraceGivesMatchingFluxes) {
    const auto p = DecomposedProblem::make(HeatProblem::reference(), 199, 64, 2, 1, InterfacePlacement::Exact);
    const auto mono = oracle::solve_monolithic(p.problem, p.grid);
    const auto w = mono.node_series(p.decomposition.boundary_nodes[1]);
    const auto left = nnwr::make_subdomain(p, 0, FluxStencil::Consistent);
    const auto right = nnwr::make_subdomain(p, 1, FluxStencil::Consistent);
    auto ul = initial_state(left.geom, p.problem.initial);
    auto ur = initial_state(right.geom, p.problem.initial);
    const auto fl = nnwr::dirichlet_sweep(left, ul, {}, w, 0);
    const auto fr = nnwr::dirichlet_sweep(right, ur, w, {}, 0);
    const auto jump = nnwr::neumann_jump(fl.right, fr.left);
    for (double v : jump) {
        EXPECT_LE(std::abs(v), 1e-10);
    }
}

TEST(DirichletSweep, RejectsMisalignedState) {
    const auto p = reference(15, 8, 2, 2);
    const auto sd = nnwr::make_subdomain(p, 0, FluxStencil::Consistent);
    auto u = initial_state(sd.geom, {});
    const std::vector<double> w(4, 0.0);
    EXPECT_THROW(nnwr::dirichlet_sweep(sd, u, w, w, 1), ScheduleError);
}

TEST(AuxiliarySweep, ZeroJumpsStayZero) {
    const auto p = reference(15, 8, 3);
    const std::vector<double> zero(8, 0.0);
    for (std::size_t s = 0; s < 3; ++s) {
        const auto sd = nnwr::make_subdomain(p, s, FluxStencil::Consistent);
        auto psi = initial_state(sd.geom, {});
        const auto out = nnwr::auxiliary_sweep(sd, psi, zero, zero, 0);
        for (double v : psi.u) EXPECT_EQ(v, 0.0);
        for (double v : out.left) EXPECT_EQ(v, 0.0);
    }
}

TEST(AuxiliarySweep, MirrorSymmetricPsi) {
    auto c = forced(1);
    c.guess = {InitialGuess::Zero, std::nullopt};
    const auto p = DecomposedProblem::make(HeatProblem::reference(), 63, 32, 2, 1, InterfacePlacement::Exact);
    const std::vector<double> w(32, 0.0);
    const auto l = nnwr::make_subdomain(p, 0, FluxStencil::Consistent);
    const auto r = nnwr::make_subdomain(p, 1, FluxStencil::Consistent);
    auto ul = initial_state(l.geom, p.problem.initial);
    auto ur = initial_state(r.geom, p.problem.initial);
    const auto fl = nnwr::dirichlet_sweep(l, ul, {}, w, 0);
    const auto fr = nnwr::dirichlet_sweep(r, ur, w, {}, 0);
    auto pl = initial_state(l.geom, {});
    auto pr = initial_state(r.geom, {});
    const auto psil = nnwr::auxiliary_sweep(l, pl, {}, nnwr::neumann_jump(fl.right, fr.left), 0);
    const auto psir = nnwr::auxiliary_sweep(r, pr, nnwr::neumann_jump(fr.left, fl.right), {}, 0);
    double scale = 0.0;
    for (std::size_t t = 0; t < 32; ++t) {
        EXPECT_NEAR(psil.right[t], psir.left[t], 1e-12);
        scale = std::max(scale, std::abs(psil.right[t]));
    }
    EXPECT_GT(scale, 1e-3);
}

TEST(UpdateTraces, Examples) {
    const std::vector<double> w{1.0, -2.0};
    const std::vector<double> zero{0.0, 0.0};
    EXPECT_EQ(nnwr::update_traces(w, zero, zero, 0.25), w);
    const std::vector<double> psi{0.4, 0.4};
    const auto out = nnwr::update_traces(std::vector<double>{1.0, 1.0}, psi, psi, 0.25);
    EXPECT_DOUBLE_EQ(out[0], 0.8);
    const std::vector<double> opposite{0.3, -1.0};
    const std::vector<double> negated{-0.3, 1.0};
    EXPECT_EQ(nnwr::update_traces(w, opposite, negated, 0.25), w);
    EXPECT_THROW(nnwr::update_traces(w, std::vector<double>{1.0}, zero, 0.25), ConfigError);
}

TEST(RunClassical, SingleSubdomain) {
    const auto r = nnwr::run_classical(reference(15, 8, 1), forced(3));
    EXPECT_EQ(r.iterations, 0);
    EXPECT_EQ(r.messages.data_messages, 0u);
    EXPECT_TRUE(r.converged);
}

TEST(RunClassical, ForcedMessageCount) {
    const auto r = nnwr::run_classical(reference(64, 16, 8), forced(4));
    EXPECT_EQ(r.messages.data_messages, 112u);
    EXPECT_EQ(r.iterations, 4);
    EXPECT_EQ(r.residuals.size(), 4u);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.pending_at_shutdown, 0u);
}

TEST(RunClassical, EarlyStopMessageCount) {
    nnwr::Config c;
    c.iterates = 10;
    c.tol = 1e-6;
    const int n = 4;
    const auto r = nnwr::run_classical(reference(63, 16, n), c);
    ASSERT_TRUE(r.converged);
    ASSERT_LT(*r.converged_iterate, 10);
    // the iterate after the converged update still runs its Dirichlet solve
    const int k_prime = *r.converged_iterate + 1;
    EXPECT_EQ(r.messages.data_messages, static_cast<std::uint64_t>(2 * (n - 1) * (2 * k_prime - 1)));
    EXPECT_LT(r.residuals.back(), 1e-6);
}

TEST(RunClassical, UnconvergedIsFlaggedNotThrown) {
    nnwr::Config c;
    c.iterates = 1;
    c.tol = 1e-12;
    const auto r = nnwr::run_classical(reference(63, 16, 4), c);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iterations, 1);
}

TEST(RunClassical, FastDecayOnTwoSubdomains) {
    const auto r = nnwr::run_classical(reference(200, 128, 2), forced(4));
    ASSERT_EQ(r.residuals.size(), 4u);
    EXPECT_LT(r.residuals[1], r.residuals[0]);
    EXPECT_LT(r.residuals[1] / r.residuals[0], 1e-6);
    // by the third iterate only roundoff is left
    EXPECT_LT(r.residuals[2], 1e-14);
}

TEST(RunClassical, SuperlinearOnEightSubdomains) {
    // with eight subdomains the contraction only sets in after a few iterates
    const auto r = nnwr::run_classical(reference(255, 64, 8), forced(18));
    ASSERT_EQ(r.residuals.size(), 18u);
    for (std::size_t k = 5; k < 18; ++k) {
        EXPECT_LT(r.residuals[k], r.residuals[k - 1]) << "k=" << k + 1;
    }
    for (std::size_t k = 6; k < 18; ++k) {
        EXPECT_LT(r.residuals[k] / r.residuals[k - 1], r.residuals[k - 1] / r.residuals[k - 2]) << "k=" << k + 1;
    }
    EXPECT_LT(r.residuals.back(), 1e-9);
}

TEST(RunClassical, FixedPoint) {
    const auto p = reference(63, 32, 4);
    nnwr::Config c;
    c.iterates = 20;
    c.tol = 1e-10;
    const auto r = nnwr::run_classical(p, c);
    ASSERT_TRUE(r.converged);
    auto again = forced(1);
    again.guess = {InitialGuess::Custom, r.final_traces};
    const auto s = nnwr::run_classical(p, again);
    EXPECT_LE(s.final_traces.max_abs_diff(r.final_traces), 10 * c.tol);
}

TEST(RunPipeline, MatchesClassicalBitwise) {
    for (std::size_t n : {2u, 3u, 5u}) {
        for (int k : {1, 2, 3}) {
            for (std::size_t j : {1u, 2u, 4u, 8u}) {
                const auto p = reference(40, 32, n, j);
                const auto a = nnwr::run_classical(p, forced(k));
                const auto b = nnwr::run_pipeline(p, forced(k));
                EXPECT_TRUE(a.final_traces.bitwise_equal(b.final_traces)) << "N=" << n << " K=" << k << " J=" << j;
                EXPECT_EQ(a.residuals, b.residuals);
            }
        }
    }
}

TEST(RunPipeline, SingleBlockSingleIterateIsOneClassicalIterate) {
    const auto p = reference(31, 16, 3, 1);
    const auto a = nnwr::run_classical(p, forced(1));
    const auto b = nnwr::run_pipeline(p, forced(1));
    EXPECT_TRUE(a.final_traces.bitwise_equal(b.final_traces));
    EXPECT_EQ(b.workers, 4u);  // J < 2K: N*J workers plus the collector
}

TEST(RunPipeline, RandomDelaysDoNotChangeResults) {
    const auto p = reference(31, 16, 3, 4);
    const auto base = nnwr::run_pipeline(p, forced(2));
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto c = forced(2);
        c.transport.max_delay_us = 300;
        c.transport.seed = seed;
        const auto r = nnwr::run_pipeline(p, c);
        EXPECT_TRUE(r.final_traces.bitwise_equal(base.final_traces)) << "seed " << seed;
    }
}

TEST(RunPipeline, MessageCountsAndWords) {
    const std::size_t n = 4, j = 8;
    const int k = 2;
    const auto p = reference(63, 32, n, j);
    const auto pipe = nnwr::run_pipeline(p, forced(k));
    const auto classic = nnwr::run_classical(p, forced(k));
    EXPECT_EQ(pipe.messages.data_messages, 4 * j * (n - 1) * k);
    EXPECT_EQ(pipe.messages.data_words, classic.messages.data_words);
    EXPECT_EQ(pipe.pending_at_shutdown, 0u);
    EXPECT_EQ(pipe.workers, 2 * n * k + 1);  // plus the collector
}

TEST(RunPipeline, TwoDomainTwoBlockTaskGraph) {
    auto c = forced(2);
    c.transport.record_trace = true;
    const auto r = nnwr::run_pipeline(reference(15, 8, 2, 2), c);
    const auto dag = schedule::build_dag(schedule::Method::Nnwr, 2, 2, 2);
    EXPECT_EQ(dag.size(), 16u);

    using EdgeKey = std::tuple<TaskRef, TaskRef>;
    std::set<EdgeKey> from_dag;
    for (const auto& e : dag.edges()) {
        if (e.kind != schedule::EdgeKind::Sequence) {
            from_dag.insert({dag.tasks()[e.from], dag.tasks()[e.to]});
        }
    }
    std::set<EdgeKey> observed;
    for (const auto& m : r.message_trace) {
        TaskRef from;
        TaskRef to;
        switch (m.kind) {
            case MsgKind::NeumannJumpHalf:
                from = {m.sender, m.iterate, Stage::Dirichlet, m.block};
                to = {m.receiver, m.iterate, Stage::Auxiliary, m.block};
                break;
            case MsgKind::DirichletTrace:
                from = {m.sender, m.iterate, Stage::Auxiliary, m.block};
                to = {m.receiver, m.iterate + 1, Stage::Dirichlet, m.block};
                break;
            case MsgKind::StateHandoff:
                from = {m.sender, m.iterate, m.sender_stage, m.block};
                to = m.sender_stage == Stage::Dirichlet ? TaskRef{m.receiver, m.iterate, Stage::Auxiliary, m.block}
                                                        : TaskRef{m.receiver, m.iterate + 1, Stage::Dirichlet, m.block};
                break;
            default:
                FAIL() << "unexpected message kind";
        }
        if (to.iterate <= 2) {
            observed.insert({from, to});
        }
    }
    EXPECT_EQ(observed, from_dag);
}

TEST(RunPipeline, TimelineCoversEveryTask) {
    const auto r = nnwr::run_pipeline(reference(15, 8, 2, 4), forced(2));
    std::size_t work = 0;
    for (const auto& e : r.timeline) {
        if (e.stage != Stage::Finalize) ++work;
        EXPECT_LE(e.start_event, e.end_event);
    }
    EXPECT_EQ(work, 2u * 2 * 2 * 4);
}

TEST(PeakEfficiency, Examples) {
    EXPECT_NEAR(nnwr::peak_efficiency(4, 8), 8.0 / 15.0, 1e-15);
    EXPECT_NEAR(nnwr::peak_efficiency(4, 64), 64.0 / 71.0, 1e-15);
    EXPECT_EQ(nnwr::peak_efficiency(1, 1), 1.0);
    for (int k = 1; k <= 6; ++k) {
        EXPECT_NEAR(nnwr::peak_efficiency(k, 2 * k), 2.0 * k / (4.0 * k - 1.0), 1e-15);
    }
    EXPECT_THROW(nnwr::peak_efficiency(0, 1), ConfigError);
}
