#include <map>
#include <set>

#include <gtest/gtest.h>

#include "wrpipe/assignment.hpp"
#include "wrpipe/errors.hpp"
#include "wrpipe/schedule.hpp"

using namespace wrpipe;

namespace {

std::map<TaskRef, int> census(const Assignment& a) {
    std::map<TaskRef, int> c;
    for (const auto& w : a.workers) {
        for (const auto& t : w) {
            ++c[t];
        }
    }
    return c;
}

std::vector<int> subdomains_of(const std::vector<TaskRef>& list, int iterate) {
    std::vector<int> out;
    for (const auto& t : list) {
        if (t.iterate == iterate) out.push_back(t.sub + 1);
    }
    return out;
}

}  // namespace

TEST(NnwrPipelineAssignment, WorkerPerStageWhenBlocksSuffice) {
    const auto a = nnwr_pipeline_assignment(3, 2, 4, false);
    EXPECT_EQ(a.worker_count(), 12u);  // 2NK
    for (const auto& w : a.workers) {
        ASSERT_EQ(w.size(), 4u);
        for (int j = 0; j < 4; ++j) {
            EXPECT_EQ(w[j].block, j);
            EXPECT_EQ(w[j].iterate, w[0].iterate);
            EXPECT_EQ(w[j].stage, w[0].stage);
        }
    }
}

TEST(NnwrPipelineAssignment, FewBlocksUseNJWorkers) {
    const int n = 2, k = 4, j = 3;
    const auto a = nnwr_pipeline_assignment(n, k, j, false);
    EXPECT_EQ(a.worker_count(), static_cast<std::size_t>(n * j));
    // worker (s=0, l=1) runs stages 1, 4, 7: D1, A2, D4
    const auto& w = a.workers[0];
    ASSERT_EQ(w.size(), 9u);
    EXPECT_EQ(w[0], (TaskRef{0, 1, Stage::Dirichlet, 0}));
    EXPECT_EQ(w[3], (TaskRef{0, 2, Stage::Auxiliary, 0}));
    EXPECT_EQ(w[6], (TaskRef{0, 4, Stage::Dirichlet, 0}));
}

TEST(NnwrPipelineAssignment, EveryTaskExactlyOnce) {
    for (int n = 1; n <= 4; ++n) {
        for (int k = 1; k <= 4; ++k) {
            for (int j : {1, 2, 3, 5, 8, 16}) {
                const auto c = census(nnwr_pipeline_assignment(n, k, j, true));
                EXPECT_EQ(c.size(), static_cast<std::size_t>(2 * n * k * j + n * j));
                for (const auto& [t, count] : c) {
                    EXPECT_EQ(count, 1);
                }
            }
        }
    }
}

TEST(NnwrPipelineAssignment, CollectorRunsFinalize) {
    const auto a = nnwr_pipeline_assignment(2, 1, 2, true);
    const auto& last = a.workers.back();
    ASSERT_EQ(last.size(), 4u);
    for (const auto& t : last) {
        EXPECT_EQ(t.stage, Stage::Finalize);
        EXPECT_EQ(t.iterate, 2);
    }
}

TEST(NnwrPipelineAssignment, RejectsNonPositive) {
    EXPECT_THROW(nnwr_pipeline_assignment(0, 1, 1, false), ConfigError);
    EXPECT_THROW(nnwr_pipeline_assignment(1, 0, 1, false), ConfigError);
}

TEST(ChainDirectory, FindsHosts) {
    const auto a = nnwr_pipeline_assignment(2, 2, 4, true);
    const ChainDirectory d(a, 2, 2);
    EXPECT_EQ(d.worker_of(0, 1, Stage::Dirichlet), 0u);
    EXPECT_EQ(d.worker_of(0, 1, Stage::Auxiliary), 1u);
    EXPECT_EQ(d.worker_of(1, 2, Stage::Auxiliary), 7u);
    EXPECT_EQ(d.worker_of(1, 3, Stage::Finalize), 8u);
    EXPECT_THROW((void)d.worker_of(2, 1, Stage::Dirichlet), ScheduleError);
    EXPECT_THROW((void)d.worker_of(0, 1, Stage::Solve), ScheduleError);
}

TEST(ChainDirectory, RejectsSplitChains) {
    Assignment a;
    a.workers = {{{0, 1, Stage::Solve, 0}}, {{0, 1, Stage::Solve, 1}}};
    EXPECT_THROW(ChainDirectory(a, 1, 1), ScheduleError);
}

TEST(DnwrPackedAssignment, TwoSubdomainsPerProcessNearPivotFirst) {
    // N=8, m=4, 2K >= 4
    const auto a = dnwr_packed_assignment(8, 2);
    ASSERT_EQ(a.worker_count(), 4u);
    EXPECT_EQ(subdomains_of(a.workers[0], 1), (std::vector<int>{2, 1}));
    EXPECT_EQ(subdomains_of(a.workers[1], 1), (std::vector<int>{4, 3}));
    EXPECT_EQ(subdomains_of(a.workers[2], 1), (std::vector<int>{5, 6}));
    EXPECT_EQ(subdomains_of(a.workers[3], 2), (std::vector<int>{7, 8}));
}

TEST(DnwrPackedAssignment, OddCountSkipsMissingSubdomain) {
    // N=5, m=3: process 3 owns 5 and the nonexistent 6
    const auto a = dnwr_packed_assignment(5, 2);
    ASSERT_EQ(a.worker_count(), 3u);
    EXPECT_EQ(subdomains_of(a.workers[1], 1), (std::vector<int>{3, 4}));
    EXPECT_EQ(subdomains_of(a.workers[2], 1), (std::vector<int>{5}));
}

TEST(DnwrPackedAssignment, FewIteratesSweepWindows) {
    // N=9, m=5, K=1: two processes sweep outward from the pivot
    const auto a = dnwr_packed_assignment(9, 1);
    ASSERT_EQ(a.worker_count(), 2u);
    EXPECT_EQ(subdomains_of(a.workers[0], 1), (std::vector<int>{4, 3, 2, 1}));
    EXPECT_EQ(subdomains_of(a.workers[1], 1), (std::vector<int>{5, 6, 7, 8, 9}));
}

TEST(DnwrPackedAssignment, CoversEverythingAndNeverDeadlocks) {
    for (int n = 1; n <= 9; ++n) {
        for (int k = 1; k <= 4; ++k) {
            const auto a = dnwr_packed_assignment(n, k);
            const auto c = census(a);
            ASSERT_EQ(c.size(), static_cast<std::size_t>(n * k)) << "N=" << n << " K=" << k;
            for (const auto& [t, count] : c) {
                EXPECT_EQ(count, 1);
            }
            const auto dag = schedule::build_dag(schedule::Method::Dnwr, n, k, 1, (n + 1) / 2 - 1);
            EXPECT_NO_THROW(schedule::simulate(dag, a)) << "N=" << n << " K=" << k;
            const std::size_t expected = 2 * k >= (n + 1) / 2 ? static_cast<std::size_t>((n + 1) / 2)
                                                              : static_cast<std::size_t>(2 * k);
            EXPECT_EQ(a.worker_count(), expected);
        }
    }
}

TEST(DnwrNaiveAssignment, OneWorkerPerSubdomain) {
    const auto a = dnwr_naive_assignment(5, 2);
    ASSERT_EQ(a.worker_count(), 5u);
    EXPECT_EQ(a.task_count(), 10u);
    EXPECT_EQ(a.workers[2][1], (TaskRef{2, 2, Stage::Solve, 0}));
}

TEST(DnwrPipelineAssignment, WorkerPerSubdomainAndIterate) {
    const auto a = dnwr_pipeline_assignment(3, 2, 6);
    EXPECT_EQ(a.worker_count(), 6u);
    EXPECT_EQ(a.task_count(), 36u);
}
