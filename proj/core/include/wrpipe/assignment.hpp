#pragma once

#include <compare>
#include <cstddef>
#include <vector>

#include "wrpipe/transport.hpp"

namespace wrpipe {

/// One block-task: subdomain s (0-based), iterate k (1-based), stage, block j (0-based).
struct TaskRef {
    int sub = 0;
    int iterate = 1;
    Stage stage = Stage::Solve;
    int block = 0;

    friend auto operator<=>(const TaskRef&, const TaskRef&) = default;
};

/// Ordered task lists, one per worker. Every worker executes its list in order.
struct Assignment {
    std::vector<std::vector<TaskRef>> workers;

    [[nodiscard]] std::size_t worker_count() const { return workers.size(); }
    [[nodiscard]] std::size_t task_count() const;
};

/// Looks up which worker hosts a (sub, iterate, stage) chain. Chains never
/// split across workers in any of the assignments below.
class ChainDirectory {
  public:
    ChainDirectory(const Assignment& a, int subdomains, int iterates);

    /// iterate may be iterates+1 for Stage::Finalize tasks.
    [[nodiscard]] std::size_t worker_of(int sub, int iterate, Stage stage) const;

  private:
    [[nodiscard]] std::size_t slot(int sub, int iterate, Stage stage) const;

    int subdomains_;
    int iterates_;
    std::vector<std::size_t> table_;
};

/// Pipeline NNWR. J >= 2K: one worker per (s, k, stage), each streaming all
/// blocks. J < 2K: N*J workers; worker (s, l) runs stages a = l+1, l+1+J, ...
/// where odd a is the Dirichlet stage of iterate (a+1)/2 and even a the
/// auxiliary stage of iterate a/2. With a collector, one extra worker runs the
/// Finalize tasks that turn the last auxiliary results into traces.
Assignment nnwr_pipeline_assignment(int subdomains, int iterates, int blocks, bool with_collector);

/// Classical NNWR: one worker per subdomain, D then A per iterate.
Assignment nnwr_classical_assignment(int subdomains, int iterates);

/// DNWR with one worker per subdomain, iterates in order (Algorithm-3 layout).
Assignment dnwr_naive_assignment(int subdomains, int iterates, int blocks = 1);

/// DNWR packed onto ceil(N/2) processes when 2K >= ceil(N/2) (two subdomains per
/// process, the one nearer the pivot first) or onto 2K processes otherwise.
Assignment dnwr_packed_assignment(int subdomains, int iterates);

/// Pipeline DNWR: one worker per (s, k), each streaming all blocks.
Assignment dnwr_pipeline_assignment(int subdomains, int iterates, int blocks);

}  // namespace wrpipe
