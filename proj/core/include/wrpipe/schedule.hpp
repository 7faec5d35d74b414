#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wrpipe/assignment.hpp"

namespace wrpipe::schedule {

/// Exact non-negative rational, always in lowest terms.
class Fraction {
  public:
    Fraction() = default;
    Fraction(std::int64_t num, std::int64_t den = 1);

    [[nodiscard]] std::int64_t num() const { return num_; }
    [[nodiscard]] std::int64_t den() const { return den_; }
    [[nodiscard]] double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    [[nodiscard]] std::string str() const;

    friend bool operator==(const Fraction&, const Fraction&) = default;
    friend std::strong_ordering operator<=>(const Fraction& a, const Fraction& b);

  private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Fraction& f);

enum class Method { Nnwr, Dnwr };

enum class EdgeKind {
    Sequence,        // same chain, block j -> j+1
    StateCarry,      // same subdomain, next stage or iterate
    NeumannData,     // NNWR flux half or DNWR outward flux
    DirichletData,   // NNWR psi trace or DNWR inward trace
};

struct Edge {
    std::size_t from;
    std::size_t to;
    EdgeKind kind;
};

/// Block-task graph. NNWR tasks are (s, k, Dirichlet|Auxiliary, j), DNWR tasks
/// (s, k, Solve, j); all indices 0-based except the iterate.
class TaskDag {
  public:
    TaskDag(Method method, int subdomains, int iterates, int blocks, int pivot);

    [[nodiscard]] Method method() const { return method_; }
    [[nodiscard]] int subdomains() const { return n_; }
    [[nodiscard]] int iterates() const { return k_; }
    [[nodiscard]] int blocks() const { return j_; }
    [[nodiscard]] int pivot() const { return m_; }

    [[nodiscard]] std::size_t size() const { return tasks_.size(); }
    [[nodiscard]] const std::vector<TaskRef>& tasks() const { return tasks_; }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] const std::vector<std::size_t>& predecessors(std::size_t node) const { return preds_[node]; }
    [[nodiscard]] std::optional<std::size_t> find(const TaskRef& t) const;
    [[nodiscard]] std::size_t index_of(const TaskRef& t) const;

  private:
    friend TaskDag build_dag(Method, int, int, int, int);
    void add_edge(const TaskRef& from, const TaskRef& to, EdgeKind kind);

    Method method_;
    int n_;
    int k_;
    int j_;
    int m_;
    std::vector<TaskRef> tasks_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> preds_;
};

/// pivot is 0-based and only used for DNWR.
TaskDag build_dag(Method method, int subdomains, int iterates, int blocks, int pivot = 0);

struct SimOptions {
    /// Per-task cost; empty means unit cost. Indexed like dag.tasks().
    std::vector<std::int64_t> costs;
    /// Added to every edge that crosses workers.
    std::int64_t latency = 0;
};

struct IdleGap {
    std::size_t worker = 0;
    std::int64_t from = 0;
    std::int64_t to = 0;
    TaskRef waiting_for;
};

struct SimResult {
    std::int64_t makespan = 0;
    std::int64_t total_cost = 0;
    std::vector<std::int64_t> busy;  // per worker
    std::vector<std::int64_t> start;  // per task
    std::vector<std::int64_t> finish;
    Fraction efficiency;  // total cost / (workers * makespan)
    std::optional<IdleGap> first_idle_gap;
};

/// Runs every worker's list in order; a task starts once its worker is free and
/// all predecessors have finished. Assignment tasks missing from the DAG (e.g.
/// Finalize) are ignored. Throws ScheduleError if a task is unassigned,
/// assigned twice, or the lists deadlock.
SimResult simulate(const TaskDag& dag, const Assignment& assignment, const SimOptions& options = {});

/// All tasks on one worker in a topological order.
Assignment single_worker(const TaskDag& dag);

/// Canonical assignment for a pipeline run (Alg. 2 / A1 for NNWR, worker per (s,k) for DNWR).
Assignment canonical_pipeline(const TaskDag& dag);

/// Closed forms with exact arithmetic.
Fraction nnwr_peak_efficiency(int iterates, int blocks);
Fraction dnwr_peak_efficiency(int subdomains, int iterates, int blocks);

struct EfficiencyRow {
    int blocks = 0;
    Fraction simulated;
    Fraction theoretical;
    std::int64_t makespan = 0;
    std::size_t workers = 0;
    std::optional<IdleGap> first_idle_gap;

    [[nodiscard]] bool matches() const { return simulated == theoretical; }
};

/// Simulates the canonical pipeline assignment for each J and pairs it with the closed form.
std::vector<EfficiencyRow> theoretical_vs_simulated(Method method,
                                                    int subdomains,
                                                    int iterates,
                                                    const std::vector<int>& blocks,
                                                    int pivot = -1);

/// `J,simulated_efficiency,theoretical_efficiency`
void write_efficiency_csv(std::ostream& os, const std::vector<EfficiencyRow>& rows);

}  // namespace wrpipe::schedule
