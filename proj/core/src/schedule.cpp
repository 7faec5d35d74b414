#include "wrpipe/schedule.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <iomanip>

#include "wrpipe/errors.hpp"
#include "wrpipe/grid.hpp"

namespace wrpipe::schedule {

Fraction::Fraction(std::int64_t num, std::int64_t den) {
    if (den == 0) {
        throw ConfigError("fraction with zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    num_ = g == 0 ? 0 : num / g;
    den_ = g == 0 ? 1 : den / g;
}

std::string Fraction::str() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) {
    __extension__ using wide = __int128;
    const wide lhs = static_cast<wide>(a.num()) * b.den();
    const wide rhs = static_cast<wide>(b.num()) * a.den();
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Fraction& f) {
    return os << f.str();
}

TaskDag::TaskDag(Method method, int subdomains, int iterates, int blocks, int pivot)
    : method_(method), n_(subdomains), k_(iterates), j_(blocks), m_(pivot) {
    if (n_ < 1 || k_ < 1 || j_ < 1) {
        throw ConfigError("N, K and J must all be at least 1");
    }
    if (method_ == Method::Dnwr && (m_ < 0 || m_ >= n_)) {
        throw ConfigError("pivot must be a subdomain index");
    }
    const int stages = method_ == Method::Nnwr ? 2 : 1;
    tasks_.reserve(static_cast<std::size_t>(n_ * k_ * stages * j_));
    for (int s = 0; s < n_; ++s) {
        for (int k = 1; k <= k_; ++k) {
            for (int q = 0; q < stages; ++q) {
                const Stage stage = method_ == Method::Dnwr ? Stage::Solve : (q == 0 ? Stage::Dirichlet : Stage::Auxiliary);
                for (int j = 0; j < j_; ++j) {
                    tasks_.push_back({s, k, stage, j});
                }
            }
        }
    }
    preds_.resize(tasks_.size());
}

std::optional<std::size_t> TaskDag::find(const TaskRef& t) const {
    if (t.sub < 0 || t.sub >= n_ || t.iterate < 1 || t.iterate > k_ || t.block < 0 || t.block >= j_) {
        return std::nullopt;
    }
    std::size_t q = 0;
    if (method_ == Method::Nnwr) {
        if (t.stage == Stage::Dirichlet) {
            q = 0;
        } else if (t.stage == Stage::Auxiliary) {
            q = 1;
        } else {
            return std::nullopt;
        }
        return ((static_cast<std::size_t>(t.sub) * k_ + (t.iterate - 1)) * 2 + q) * j_ + t.block;
    }
    if (t.stage != Stage::Solve) {
        return std::nullopt;
    }
    return (static_cast<std::size_t>(t.sub) * k_ + (t.iterate - 1)) * j_ + t.block;
}

std::size_t TaskDag::index_of(const TaskRef& t) const {
    auto i = find(t);
    if (!i) {
        throw ScheduleError("task not in graph: s=" + std::to_string(t.sub) + " k=" + std::to_string(t.iterate) +
                            " j=" + std::to_string(t.block));
    }
    return *i;
}

void TaskDag::add_edge(const TaskRef& from, const TaskRef& to, EdgeKind kind) {
    const std::size_t a = index_of(from);
    const std::size_t b = index_of(to);
    edges_.push_back({a, b, kind});
    preds_[b].push_back(a);
}

TaskDag build_dag(Method method, int subdomains, int iterates, int blocks, int pivot) {
    TaskDag dag(method, subdomains, iterates, blocks, pivot);
    const int n = subdomains;
    if (method == Method::Nnwr) {
        for (int s = 0; s < n; ++s) {
            for (int k = 1; k <= iterates; ++k) {
                for (int j = 0; j < blocks; ++j) {
                    const TaskRef d{s, k, Stage::Dirichlet, j};
                    const TaskRef a{s, k, Stage::Auxiliary, j};
                    if (j > 0) {
                        dag.add_edge({s, k, Stage::Dirichlet, j - 1}, d, EdgeKind::Sequence);
                        dag.add_edge({s, k, Stage::Auxiliary, j - 1}, a, EdgeKind::Sequence);
                    }
                    for (int t = std::max(0, s - 1); t <= std::min(n - 1, s + 1); ++t) {
                        dag.add_edge({t, k, Stage::Dirichlet, j}, a,
                                     t == s ? EdgeKind::StateCarry : EdgeKind::NeumannData);
                        if (k > 1) {
                            dag.add_edge({t, k - 1, Stage::Auxiliary, j}, d,
                                         t == s ? EdgeKind::StateCarry : EdgeKind::DirichletData);
                        }
                    }
                }
            }
        }
        return dag;
    }

    const int m = pivot;
    for (int s = 0; s < n; ++s) {
        const bool holds_l = s > 0 && s <= m;
        const bool holds_r = s + 1 < n && s >= m;
        for (int k = 1; k <= iterates; ++k) {
            for (int j = 0; j < blocks; ++j) {
                const TaskRef me{s, k, Stage::Solve, j};
                if (j > 0) {
                    dag.add_edge({s, k, Stage::Solve, j - 1}, me, EdgeKind::Sequence);
                }
                if (s < m) {
                    dag.add_edge({s + 1, k, Stage::Solve, j}, me, EdgeKind::NeumannData);
                } else if (s > m) {
                    dag.add_edge({s - 1, k, Stage::Solve, j}, me, EdgeKind::NeumannData);
                }
                if (k > 1) {
                    if (holds_l || holds_r) {
                        dag.add_edge({s, k - 1, Stage::Solve, j}, me, EdgeKind::StateCarry);
                    }
                    if (holds_l) {
                        dag.add_edge({s - 1, k - 1, Stage::Solve, j}, me, EdgeKind::DirichletData);
                    }
                    if (holds_r) {
                        dag.add_edge({s + 1, k - 1, Stage::Solve, j}, me, EdgeKind::DirichletData);
                    }
                }
            }
        }
    }
    return dag;
}

SimResult simulate(const TaskDag& dag, const Assignment& assignment, const SimOptions& options) {
    const std::size_t count = dag.size();
    if (!options.costs.empty() && options.costs.size() != count) {
        throw ConfigError("cost vector must have one entry per task");
    }
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> owner(count, kNone);
    std::vector<std::vector<std::size_t>> lists(assignment.worker_count());
    for (std::size_t w = 0; w < assignment.worker_count(); ++w) {
        for (const auto& t : assignment.workers[w]) {
            auto i = dag.find(t);
            if (!i) {
                continue;
            }
            if (owner[*i] != kNone) {
                throw ScheduleError("task assigned twice: s=" + std::to_string(t.sub) + " k=" +
                                    std::to_string(t.iterate) + " j=" + std::to_string(t.block));
            }
            owner[*i] = w;
            lists[w].push_back(*i);
        }
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (owner[i] == kNone) {
            const auto& t = dag.tasks()[i];
            throw ScheduleError("task unassigned: s=" + std::to_string(t.sub) + " k=" + std::to_string(t.iterate) +
                                " j=" + std::to_string(t.block));
        }
    }

    SimResult r;
    r.start.assign(count, -1);
    r.finish.assign(count, -1);
    std::size_t active = 0;
    for (const auto& l : lists) {
        active += l.empty() ? 0 : 1;
    }
    r.busy.assign(lists.size(), 0);
    std::vector<std::size_t> ptr(lists.size(), 0);
    std::vector<std::int64_t> free_at(lists.size(), 0);
    std::size_t done = 0;
    while (done < count) {
        bool progress = false;
        for (std::size_t w = 0; w < lists.size(); ++w) {
            while (ptr[w] < lists[w].size()) {
                const std::size_t i = lists[w][ptr[w]];
                std::int64_t ready = free_at[w];
                bool blocked = false;
                for (std::size_t pred : dag.predecessors(i)) {
                    if (r.finish[pred] < 0) {
                        blocked = true;
                        break;
                    }
                    ready = std::max(ready, r.finish[pred] + (owner[pred] == w ? 0 : options.latency));
                }
                if (blocked) {
                    break;
                }
                const std::int64_t cost = options.costs.empty() ? 1 : options.costs[i];
                if (ptr[w] > 0 && ready > free_at[w]) {
                    const bool earlier = !r.first_idle_gap || free_at[w] < r.first_idle_gap->from ||
                                         (free_at[w] == r.first_idle_gap->from && w < r.first_idle_gap->worker);
                    if (earlier) {
                        r.first_idle_gap = IdleGap{w, free_at[w], ready, dag.tasks()[i]};
                    }
                }
                r.start[i] = ready;
                r.finish[i] = ready + cost;
                free_at[w] = r.finish[i];
                r.busy[w] += cost;
                r.total_cost += cost;
                r.makespan = std::max(r.makespan, r.finish[i]);
                ++ptr[w];
                ++done;
                progress = true;
            }
        }
        if (!progress) {
            for (std::size_t w = 0; w < lists.size(); ++w) {
                if (ptr[w] < lists[w].size()) {
                    const auto& t = dag.tasks()[lists[w][ptr[w]]];
                    throw ScheduleError("assignment deadlocks: worker " + std::to_string(w) + " stuck at s=" +
                                        std::to_string(t.sub) + " k=" + std::to_string(t.iterate) +
                                        " j=" + std::to_string(t.block));
                }
            }
        }
    }
    if (r.makespan > 0) {
        r.efficiency = Fraction(r.total_cost, static_cast<std::int64_t>(active) * r.makespan);
    }
    return r;
}

Assignment single_worker(const TaskDag& dag) {
    const std::size_t count = dag.size();
    std::vector<std::size_t> indegree(count, 0);
    std::vector<std::vector<std::size_t>> succ(count);
    for (const auto& e : dag.edges()) {
        ++indegree[e.to];
        succ[e.from].push_back(e.to);
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < count; ++i) {
        if (indegree[i] == 0) {
            ready.push(i);
        }
    }
    Assignment a;
    auto& list = a.workers.emplace_back();
    while (!ready.empty()) {
        const std::size_t i = ready.top();
        ready.pop();
        list.push_back(dag.tasks()[i]);
        for (std::size_t nxt : succ[i]) {
            if (--indegree[nxt] == 0) {
                ready.push(nxt);
            }
        }
    }
    if (list.size() != count) {
        throw ScheduleError("task graph has a cycle");
    }
    return a;
}

Assignment canonical_pipeline(const TaskDag& dag) {
    if (dag.method() == Method::Nnwr) {
        return nnwr_pipeline_assignment(dag.subdomains(), dag.iterates(), dag.blocks(), false);
    }
    return dnwr_pipeline_assignment(dag.subdomains(), dag.iterates(), dag.blocks());
}

Fraction nnwr_peak_efficiency(int iterates, int blocks) {
    if (iterates < 1 || blocks < 1) {
        throw ConfigError("K and J must be at least 1");
    }
    const std::int64_t span = 2 * static_cast<std::int64_t>(iterates) + blocks - 1;
    return 2 * iterates >= blocks ? Fraction(2 * static_cast<std::int64_t>(iterates), span) : Fraction(blocks, span);
}

Fraction dnwr_peak_efficiency(int subdomains, int iterates, int blocks) {
    if (subdomains < 1 || iterates < 1) {
        throw ConfigError("N and K must be at least 1");
    }
    if (blocks <= (subdomains + 1) / 2 + 2 * iterates - 1) {
        throw ConfigError("efficiency formula requires J > ceil(N/2) + 2K - 1 = " +
                          std::to_string((subdomains + 1) / 2 + 2 * iterates - 1));
    }
    return Fraction(blocks, static_cast<std::int64_t>(blocks) + subdomains / 2 + 2 * (iterates - 1));
}

std::vector<EfficiencyRow> theoretical_vs_simulated(Method method,
                                                    int subdomains,
                                                    int iterates,
                                                    const std::vector<int>& blocks,
                                                    int pivot) {
    if (blocks.empty()) {
        throw ConfigError("J list is empty");
    }
    const int m = pivot >= 0 ? pivot : static_cast<int>(middle_pivot(static_cast<std::size_t>(subdomains)));
    std::vector<EfficiencyRow> rows;
    for (int j : blocks) {
        EfficiencyRow row;
        row.blocks = j;
        row.theoretical = method == Method::Nnwr ? nnwr_peak_efficiency(iterates, j)
                                                 : dnwr_peak_efficiency(subdomains, iterates, j);
        const TaskDag dag = build_dag(method, subdomains, iterates, j, m);
        const Assignment a = canonical_pipeline(dag);
        const SimResult sim = simulate(dag, a);
        row.simulated = sim.efficiency;
        row.makespan = sim.makespan;
        row.workers = a.worker_count();
        row.first_idle_gap = sim.first_idle_gap;
        rows.push_back(row);
    }
    return rows;
}

void write_efficiency_csv(std::ostream& os, const std::vector<EfficiencyRow>& rows) {
    os << "J,simulated_efficiency,theoretical_efficiency\n";
    for (const auto& r : rows) {
        os << r.blocks << ',' << std::fixed << std::setprecision(10) << r.simulated.value() << ','
           << r.theoretical.value() << '\n';
    }
}

}  // namespace wrpipe::schedule
