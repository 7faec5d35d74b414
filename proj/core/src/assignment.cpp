#include "wrpipe/assignment.hpp"

#include <limits>
#include <string>

#include "wrpipe/errors.hpp"

namespace wrpipe {

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

int stage_index(Stage stage) {
    switch (stage) {
        case Stage::Dirichlet: return 0;
        case Stage::Auxiliary: return 1;
        case Stage::Solve: return 2;
        case Stage::Finalize: return 3;
        case Stage::Control: break;
    }
    throw ScheduleError("control stage has no worker");
}

void require_positive(int subdomains, int iterates, int blocks) {
    if (subdomains < 1 || iterates < 1 || blocks < 1) {
        throw ConfigError("N, K and J must all be at least 1");
    }
}

}  // namespace

std::size_t Assignment::task_count() const {
    std::size_t n = 0;
    for (const auto& w : workers) {
        n += w.size();
    }
    return n;
}

ChainDirectory::ChainDirectory(const Assignment& a, int subdomains, int iterates)
    : subdomains_(subdomains), iterates_(iterates),
      table_(static_cast<std::size_t>(4 * subdomains * (iterates + 2)), kUnassigned) {
    for (std::size_t w = 0; w < a.workers.size(); ++w) {
        for (const auto& t : a.workers[w]) {
            auto& entry = table_[slot(t.sub, t.iterate, t.stage)];
            if (entry != kUnassigned && entry != w) {
                throw ScheduleError("chain (s=" + std::to_string(t.sub) + ", k=" + std::to_string(t.iterate) +
                                    ") split across workers");
            }
            entry = w;
        }
    }
}

std::size_t ChainDirectory::slot(int sub, int iterate, Stage stage) const {
    if (sub < 0 || sub >= subdomains_ || iterate < 1 || iterate > iterates_ + 1) {
        throw ScheduleError("task outside the schedule: s=" + std::to_string(sub) +
                            " k=" + std::to_string(iterate));
    }
    return static_cast<std::size_t>((stage_index(stage) * subdomains_ + sub) * (iterates_ + 2) + iterate);
}

std::size_t ChainDirectory::worker_of(int sub, int iterate, Stage stage) const {
    const std::size_t w = table_[slot(sub, iterate, stage)];
    if (w == kUnassigned) {
        throw ScheduleError("no worker hosts s=" + std::to_string(sub) + " k=" + std::to_string(iterate) +
                            " stage=" + to_string(stage));
    }
    return w;
}

Assignment nnwr_pipeline_assignment(int subdomains, int iterates, int blocks, bool with_collector) {
    require_positive(subdomains, iterates, blocks);
    Assignment a;
    const int stages = 2 * iterates;
    auto stage_task = [](int s, int a_index, int j) {
        const bool dirichlet = a_index % 2 == 1;
        return TaskRef{s, dirichlet ? (a_index + 1) / 2 : a_index / 2,
                       dirichlet ? Stage::Dirichlet : Stage::Auxiliary, j};
    };
    if (blocks >= stages) {
        for (int s = 0; s < subdomains; ++s) {
            for (int k = 1; k <= iterates; ++k) {
                for (Stage stage : {Stage::Dirichlet, Stage::Auxiliary}) {
                    auto& list = a.workers.emplace_back();
                    for (int j = 0; j < blocks; ++j) {
                        list.push_back({s, k, stage, j});
                    }
                }
            }
        }
    } else {
        for (int s = 0; s < subdomains; ++s) {
            for (int l = 1; l <= blocks; ++l) {
                auto& list = a.workers.emplace_back();
                for (int stage = l; stage <= stages; stage += blocks) {
                    for (int j = 0; j < blocks; ++j) {
                        list.push_back(stage_task(s, stage, j));
                    }
                }
            }
        }
    }
    if (with_collector) {
        auto& list = a.workers.emplace_back();
        for (int j = 0; j < blocks; ++j) {
            for (int s = 0; s < subdomains; ++s) {
                list.push_back({s, iterates + 1, Stage::Finalize, j});
            }
        }
    }
    return a;
}

Assignment nnwr_classical_assignment(int subdomains, int iterates) {
    require_positive(subdomains, iterates, 1);
    Assignment a;
    for (int s = 0; s < subdomains; ++s) {
        auto& list = a.workers.emplace_back();
        for (int k = 1; k <= iterates; ++k) {
            list.push_back({s, k, Stage::Dirichlet, 0});
            list.push_back({s, k, Stage::Auxiliary, 0});
        }
        list.push_back({s, iterates + 1, Stage::Finalize, 0});
    }
    return a;
}

Assignment dnwr_naive_assignment(int subdomains, int iterates, int blocks) {
    require_positive(subdomains, iterates, blocks);
    Assignment a;
    for (int s = 0; s < subdomains; ++s) {
        auto& list = a.workers.emplace_back();
        for (int k = 1; k <= iterates; ++k) {
            for (int j = 0; j < blocks; ++j) {
                list.push_back({s, k, Stage::Solve, j});
            }
        }
    }
    return a;
}

Assignment dnwr_packed_assignment(int subdomains, int iterates) {
    require_positive(subdomains, iterates, 1);
    const int n = subdomains;
    const int k_max = iterates;
    const int m = (n + 1) / 2;  // 1-based pivot, as in the listings
    Assignment a;
    auto push = [&](std::vector<TaskRef>& list, int i, int k) {
        if (i >= 1 && i <= n) {
            list.push_back({i - 1, k, Stage::Solve, 0});
        }
    };

    if (2 * k_max >= m) {
        // ceil(N/2) processes; process p owns subdomains 2p-1 and 2p.
        for (int p = 1; p <= m; ++p) {
            auto& list = a.workers.emplace_back();
            int first = 0;
            int second = 0;
            if (2 * p < m) {
                first = 2 * p;
                second = 2 * p - 1;
            } else if (2 * p - 1 > m) {
                first = 2 * p - 1;
                second = 2 * p;
            } else if (2 * p == m) {
                first = 2 * p;
                second = 2 * p - 1;
            } else {
                first = 2 * p - 1;
                second = 2 * p;
            }
            for (int k = 1; k <= k_max; ++k) {
                push(list, first, k);
                push(list, second, k);
            }
        }
        return a;
    }

    // 2K processes: the first K sweep leftwards from the pivot in windows of 2K
    // subdomains, the last K sweep rightwards starting at the pivot.
    const int window = 2 * k_max;
    const int niter = (n / 2 + 1 + window - 1) / window;
    for (int p = 1; p <= window; ++p) {
        auto& list = a.workers.emplace_back();
        for (int k = 1; k <= k_max; ++k) {
            for (int iter = 1; iter <= niter; ++iter) {
                if (p > k_max) {
                    const int i = m + (iter - 1) * window + 2 * (p - k_max - 1);
                    push(list, i, k);
                    push(list, i + 1, k);
                } else {
                    const int i = m - (iter - 1) * window + 2 * (p - k_max - 1) + 1;
                    push(list, i, k);
                    push(list, i - 1, k);
                }
            }
        }
    }
    return a;
}

Assignment dnwr_pipeline_assignment(int subdomains, int iterates, int blocks) {
    require_positive(subdomains, iterates, blocks);
    Assignment a;
    for (int s = 0; s < subdomains; ++s) {
        for (int k = 1; k <= iterates; ++k) {
            auto& list = a.workers.emplace_back();
            for (int j = 0; j < blocks; ++j) {
                list.push_back({s, k, Stage::Solve, j});
            }
        }
    }
    return a;
}

}  // namespace wrpipe
