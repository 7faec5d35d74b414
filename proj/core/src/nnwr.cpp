#include "wrpipe/nnwr.hpp"

#include <algorithm>
#include <map>
#include <cmath>
#include <string>
#include <thread>

#include "wrpipe/assignment.hpp"
#include "wrpipe/engine.hpp"
#include "wrpipe/errors.hpp"

namespace wrpipe::nnwr {

namespace {

std::string guess_name(InitialGuess g) {
    switch (g) {
        case InitialGuess::InitialConditionTrace: return "initial_condition_trace";
        case InitialGuess::Zero: return "zero";
        case InitialGuess::Custom: return "custom";
    }
    return "unknown";
}

nlohmann::json config_json(const DecomposedProblem& p, const Config& cfg) {
    nlohmann::json j;
    j["problem"] = p.problem.name;
    j["L"] = p.grid.length;
    j["T"] = p.grid.horizon;
    j["Nx"] = p.grid.nx;
    j["Nt"] = p.grid.nt;
    j["N"] = p.decomposition.subdomains;
    j["J"] = p.decomposition.blocks;
    j["K"] = cfg.iterates;
    j["theta"] = cfg.theta;
    j["tol"] = cfg.tol;
    j["initial_guess"] = guess_name(cfg.guess.kind);
    j["flux_stencil"] = cfg.stencil == FluxStencil::Consistent ? "consistent" : "one_sided";
    j["interfaces"] = p.decomposition.interfaces;
    return j;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) {
        m = std::max(m, std::abs(a[l] - b[l]));
    }
    return m;
}

std::span<const double> segment(const std::vector<double>& v, std::size_t index, std::size_t len) {
    return std::span<const double>(v).subspan(index * len, len);
}

void append(std::vector<double>& dst, std::span<const double> src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

std::span<const double> block_of(const TraceSet& t, std::size_t p, std::size_t begin, std::size_t len) {
    return std::span<const double>(t.values[p]).subspan(begin, len);
}

RunReport single_domain(const DecomposedProblem& p, const Config& cfg, const std::string& mode) {
    RunReport r;
    r.method = "nnwr";
    r.mode = mode;
    r.config = config_json(p, cfg);
    r.converged = true;
    r.converged_iterate = 0;
    r.final_traces = TraceSet::zeros(0, p.grid.nt, 0);
    r.history.push_back(r.final_traces);
    r.workers = 1;
    r.hardware_threads = std::thread::hardware_concurrency();
    return r;
}

// Both subdomains sharing an interface record their own copy of every trace.
// They must agree bit for bit; anything else is a scheduling bug.
void check_copies(const TraceHistory& a, const TraceHistory& b, int last) {
    for (int k = 0; k <= last; ++k) {
        if (!a.at(k).bitwise_equal(b.at(k))) {
            throw ScheduleError("interface trace copies diverged at iterate " + std::to_string(k));
        }
    }
}

void fill_history(RunReport& r, const TraceHistory& h, int last) {
    r.iterations = last;
    r.residuals = residual_history(h, last);
    r.history.clear();
    for (int k = 0; k <= last; ++k) {
        r.history.push_back(h.at(k));
    }
    r.final_traces = h.at(last);
}

}  // namespace

void Config::validate() const {
    if (!(theta > 0.0 && theta <= 1.0)) {
        throw ConfigError("theta must lie in (0, 1]");
    }
    if (iterates < 1) {
        throw ConfigError("K must be at least 1");
    }
    if (!(tol >= 0.0)) {
        throw ConfigError("tol must be non-negative");
    }
}

Subdomain make_subdomain(const DecomposedProblem& p, std::size_t s, FluxStencil stencil) {
    const auto& d = p.decomposition;
    const std::size_t n = d.local_nodes(s);
    const BcPattern aux{s > 0 ? BcKind::Neumann : BcKind::Dirichlet,
                        s + 1 < d.subdomains ? BcKind::Neumann : BcKind::Dirichlet};
    return Subdomain{s,
                     d.subdomains,
                     subdomain_geometry(p.grid, d, s),
                     assemble_factor(p.grid, n, kDD),
                     assemble_factor(p.grid, n, aux),
                     &p.problem,
                     stencil,
                     d.block_len};
}

FluxHalves dirichlet_sweep(const Subdomain& sd,
                           SubdomainState& u,
                           std::span<const double> w_left,
                           std::span<const double> w_right,
                           std::size_t block) {
    const std::size_t len = sd.block_len;
    const std::size_t begin = block * len;
    if (u.step != begin) {
        throw ScheduleError("Dirichlet state is at step " + std::to_string(u.step) + ", block starts at " +
                            std::to_string(begin));
    }
    std::vector<double> left_phys;
    std::vector<double> right_phys;
    if (!sd.has_left_interface()) {
        left_phys = boundary_series(sd.problem->left_value, sd.geom.grid, begin, len);
        w_left = left_phys;
    }
    if (!sd.has_right_interface()) {
        right_phys = boundary_series(sd.problem->right_value, sd.geom.grid, begin, len);
        w_right = right_phys;
    }
    BcSpec bc{{BcKind::Dirichlet, w_left}, {BcKind::Dirichlet, w_right}};
    auto tr = advance_block(u, sd.dirichlet, sd.geom, bc, sd.problem->forcing, len, sd.stencil);
    return {std::move(tr.left_flux), std::move(tr.right_flux)};
}

PsiTraces auxiliary_sweep(const Subdomain& sd,
                          SubdomainState& psi,
                          std::span<const double> jump_left,
                          std::span<const double> jump_right,
                          std::size_t block) {
    const std::size_t len = sd.block_len;
    const std::size_t begin = block * len;
    if (psi.step != begin) {
        throw ScheduleError("auxiliary state is at step " + std::to_string(psi.step) + ", block starts at " +
                            std::to_string(begin));
    }
    const std::vector<double> zeros(len, 0.0);
    const auto pattern = sd.auxiliary.pattern();
    BcSpec bc{{pattern.left, pattern.left == BcKind::Neumann ? jump_left : std::span<const double>(zeros)},
              {pattern.right, pattern.right == BcKind::Neumann ? jump_right : std::span<const double>(zeros)}};
    auto tr = advance_block(psi, sd.auxiliary, sd.geom, bc, Forcing{}, len, sd.stencil);
    return {std::move(tr.left_value), std::move(tr.right_value)};
}

std::vector<double> neumann_jump(std::span<const double> own, std::span<const double> neighbour) {
    if (own.size() != neighbour.size()) {
        throw ConfigError("flux halves differ in length");
    }
    std::vector<double> out(own.size());
    for (std::size_t l = 0; l < own.size(); ++l) {
        out[l] = own[l] - neighbour[l];
    }
    return out;
}

std::vector<double> update_traces(std::span<const double> w_old,
                                  std::span<const double> psi_left_sub,
                                  std::span<const double> psi_right_sub,
                                  double theta) {
    if (psi_left_sub.size() != w_old.size() || psi_right_sub.size() != w_old.size()) {
        throw ConfigError("trace update needs equal-length series");
    }
    std::vector<double> out(w_old.size());
    for (std::size_t l = 0; l < w_old.size(); ++l) {
        out[l] = w_old[l] - theta * (psi_left_sub[l] + psi_right_sub[l]);
    }
    return out;
}

RunReport run_classical(const DecomposedProblem& input, const Config& cfg) {
    cfg.validate();
    const DecomposedProblem p = input.with_blocks(1);
    const int N = static_cast<int>(p.decomposition.subdomains);
    const int K = cfg.iterates;
    if (N == 1) {
        return single_domain(p, cfg, "classical");
    }
    const std::size_t steps = p.grid.nt;
    const std::size_t interfaces = p.decomposition.interface_count();
    const TraceSet w0 = initial_traces(p, cfg.guess);

    TraceHistory left_copy(K, interfaces, steps);   // written by subdomain p
    TraceHistory right_copy(K, interfaces, steps);  // written by subdomain p+1
    std::vector<int> last_update(static_cast<std::size_t>(N), 0);
    int decided_at = 0;

    ChannelTransport transport(static_cast<std::size_t>(N) + 1, cfg.transport);
    const std::size_t coordinator = static_cast<std::size_t>(N);

    auto body = [&](std::size_t w, WorkerLog& log) {
        if (w == coordinator) {
            for (int k = 1; k <= K; ++k) {
                bool all = true;
                for (int s = 0; s < N; ++s) {
                    all = transport.recv_match(w, {MsgKind::ConvergenceFlag, k, 0, -1, s, Stage::Control}).flag &&
                          all;
                }
                for (int s = 0; s < N; ++s) {
                    WrMessage m;
                    m.kind = MsgKind::ConvergenceFlag;
                    m.iterate = k;
                    m.sender = kCoordinator;
                    m.receiver = s;
                    m.flag = all;
                    transport.send(static_cast<std::size_t>(s), std::move(m));
                }
                if (all) {
                    decided_at = k;
                    break;
                }
            }
            return;
        }

        const int s = static_cast<int>(w);
        const auto sd = make_subdomain(p, w, cfg.stencil);
        const bool has_l = sd.has_left_interface();
        const bool has_r = sd.has_right_interface();
        const std::vector<double> none(steps, 0.0);
        std::vector<double> w_left = has_l ? w0.values[w - 1] : none;
        std::vector<double> w_right = has_r ? w0.values[w] : none;
        if (has_l) right_copy.write(0, w - 1, 0, w_left);
        if (has_r) left_copy.write(0, w, 0, w_right);

        auto send = [&](int to, MsgKind kind, int k, int iface, Stage stage, std::vector<double> data) {
            WrMessage m;
            m.kind = kind;
            m.iterate = k;
            m.interface = iface;
            m.sender = s;
            m.receiver = to;
            m.sender_stage = stage;
            m.payload = std::move(data);
            transport.send(static_cast<std::size_t>(to), std::move(m));
        };

        bool converged = false;
        for (int k = 1;; ++k) {
            SubdomainState u = initial_state(sd.geom, p.problem.initial);
            log.begin(s, k, Stage::Dirichlet, 0);
            auto flux = dirichlet_sweep(sd, u, w_left, w_right, 0);
            if (has_l) send(s - 1, MsgKind::NeumannJumpHalf, k, s - 1, Stage::Dirichlet, flux.left);
            if (has_r) send(s + 1, MsgKind::NeumannJumpHalf, k, s, Stage::Dirichlet, flux.right);
            log.end();
            std::vector<double> jump_l;
            std::vector<double> jump_r;
            if (has_l) {
                auto m = transport.recv_match(w, {MsgKind::NeumannJumpHalf, k, 0, s - 1, s - 1, Stage::Dirichlet});
                jump_l = neumann_jump(flux.left, m.payload);
            }
            if (has_r) {
                auto m = transport.recv_match(w, {MsgKind::NeumannJumpHalf, k, 0, s, s + 1, Stage::Dirichlet});
                jump_r = neumann_jump(flux.right, m.payload);
            }
            if (converged) {
                break;
            }

            SubdomainState psi = initial_state(sd.geom, {});
            log.begin(s, k, Stage::Auxiliary, 0);
            auto ps = auxiliary_sweep(sd, psi, jump_l, jump_r, 0);
            if (has_l) send(s - 1, MsgKind::DirichletTrace, k, s - 1, Stage::Auxiliary, ps.left);
            if (has_r) send(s + 1, MsgKind::DirichletTrace, k, s, Stage::Auxiliary, ps.right);
            log.end();

            double local = 0.0;
            if (has_l) {
                auto m = transport.recv_match(w, {MsgKind::DirichletTrace, k, 0, s - 1, s - 1, Stage::Auxiliary});
                auto next = update_traces(w_left, m.payload, ps.left, cfg.theta);
                local = std::max(local, max_abs_diff(next, w_left));
                w_left = std::move(next);
                right_copy.write(k, w - 1, 0, w_left);
            }
            if (has_r) {
                auto m = transport.recv_match(w, {MsgKind::DirichletTrace, k, 0, s, s + 1, Stage::Auxiliary});
                auto next = update_traces(w_right, ps.right, m.payload, cfg.theta);
                local = std::max(local, max_abs_diff(next, w_right));
                w_right = std::move(next);
                left_copy.write(k, w, 0, w_right);
            }
            last_update[w] = k;

            WrMessage flag;
            flag.kind = MsgKind::ConvergenceFlag;
            flag.iterate = k;
            flag.sender = s;
            flag.receiver = kCoordinator;
            flag.flag = local < cfg.tol;
            transport.send(coordinator, std::move(flag));
            converged = transport.recv_match(w, {MsgKind::ConvergenceFlag, k, 0, -1, kCoordinator, Stage::Control}).flag;
            if (k == K) {
                break;
            }
        }
    };

    auto run = run_workers(static_cast<std::size_t>(N) + 1, transport, body);

    const int last = last_update[0];
    check_copies(left_copy, right_copy, last);

    RunReport r;
    r.method = "nnwr";
    r.mode = "classical";
    r.config = config_json(p, cfg);
    fill_history(r, left_copy, last);
    r.converged = decided_at > 0;
    if (r.converged) {
        r.converged_iterate = decided_at;
    }
    r.messages = transport.counters();
    r.pending_at_shutdown = transport.pending();
    r.message_trace = transport.trace();
    r.workers = static_cast<std::size_t>(N);
    r.hardware_threads = std::thread::hardware_concurrency();
    r.wall_seconds = run.wall_seconds;
    r.worker_stats = std::move(run.stats);
    r.worker_stats.pop_back();  // coordinator
    r.timeline = std::move(run.timeline);
    return r;
}

RunReport run_pipeline(const DecomposedProblem& p, const Config& cfg) {
    cfg.validate();
    const int N = static_cast<int>(p.decomposition.subdomains);
    const int K = cfg.iterates;
    const int J = static_cast<int>(p.decomposition.blocks);
    if (N == 1) {
        return single_domain(p, cfg, "pipeline");
    }
    const std::size_t steps = p.grid.nt;
    const std::size_t len = p.decomposition.block_len;
    const std::size_t interfaces = p.decomposition.interface_count();
    const TraceSet w0 = initial_traces(p, cfg.guess);

    const Assignment plan = nnwr_pipeline_assignment(N, K, J, true);
    const ChainDirectory where(plan, N, K);

    TraceHistory left_copy(K, interfaces, steps);
    TraceHistory right_copy(K, interfaces, steps);

    ChannelTransport transport(plan.worker_count(), cfg.transport);

    std::vector<Subdomain> subs;
    subs.reserve(static_cast<std::size_t>(N));
    for (int s = 0; s < N; ++s) {
        subs.push_back(make_subdomain(p, static_cast<std::size_t>(s), cfg.stencil));
    }

    auto body = [&](std::size_t w, WorkerLog& log) {
        // Chain state per (sub, iterate, stage) hosted here; created at block 0.
        std::map<TaskRef, SubdomainState> chains;
        const std::vector<double> none(len, 0.0);

        auto send = [&](std::size_t to, MsgKind kind, int s, int receiver, int k, int j, int iface, Stage stage,
                        std::vector<double> data) {
            WrMessage m;
            m.kind = kind;
            m.iterate = k;
            m.block = j;
            m.interface = iface;
            m.sender = s;
            m.receiver = receiver;
            m.sender_stage = stage;
            m.payload = std::move(data);
            transport.send(to, std::move(m));
        };

        for (const TaskRef& t : plan.workers[w]) {
            const int s = t.sub;
            const int k = t.iterate;
            const int j = t.block;
            const auto& sd = subs[static_cast<std::size_t>(s)];
            const bool has_l = sd.has_left_interface();
            const bool has_r = sd.has_right_interface();
            const std::size_t begin = p.decomposition.block_begin(static_cast<std::size_t>(j));
            const TaskRef chain_key{s, k, t.stage, 0};

            if (t.stage == Stage::Auxiliary) {
                auto hand = transport.recv_match(w, {MsgKind::StateHandoff, k, j, -1, s, Stage::Dirichlet});
                std::vector<double> jump_l;
                std::vector<double> jump_r;
                if (has_l) {
                    auto m = transport.recv_match(w, {MsgKind::NeumannJumpHalf, k, j, s - 1, s - 1, Stage::Dirichlet});
                    jump_l = neumann_jump(segment(hand.payload, 2, len), m.payload);
                }
                if (has_r) {
                    auto m = transport.recv_match(w, {MsgKind::NeumannJumpHalf, k, j, s, s + 1, Stage::Dirichlet});
                    jump_r = neumann_jump(segment(hand.payload, 3, len), m.payload);
                }
                log.begin(s, k, Stage::Auxiliary, j);
                auto it = chains.find(chain_key);
                if (it == chains.end()) {
                    it = chains.emplace(chain_key, initial_state(sd.geom, {})).first;
                }
                auto ps = auxiliary_sweep(sd, it->second, jump_l, jump_r, static_cast<std::size_t>(j));
                const Stage next = k < K ? Stage::Dirichlet : Stage::Finalize;
                if (has_l) {
                    send(where.worker_of(s - 1, k + 1, next), MsgKind::DirichletTrace, s, s - 1, k, j, s - 1,
                         Stage::Auxiliary, ps.left);
                }
                if (has_r) {
                    send(where.worker_of(s + 1, k + 1, next), MsgKind::DirichletTrace, s, s + 1, k, j, s,
                         Stage::Auxiliary, ps.right);
                }
                std::vector<double> carry;
                carry.reserve(4 * len);
                append(carry, segment(hand.payload, 0, len));
                append(carry, segment(hand.payload, 1, len));
                append(carry, has_l ? std::span<const double>(ps.left) : std::span<const double>(none));
                append(carry, has_r ? std::span<const double>(ps.right) : std::span<const double>(none));
                send(where.worker_of(s, k + 1, next), MsgKind::StateHandoff, s, s, k, j, -1, Stage::Auxiliary,
                     std::move(carry));
                log.end();
                continue;
            }

            // Dirichlet stage of iterate k, or Finalize (k = K+1): first form w^(k-1) for this block.
            std::vector<double> w_left;
            std::vector<double> w_right;
            if (k == 1) {
                w_left.assign(none.begin(), none.end());
                w_right.assign(none.begin(), none.end());
                if (has_l) {
                    auto b = block_of(w0, static_cast<std::size_t>(s - 1), begin, len);
                    w_left.assign(b.begin(), b.end());
                }
                if (has_r) {
                    auto b = block_of(w0, static_cast<std::size_t>(s), begin, len);
                    w_right.assign(b.begin(), b.end());
                }
            } else {
                auto hand = transport.recv_match(w, {MsgKind::StateHandoff, k - 1, j, -1, s, Stage::Auxiliary});
                auto wl_old = segment(hand.payload, 0, len);
                auto wr_old = segment(hand.payload, 1, len);
                w_left.assign(wl_old.begin(), wl_old.end());
                w_right.assign(wr_old.begin(), wr_old.end());
                if (has_l) {
                    auto m = transport.recv_match(w, {MsgKind::DirichletTrace, k - 1, j, s - 1, s - 1, Stage::Auxiliary});
                    w_left = update_traces(wl_old, m.payload, segment(hand.payload, 2, len), cfg.theta);
                }
                if (has_r) {
                    auto m = transport.recv_match(w, {MsgKind::DirichletTrace, k - 1, j, s, s + 1, Stage::Auxiliary});
                    w_right = update_traces(wr_old, segment(hand.payload, 3, len), m.payload, cfg.theta);
                }
            }
            log.begin(s, k, t.stage, j);
            if (has_l) right_copy.write(k - 1, static_cast<std::size_t>(s - 1), begin, w_left);
            if (has_r) left_copy.write(k - 1, static_cast<std::size_t>(s), begin, w_right);
            if (t.stage == Stage::Finalize) {
                log.end();
                continue;
            }
            auto it = chains.find(chain_key);
            if (it == chains.end()) {
                it = chains.emplace(chain_key, initial_state(sd.geom, p.problem.initial)).first;
            }
            auto flux = dirichlet_sweep(sd, it->second, w_left, w_right, static_cast<std::size_t>(j));
            if (has_l) {
                send(where.worker_of(s - 1, k, Stage::Auxiliary), MsgKind::NeumannJumpHalf, s, s - 1, k, j, s - 1,
                     Stage::Dirichlet, flux.left);
            }
            if (has_r) {
                send(where.worker_of(s + 1, k, Stage::Auxiliary), MsgKind::NeumannJumpHalf, s, s + 1, k, j, s,
                     Stage::Dirichlet, flux.right);
            }
            std::vector<double> carry;
            carry.reserve(4 * len);
            append(carry, w_left);
            append(carry, w_right);
            append(carry, has_l ? std::span<const double>(flux.left) : std::span<const double>(none));
            append(carry, has_r ? std::span<const double>(flux.right) : std::span<const double>(none));
            send(where.worker_of(s, k, Stage::Auxiliary), MsgKind::StateHandoff, s, s, k, j, -1, Stage::Dirichlet,
                 std::move(carry));
            log.end();
        }
    };

    auto run = run_workers(plan.worker_count(), transport, body);
    check_copies(left_copy, right_copy, K);

    RunReport r;
    r.method = "nnwr";
    r.mode = "pipeline";
    r.config = config_json(p, cfg);
    fill_history(r, left_copy, K);
    for (int k = 1; k <= K; ++k) {
        if (r.residuals[static_cast<std::size_t>(k - 1)] < cfg.tol) {
            r.converged = true;
            r.converged_iterate = k;
            break;
        }
    }
    r.messages = transport.counters();
    r.pending_at_shutdown = transport.pending();
    r.message_trace = transport.trace();
    r.workers = plan.worker_count();
    r.hardware_threads = std::thread::hardware_concurrency();
    r.wall_seconds = run.wall_seconds;
    r.worker_stats = std::move(run.stats);
    r.timeline = std::move(run.timeline);
    return r;
}

double peak_efficiency(int iterates, int blocks) {
    if (iterates < 1 || blocks < 1) {
        throw ConfigError("K and J must be at least 1");
    }
    const double span = 2.0 * iterates + blocks - 1.0;
    return 2 * iterates >= blocks ? 2.0 * iterates / span : blocks / span;
}

}  // namespace wrpipe::nnwr
