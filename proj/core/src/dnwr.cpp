#include "wrpipe/dnwr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <thread>

#include "wrpipe/assignment.hpp"
#include "wrpipe/engine.hpp"
#include "wrpipe/errors.hpp"

namespace wrpipe::dnwr {

namespace {

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::Naive: return "naive";
        case Mode::ClassicalPacked: return "packed";
        case Mode::Pipeline: return "pipeline";
    }
    return "unknown";
}

BlockResult sweep(const Subdomain& sd,
                  SubdomainState& u,
                  BcKind left_kind,
                  std::span<const double> left,
                  BcKind right_kind,
                  std::span<const double> right,
                  std::size_t block) {
    const std::size_t len = sd.block_len;
    const std::size_t begin = block * len;
    if (u.step != begin) {
        throw ScheduleError("subdomain state is at step " + std::to_string(u.step) + ", block starts at " +
                            std::to_string(begin));
    }
    std::vector<double> left_phys;
    std::vector<double> right_phys;
    if (!sd.has_left_interface()) {
        left_phys = boundary_series(sd.problem->left_value, sd.geom.grid, begin, len);
        left = left_phys;
    }
    if (!sd.has_right_interface()) {
        right_phys = boundary_series(sd.problem->right_value, sd.geom.grid, begin, len);
        right = right_phys;
    }
    if (left.size() != len || right.size() != len) {
        throw ConfigError("boundary series length must equal the block length (" + std::to_string(len) + ")");
    }
    if (BcPattern{left_kind, right_kind} != sd.factor.pattern()) {
        throw ScheduleError("boundary pattern does not match the subdomain's role");
    }
    BlockTraces tr;
    tr.reserve(len);
    BlockResult out;
    out.left_flux_onesided.reserve(len);
    out.right_flux_onesided.reserve(len);
    const double dx = sd.geom.grid.dx;
    for (std::size_t l = 0; l < len; ++l) {
        advance_step(u, sd.factor, sd.geom, left_kind, left[l], right_kind, right[l], sd.problem->forcing,
                     sd.stencil, tr);
        out.left_flux_onesided.push_back(extract_flux(u.u, Side::Left, dx));
        out.right_flux_onesided.push_back(extract_flux(u.u, Side::Right, dx));
    }
    out.left_value = std::move(tr.left_value);
    out.right_value = std::move(tr.right_value);
    out.left_flux = std::move(tr.left_flux);
    out.right_flux = std::move(tr.right_flux);
    return out;
}

std::span<const double> segment(const std::vector<double>& v, std::size_t index, std::size_t len) {
    return std::span<const double>(v).subspan(index * len, len);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) {
        m = std::max(m, std::abs(a[l] - b[l]));
    }
    return m;
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
    if (d.pivot >= d.subdomains) {
        throw ConfigError("pivot must be a subdomain index");
    }
    const BcPattern pattern = s == d.pivot ? kDD : (s < d.pivot ? kDN : kND);
    return Subdomain{s,
                     d.subdomains,
                     d.pivot,
                     subdomain_geometry(p.grid, d, s),
                     assemble_factor(p.grid, d.local_nodes(s), pattern),
                     &p.problem,
                     stencil,
                     d.block_len};
}

BlockResult solve_pivot_block(const Subdomain& sd,
                              SubdomainState& u,
                              std::span<const double> w_left,
                              std::span<const double> w_right,
                              std::size_t block) {
    return sweep(sd, u, BcKind::Dirichlet, w_left, BcKind::Dirichlet, w_right, block);
}

BlockResult solve_left_block(const Subdomain& sd,
                             SubdomainState& u,
                             std::span<const double> w_left,
                             std::span<const double> flux_right,
                             std::size_t block) {
    return sweep(sd, u, BcKind::Dirichlet, w_left, BcKind::Neumann, flux_right, block);
}

BlockResult solve_right_block(const Subdomain& sd,
                              SubdomainState& u,
                              std::span<const double> flux_left,
                              std::span<const double> w_right,
                              std::size_t block) {
    return sweep(sd, u, BcKind::Neumann, flux_left, BcKind::Dirichlet, w_right, block);
}

std::vector<double> update_trace(std::span<const double> w_old,
                                 std::span<const double> u_trace,
                                 double theta,
                                 TraceSide /*side*/) {
    if (w_old.size() != u_trace.size()) {
        throw ConfigError("trace update needs equal-length series");
    }
    std::vector<double> out(w_old.size());
    for (std::size_t l = 0; l < w_old.size(); ++l) {
        out[l] = theta * u_trace[l] + (1.0 - theta) * w_old[l];
    }
    return out;
}

std::size_t trace_holder(std::size_t interface, std::size_t pivot) {
    return interface < pivot ? interface + 1 : interface;
}

std::size_t trace_source(std::size_t interface, std::size_t pivot) {
    return interface < pivot ? interface : interface + 1;
}

int min_pipeline_blocks(int subdomains, int iterates) {
    return (subdomains + 1) / 2 + 2 * iterates;
}

RunReport run(const DecomposedProblem& input, const Config& cfg) {
    cfg.validate();
    const int N = static_cast<int>(input.decomposition.subdomains);
    const int K = cfg.iterates;
    const std::size_t m = input.decomposition.pivot;

    DecomposedProblem p = input;
    Assignment plan;
    switch (cfg.mode) {
        case Mode::Naive:
            p = input.with_blocks(1);
            plan = dnwr_naive_assignment(N, K, 1);
            break;
        case Mode::ClassicalPacked:
            if (m != middle_pivot(input.decomposition.subdomains)) {
                throw ConfigError("packed DNWR requires the middle pivot");
            }
            p = input.with_blocks(1);
            plan = dnwr_packed_assignment(N, K);
            break;
        case Mode::Pipeline: {
            const int J = static_cast<int>(input.decomposition.blocks);
            if (J < min_pipeline_blocks(N, K)) {
                throw ConfigError("pipeline DNWR requires J > ceil(N/2) + 2K - 1 = " +
                                  std::to_string(min_pipeline_blocks(N, K) - 1) + " (J=" + std::to_string(J) + ")");
            }
            plan = dnwr_pipeline_assignment(N, K, J);
            break;
        }
    }
    const ChainDirectory where(plan, N, K);

    const std::size_t steps = p.grid.nt;
    const std::size_t len = p.decomposition.block_len;
    const std::size_t interfaces = p.decomposition.interface_count();
    const std::size_t J = p.decomposition.blocks;
    const TraceSet w0 = initial_traces(p, cfg.guess);

    TraceHistory w_hist(K, interfaces, steps);  // w^k, written by the holder for k < K
    TraceHistory u_hist(K, interfaces, steps);  // source values u^k at each interface
    for (std::size_t q = 0; q < interfaces; ++q) {
        w_hist.write(0, q, 0, w0.values[q]);
    }
    std::vector<InterfaceSample> samples(interfaces);
    for (auto& s : samples) {
        s.left_value.assign(steps, 0.0);
        s.right_value.assign(steps, 0.0);
        s.left_flux.assign(steps, 0.0);
        s.right_flux.assign(steps, 0.0);
    }
    // flags seen at the two outer subdomains, [end][k][j]
    std::vector<std::vector<std::vector<char>>> end_flags(
        2, std::vector<std::vector<char>>(static_cast<std::size_t>(K + 1), std::vector<char>(J, 0)));

    std::vector<Subdomain> subs;
    for (int s = 0; s < N; ++s) {
        subs.push_back(make_subdomain(p, static_cast<std::size_t>(s), cfg.stencil));
    }

    ChannelTransport transport(plan.worker_count(), cfg.transport);

    auto body = [&](std::size_t w, WorkerLog& log) {
        std::map<std::pair<int, int>, SubdomainState> chains;
        const std::vector<double> none(len, 0.0);

        auto send = [&](std::size_t to, MsgKind kind, int s, int receiver, int k, int j, int iface, bool flag,
                        std::vector<double> data) {
            WrMessage msg;
            msg.kind = kind;
            msg.iterate = k;
            msg.block = j;
            msg.interface = iface;
            msg.sender = s;
            msg.receiver = receiver;
            msg.sender_stage = Stage::Solve;
            msg.flag = flag;
            msg.payload = std::move(data);
            transport.send(to, std::move(msg));
        };

        for (const TaskRef& t : plan.workers[w]) {
            const int s = t.sub;
            const int k = t.iterate;
            const int j = t.block;
            const auto& sd = subs[static_cast<std::size_t>(s)];
            const std::size_t begin = p.decomposition.block_begin(static_cast<std::size_t>(j));
            const bool has_l = sd.has_left_interface();
            const bool has_r = sd.has_right_interface();
            // Interfaces this subdomain holds: left one if s <= m, right one if s >= m.
            const bool holds_l = has_l && !sd.right_of_pivot();
            const bool holds_r = has_r && !sd.left_of_pivot();

            // w^(k-1) on the held interfaces.
            std::vector<double> w_left(none);
            std::vector<double> w_right(none);
            bool own_flag = k > 1;
            if (k == 1) {
                if (holds_l) {
                    auto b = std::span<const double>(w0.values[static_cast<std::size_t>(s - 1)]).subspan(begin, len);
                    w_left.assign(b.begin(), b.end());
                }
                if (holds_r) {
                    auto b = std::span<const double>(w0.values[static_cast<std::size_t>(s)]).subspan(begin, len);
                    w_right.assign(b.begin(), b.end());
                }
            } else {
                std::vector<double> prev;
                if (holds_l || holds_r) {
                    prev = transport.recv_match(w, {MsgKind::StateHandoff, k - 1, j, -1, s, Stage::Solve}).payload;
                }
                if (holds_l) {
                    const int q = s - 1;
                    auto m_u = transport.recv_match(w, {MsgKind::DirichletTrace, k - 1, j, q,
                                                        static_cast<int>(trace_source(q, m)), Stage::Solve});
                    w_left = update_trace(segment(prev, 0, len), m_u.payload, cfg.theta, TraceSide::LeftOfPivot);
                    own_flag = own_flag && max_abs_diff(w_left, segment(prev, 0, len)) < cfg.tol;
                }
                if (holds_r) {
                    const int q = s;
                    auto m_u = transport.recv_match(w, {MsgKind::DirichletTrace, k - 1, j, q,
                                                        static_cast<int>(trace_source(q, m)), Stage::Solve});
                    w_right = update_trace(segment(prev, 1, len), m_u.payload, cfg.theta, TraceSide::RightOfPivot);
                    own_flag = own_flag && max_abs_diff(w_right, segment(prev, 1, len)) < cfg.tol;
                }
            }

            std::vector<double> flux_in;
            bool flag = own_flag;
            if (sd.left_of_pivot()) {
                auto msg = transport.recv_match(w, {MsgKind::NeumannFlux, k, j, s, s + 1, Stage::Solve});
                flux_in = std::move(msg.payload);
                flag = flag && msg.flag;
            } else if (sd.right_of_pivot()) {
                auto msg = transport.recv_match(w, {MsgKind::NeumannFlux, k, j, s - 1, s - 1, Stage::Solve});
                flux_in = std::move(msg.payload);
                flag = flag && msg.flag;
            }

            log.begin(s, k, Stage::Solve, j);
            if (holds_l) w_hist.write(k - 1, static_cast<std::size_t>(s - 1), begin, w_left);
            if (holds_r) w_hist.write(k - 1, static_cast<std::size_t>(s), begin, w_right);

            auto it = chains.find({s, k});
            if (it == chains.end()) {
                it = chains.emplace(std::pair{s, k}, initial_state(sd.geom, p.problem.initial)).first;
            }
            BlockResult res;
            if (sd.is_pivot()) {
                res = solve_pivot_block(sd, it->second, w_left, w_right, static_cast<std::size_t>(j));
            } else if (sd.left_of_pivot()) {
                res = solve_left_block(sd, it->second, w_left, flux_in, static_cast<std::size_t>(j));
            } else {
                res = solve_right_block(sd, it->second, flux_in, w_right, static_cast<std::size_t>(j));
            }

            // Fluxes travel outward from the pivot, carrying the convergence flag.
            if (has_l && !sd.right_of_pivot()) {
                send(where.worker_of(s - 1, k, Stage::Solve), MsgKind::NeumannFlux, s, s - 1, k, j, s - 1, flag,
                     res.left_flux);
            }
            if (has_r && !sd.left_of_pivot()) {
                send(where.worker_of(s + 1, k, Stage::Solve), MsgKind::NeumannFlux, s, s + 1, k, j, s, flag,
                     res.right_flux);
            }
            // Source values for the trace update of the neighbouring holder.
            if (sd.left_of_pivot()) {
                u_hist.write(k, static_cast<std::size_t>(s), begin, res.right_value);
                if (k < K) {
                    send(where.worker_of(s + 1, k + 1, Stage::Solve), MsgKind::DirichletTrace, s, s + 1, k, j, s,
                         false, res.right_value);
                }
            } else if (sd.right_of_pivot()) {
                u_hist.write(k, static_cast<std::size_t>(s - 1), begin, res.left_value);
                if (k < K) {
                    send(where.worker_of(s - 1, k + 1, Stage::Solve), MsgKind::DirichletTrace, s, s - 1, k, j, s - 1,
                         false, res.left_value);
                }
            }
            if (k < K && (holds_l || holds_r)) {
                std::vector<double> carry(w_left);
                carry.insert(carry.end(), w_right.begin(), w_right.end());
                WrMessage msg;
                msg.kind = MsgKind::StateHandoff;
                msg.iterate = k;
                msg.block = j;
                msg.sender = s;
                msg.receiver = s;
                msg.sender_stage = Stage::Solve;
                msg.payload = std::move(carry);
                transport.send(where.worker_of(s, k + 1, Stage::Solve), std::move(msg));
            }
            if (s == 0) end_flags[0][static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = flag;
            if (s == N - 1) end_flags[1][static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = flag;

            if (k == K) {
                auto put = [&](std::vector<double>& dst, const std::vector<double>& src) {
                    std::copy(src.begin(), src.end(), dst.begin() + static_cast<std::ptrdiff_t>(begin));
                };
                if (has_l) {
                    auto& smp = samples[static_cast<std::size_t>(s - 1)];
                    put(smp.right_value, res.left_value);
                    put(smp.right_flux, res.left_flux_onesided);
                }
                if (has_r) {
                    auto& smp = samples[static_cast<std::size_t>(s)];
                    put(smp.left_value, res.right_value);
                    put(smp.left_flux, res.right_flux_onesided);
                }
            }
            log.end();
        }
    };

    auto run_result = run_workers(plan.worker_count(), transport, body);

    // w^K never feeds a solve; form it from the recorded source values.
    for (std::size_t q = 0; q < interfaces; ++q) {
        const TraceSide side = q < m ? TraceSide::LeftOfPivot : TraceSide::RightOfPivot;
        w_hist.write(K, q, 0, update_trace(w_hist.series(K - 1, q), u_hist.series(K, q), cfg.theta, side));
    }

    RunReport r;
    r.method = "dnwr";
    r.mode = mode_name(cfg.mode);
    nlohmann::json c;
    c["problem"] = p.problem.name;
    c["L"] = p.grid.length;
    c["T"] = p.grid.horizon;
    c["Nx"] = p.grid.nx;
    c["Nt"] = p.grid.nt;
    c["N"] = N;
    c["J"] = J;
    c["K"] = K;
    c["theta"] = cfg.theta;
    c["tol"] = cfg.tol;
    c["m"] = m + 1;
    c["interfaces"] = p.decomposition.interfaces;
    c["flux_stencil"] = cfg.stencil == FluxStencil::Consistent ? "consistent" : "one_sided";
    r.config = c;
    r.iterations = K;
    r.residuals = residual_history(w_hist, K);
    for (int k = 0; k <= K; ++k) {
        r.history.push_back(w_hist.at(k));
    }
    r.final_traces = w_hist.at(K);
    for (int k = 1; k <= K; ++k) {
        if (interfaces == 0 || r.residuals[static_cast<std::size_t>(k - 1)] < cfg.tol) {
            r.converged = true;
            r.converged_iterate = k;
            break;
        }
    }
    for (int k = 2; k <= K; ++k) {
        bool all = true;
        for (std::size_t j = 0; j < J; ++j) {
            all = all && end_flags[0][static_cast<std::size_t>(k)][j] && end_flags[1][static_cast<std::size_t>(k)][j];
        }
        if (all) {
            r.flag_converged_iterate = k - 1;
            break;
        }
    }
    r.interface_samples = std::move(samples);
    r.messages = transport.counters();
    r.pending_at_shutdown = transport.pending();
    r.message_trace = transport.trace();
    r.workers = plan.worker_count();
    r.hardware_threads = std::thread::hardware_concurrency();
    r.wall_seconds = run_result.wall_seconds;
    r.worker_stats = std::move(run_result.stats);
    r.timeline = std::move(run_result.timeline);
    return r;
}

double efficiency(int subdomains, int iterates, int blocks) {
    if (subdomains < 1 || iterates < 1) {
        throw ConfigError("N and K must be at least 1");
    }
    if (blocks < min_pipeline_blocks(subdomains, iterates)) {
        throw ConfigError("efficiency formula requires J > ceil(N/2) + 2K - 1 = " +
                          std::to_string(min_pipeline_blocks(subdomains, iterates) - 1));
    }
    const double j = blocks;
    return j / (j + subdomains / 2 + 2.0 * (iterates - 1));
}

}  // namespace wrpipe::dnwr
