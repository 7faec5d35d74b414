#include "wrpipe/transport.hpp"

#include <algorithm>
#include <sstream>
#include <thread>
#include <tuple>

#include "wrpipe/errors.hpp"

namespace wrpipe {

std::string to_string(MsgKind kind) {
    switch (kind) {
        case MsgKind::NeumannJumpHalf: return "NeumannJumpHalf";
        case MsgKind::NeumannFlux: return "NeumannFlux";
        case MsgKind::DirichletTrace: return "DirichletTrace";
        case MsgKind::ConvergenceFlag: return "ConvergenceFlag";
        case MsgKind::StateHandoff: return "StateHandoff";
    }
    return "Unknown";
}

std::string to_string(Stage stage) {
    switch (stage) {
        case Stage::Dirichlet: return "Dirichlet";
        case Stage::Auxiliary: return "Auxiliary";
        case Stage::Solve: return "Solve";
        case Stage::Finalize: return "Finalize";
        case Stage::Control: return "Control";
    }
    return "Unknown";
}

bool MatchKey::matches(const WrMessage& m) const {
    return m.kind == kind && m.iterate == iterate && m.block == block && m.interface == interface &&
           (!sender || *sender == m.sender) && (!sender_stage || *sender_stage == m.sender_stage);
}

std::string MatchKey::describe() const {
    std::ostringstream os;
    os << "(kind=" << to_string(kind) << ", k=" << iterate << ", j=" << block << ", i=" << interface;
    if (sender) {
        os << ", sender=" << *sender;
    }
    if (sender_stage) {
        os << ", stage=" << to_string(*sender_stage);
    }
    os << ")";
    return os.str();
}

void write_trace_csv(std::ostream& os, std::vector<TraceRecord> records) {
    std::sort(records.begin(), records.end(), [](const TraceRecord& a, const TraceRecord& b) {
        return std::tie(a.iterate, a.block, a.interface, a.kind, a.sender, a.receiver, a.sender_stage) <
               std::tie(b.iterate, b.block, b.interface, b.kind, b.sender, b.receiver, b.sender_stage);
    });
    // 1-based i, j and subdomains; 0 stands for "none" (no interface, coordinator)
    os << "k,j,i,kind,sender,receiver,words\n";
    for (const auto& r : records) {
        os << r.iterate << ',' << (r.block + 1) << ',' << (r.interface + 1) << ',' << to_string(r.kind) << ','
           << (r.sender + 1) << ',' << (r.receiver + 1) << ',' << r.words << '\n';
    }
}

ChannelTransport::ChannelTransport(std::size_t endpoints, ChannelOptions options)
    : options_(options), rng_(options.seed) {
    boxes_.reserve(endpoints);
    for (std::size_t e = 0; e < endpoints; ++e) {
        boxes_.push_back(std::make_unique<Mailbox>());
    }
}

void ChannelTransport::send(std::size_t endpoint, WrMessage msg) {
    if (endpoint >= boxes_.size()) {
        throw TransportError("send to unknown endpoint " + std::to_string(endpoint));
    }
    if (closed_.load()) {
        throw TransportError("send on closed transport: " + to_string(msg.kind) + " k=" +
                             std::to_string(msg.iterate) + " j=" + std::to_string(msg.block));
    }
    if (options_.max_delay_us > 0) {
        unsigned delay = 0;
        {
            std::lock_guard lock(rng_mutex_);
            delay = std::uniform_int_distribution<unsigned>(0, options_.max_delay_us)(rng_);
        }
        std::this_thread::sleep_for(std::chrono::microseconds(delay));
    }

    const std::size_t words = msg.payload.size();
    switch (msg.kind) {
        case MsgKind::ConvergenceFlag:
            ++flag_messages_;
            break;
        case MsgKind::StateHandoff:
            ++handoff_messages_;
            handoff_words_ += words;
            break;
        default:
            ++data_messages_;
            data_words_ += words;
            if (msg.kind == MsgKind::DirichletTrace) {
                ++dirichlet_messages_;
            } else {
                ++neumann_messages_;
            }
    }
    if (options_.record_trace) {
        std::lock_guard lock(trace_mutex_);
        trace_.push_back({msg.iterate, msg.block, msg.interface, msg.kind, msg.sender, msg.receiver, words,
                          msg.sender_stage, endpoint});
    }

    auto& box = *boxes_[endpoint];
    {
        std::lock_guard lock(box.mutex);
        box.queue.push_back(std::move(msg));
    }
    box.ready.notify_all();
}

WrMessage ChannelTransport::recv_match(std::size_t endpoint, const MatchKey& key) {
    if (endpoint >= boxes_.size()) {
        throw TransportError("receive on unknown endpoint " + std::to_string(endpoint));
    }
    auto& box = *boxes_[endpoint];
    std::unique_lock lock(box.mutex);
    auto found = box.queue.end();
    const bool ok = box.ready.wait_for(lock, options_.timeout, [&] {
        found = std::find_if(box.queue.begin(), box.queue.end(),
                             [&](const WrMessage& m) { return key.matches(m); });
        return found != box.queue.end() || closed_.load();
    });
    if (found == box.queue.end()) {
        if (!ok) {
            throw TransportError("deadlock: endpoint " + std::to_string(endpoint) +
                                 " timed out waiting for " + key.describe());
        }
        throw TransportError("transport closed while endpoint " + std::to_string(endpoint) +
                             " waited for " + key.describe());
    }
    WrMessage msg = std::move(*found);
    box.queue.erase(found);
    return msg;
}

void ChannelTransport::close() {
    closed_.store(true);
    for (auto& box : boxes_) {
        { std::lock_guard lock(box->mutex); }
        box->ready.notify_all();
    }
}

MsgCounter ChannelTransport::counters() const {
    MsgCounter c;
    c.data_messages = data_messages_.load();
    c.data_words = data_words_.load();
    c.flag_messages = flag_messages_.load();
    c.handoff_messages = handoff_messages_.load();
    c.handoff_words = handoff_words_.load();
    c.neumann_messages = neumann_messages_.load();
    c.dirichlet_messages = dirichlet_messages_.load();
    return c;
}

std::size_t ChannelTransport::pending() const {
    std::size_t n = 0;
    for (const auto& box : boxes_) {
        std::lock_guard lock(box->mutex);
        n += box->queue.size();
    }
    return n;
}

std::vector<TraceRecord> ChannelTransport::trace() const {
    std::lock_guard lock(trace_mutex_);
    return trace_;
}

}  // namespace wrpipe
