#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace wrpipe {

enum class MsgKind {
    NeumannJumpHalf,  // NNWR: one side's flux at an interface, Dirichlet -> auxiliary stage
    NeumannFlux,      // DNWR: flux handed outward from the pivot
    DirichletTrace,   // NNWR: psi at an interface; DNWR: u at an interface
    ConvergenceFlag,  // empty payload
    StateHandoff,     // same-subdomain carry-over between stage workers
};

enum class Stage { Dirichlet, Auxiliary, Solve, Finalize, Control };

std::string to_string(MsgKind kind);
std::string to_string(Stage stage);

inline constexpr int kCoordinator = -1;

struct WrMessage {
    MsgKind kind = MsgKind::DirichletTrace;
    int iterate = 0;
    int block = 0;
    int interface = -1;
    int sender = kCoordinator;    // subdomain index of the producing task
    int receiver = kCoordinator;  // subdomain index of the consuming task
    Stage sender_stage = Stage::Control;
    bool flag = false;
    std::vector<double> payload;

    [[nodiscard]] bool is_data() const {
        return kind == MsgKind::NeumannJumpHalf || kind == MsgKind::NeumannFlux ||
               kind == MsgKind::DirichletTrace;
    }
};

/// Tag a receiver waits for; sender is optional when the tag is already unique.
struct MatchKey {
    MsgKind kind;
    int iterate;
    int block;
    int interface;
    std::optional<int> sender;
    std::optional<Stage> sender_stage;

    [[nodiscard]] bool matches(const WrMessage& m) const;
    [[nodiscard]] std::string describe() const;
};

struct MsgCounter {
    std::uint64_t data_messages = 0;
    std::uint64_t data_words = 0;
    std::uint64_t flag_messages = 0;
    std::uint64_t handoff_messages = 0;
    std::uint64_t handoff_words = 0;
    std::uint64_t neumann_messages = 0;
    std::uint64_t dirichlet_messages = 0;
};

/// One line of the optional schedule audit.
struct TraceRecord {
    int iterate;
    int block;
    int interface;
    MsgKind kind;
    int sender;
    int receiver;
    std::size_t words;
    Stage sender_stage;
    std::size_t to_endpoint;
};

/// CSV `k,j,i,kind,sender,receiver,words`, sorted for reproducibility. Blocks,
/// interfaces and subdomains are printed 1-based; 0 means none or coordinator.
void write_trace_csv(std::ostream& os, std::vector<TraceRecord> records);

/// Point-to-point tagged message passing between a fixed set of endpoints.
class Transport {
  public:
    virtual ~Transport() = default;

    virtual void send(std::size_t endpoint, WrMessage msg) = 0;
    /// Blocks until a message matching key is available at endpoint.
    virtual WrMessage recv_match(std::size_t endpoint, const MatchKey& key) = 0;
    /// Wakes all receivers; later sends and unmatched receives fail.
    virtual void close() = 0;

    [[nodiscard]] virtual std::size_t endpoints() const = 0;
    [[nodiscard]] virtual MsgCounter counters() const = 0;
    /// Messages sent but not yet received.
    [[nodiscard]] virtual std::size_t pending() const = 0;
    [[nodiscard]] virtual std::vector<TraceRecord> trace() const = 0;
};

struct ChannelOptions {
    std::chrono::milliseconds timeout{60000};
    bool record_trace = false;
    /// Randomized sender-side delay in microseconds, [0, max_delay_us].
    unsigned max_delay_us = 0;
    std::uint64_t seed = 0;
};

/// In-process mailboxes, one per endpoint, each a mutex-guarded FIFO.
class ChannelTransport final : public Transport {
  public:
    explicit ChannelTransport(std::size_t endpoints, ChannelOptions options = {});

    void send(std::size_t endpoint, WrMessage msg) override;
    WrMessage recv_match(std::size_t endpoint, const MatchKey& key) override;
    void close() override;

    [[nodiscard]] std::size_t endpoints() const override { return boxes_.size(); }
    [[nodiscard]] MsgCounter counters() const override;
    [[nodiscard]] std::size_t pending() const override;
    [[nodiscard]] std::vector<TraceRecord> trace() const override;

  private:
    struct Mailbox {
        std::mutex mutex;
        std::condition_variable ready;
        std::deque<WrMessage> queue;
    };

    ChannelOptions options_;
    std::vector<std::unique_ptr<Mailbox>> boxes_;
    std::atomic<bool> closed_{false};

    std::atomic<std::uint64_t> data_messages_{0};
    std::atomic<std::uint64_t> data_words_{0};
    std::atomic<std::uint64_t> flag_messages_{0};
    std::atomic<std::uint64_t> handoff_messages_{0};
    std::atomic<std::uint64_t> handoff_words_{0};
    std::atomic<std::uint64_t> neumann_messages_{0};
    std::atomic<std::uint64_t> dirichlet_messages_{0};

    mutable std::mutex trace_mutex_;
    std::vector<TraceRecord> trace_;

    std::mutex rng_mutex_;
    std::mt19937_64 rng_;
};

}  // namespace wrpipe
