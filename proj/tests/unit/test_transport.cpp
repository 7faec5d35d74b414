#include <chrono>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "wrpipe/errors.hpp"
#include "wrpipe/transport.hpp"

using namespace wrpipe;
using namespace std::chrono_literals;

namespace {

WrMessage make(MsgKind kind, int k, int j, int iface, int sender, std::vector<double> payload = {}) {
    WrMessage m;
    m.kind = kind;
    m.iterate = k;
    m.block = j;
    m.interface = iface;
    m.sender = sender;
    m.payload = std::move(payload);
    return m;
}

}  // namespace

TEST(ChannelTransport, MatchesByTagNotArrivalOrder) {
    ChannelTransport t(2);
    t.send(1, make(MsgKind::DirichletTrace, 2, 0, 0, 0, {2.0}));
    t.send(1, make(MsgKind::DirichletTrace, 1, 0, 0, 0, {1.0}));
    auto first = t.recv_match(1, {MsgKind::DirichletTrace, 1, 0, 0, 0, std::nullopt});
    EXPECT_EQ(first.payload, std::vector<double>{1.0});
    auto second = t.recv_match(1, {MsgKind::DirichletTrace, 2, 0, 0, std::nullopt, std::nullopt});
    EXPECT_EQ(second.payload, std::vector<double>{2.0});
    EXPECT_EQ(t.pending(), 0u);
}

TEST(ChannelTransport, FlagHasEmptyPayload) {
    ChannelTransport t(1);
    auto m = make(MsgKind::ConvergenceFlag, 3, 0, -1, 0);
    m.flag = true;
    t.send(0, m);
    auto got = t.recv_match(0, {MsgKind::ConvergenceFlag, 3, 0, -1, 0, std::nullopt});
    EXPECT_TRUE(got.flag);
    EXPECT_TRUE(got.payload.empty());
    EXPECT_EQ(t.counters().flag_messages, 1u);
    EXPECT_EQ(t.counters().data_messages, 0u);
}

TEST(ChannelTransport, CountersSeparateKinds) {
    ChannelTransport t(1);
    t.send(0, make(MsgKind::NeumannJumpHalf, 1, 0, 0, 0, {1, 2, 3}));
    t.send(0, make(MsgKind::DirichletTrace, 1, 0, 0, 0, {1, 2}));
    t.send(0, make(MsgKind::NeumannFlux, 1, 0, 0, 0, {1}));
    t.send(0, make(MsgKind::StateHandoff, 1, 0, -1, 0, {1, 2, 3, 4}));
    const auto c = t.counters();
    EXPECT_EQ(c.data_messages, 3u);
    EXPECT_EQ(c.data_words, 6u);
    EXPECT_EQ(c.neumann_messages, 2u);
    EXPECT_EQ(c.dirichlet_messages, 1u);
    EXPECT_EQ(c.handoff_messages, 1u);
    EXPECT_EQ(c.handoff_words, 4u);
    EXPECT_EQ(t.pending(), 4u);
}

TEST(ChannelTransport, SenderStageDisambiguates) {
    ChannelTransport t(1);
    auto a = make(MsgKind::StateHandoff, 1, 0, -1, 0, {1.0});
    a.sender_stage = Stage::Dirichlet;
    auto b = make(MsgKind::StateHandoff, 1, 0, -1, 0, {2.0});
    b.sender_stage = Stage::Auxiliary;
    t.send(0, a);
    t.send(0, b);
    EXPECT_EQ(t.recv_match(0, {MsgKind::StateHandoff, 1, 0, -1, 0, Stage::Auxiliary}).payload[0], 2.0);
    EXPECT_EQ(t.recv_match(0, {MsgKind::StateHandoff, 1, 0, -1, 0, Stage::Dirichlet}).payload[0], 1.0);
}

TEST(ChannelTransport, TimeoutReportsDeadlock) {
    ChannelOptions o;
    o.timeout = 20ms;
    ChannelTransport t(1, o);
    try {
        t.recv_match(0, {MsgKind::DirichletTrace, 1, 0, 0, 1, std::nullopt});
        FAIL();
    } catch (const TransportError& e) {
        EXPECT_NE(std::string(e.what()).find("deadlock"), std::string::npos);
    }
}

TEST(ChannelTransport, CloseWakesReceivers) {
    ChannelTransport t(1);
    std::thread closer([&] {
        std::this_thread::sleep_for(10ms);
        t.close();
    });
    EXPECT_THROW(t.recv_match(0, {MsgKind::DirichletTrace, 1, 0, 0, 1, std::nullopt}), TransportError);
    closer.join();
    EXPECT_THROW(t.send(0, make(MsgKind::DirichletTrace, 1, 0, 0, 0)), TransportError);
}

TEST(ChannelTransport, UnknownEndpoint) {
    ChannelTransport t(1);
    EXPECT_THROW(t.send(3, make(MsgKind::DirichletTrace, 1, 0, 0, 0)), TransportError);
}

TEST(ChannelTransport, BlockingReceiveAcrossThreads) {
    ChannelOptions o;
    o.max_delay_us = 200;
    o.seed = 7;
    ChannelTransport t(2, o);
    std::thread producer([&] {
        for (int k = 1; k <= 50; ++k) {
            t.send(1, make(MsgKind::DirichletTrace, k, 0, 0, 0, {static_cast<double>(k)}));
        }
    });
    for (int k = 50; k >= 1; --k) {
        EXPECT_EQ(t.recv_match(1, {MsgKind::DirichletTrace, k, 0, 0, 0, std::nullopt}).payload[0], k);
    }
    producer.join();
}

TEST(ChannelTransport, TraceRecordsAndSorts) {
    ChannelOptions o;
    o.record_trace = true;
    ChannelTransport t(2, o);
    t.send(1, make(MsgKind::DirichletTrace, 2, 0, 0, 0, {1, 2}));
    t.send(0, make(MsgKind::NeumannJumpHalf, 1, 1, 0, 1, {1, 2}));
    ASSERT_EQ(t.trace().size(), 2u);
    std::ostringstream os;
    write_trace_csv(os, t.trace());
    EXPECT_EQ(os.str(),
              "k,j,i,kind,sender,receiver,words\n"
              "1,2,1,NeumannJumpHalf,2,0,2\n"
              "2,1,1,DirichletTrace,1,0,2\n");
}

TEST(MatchKey, Describe) {
    MatchKey k{MsgKind::NeumannFlux, 2, 3, 1, 4, Stage::Solve};
    EXPECT_EQ(k.describe(), "(kind=NeumannFlux, k=2, j=3, i=1, sender=4, stage=Solve)");
}
