#include <gtest/gtest.h>

#include <random>

#include "ald/protocol/client.hpp"
#include "ald/protocol/commands.hpp"
#include "ald/protocol/rc_command.hpp"
#include "ald/protocol/telemetry.hpp"
#include "support.hpp"

using namespace ald::protocol;

TEST(EncodeRc, Hover) { EXPECT_EQ(encode_rc({0, 0, 0, 0}), "rc 0 0 0 0"); }

TEST(EncodeRc, FollowExample) { EXPECT_EQ(encode_rc({0, 30, 30, 66}), "rc 0 30 30 66"); }

TEST(EncodeRc, NegativeAndBounds) {
  EXPECT_EQ(encode_rc({-100, 100, -1, 0}), "rc -100 100 -1 0");
}

TEST(EncodeRc, RangeErrorNamesField) {
  try {
    encode_rc({0, 0, 0, 150});
    FAIL() << "expected RangeError";
  } catch (const RangeError& e) {
    EXPECT_EQ(e.field(), "yaw");
    EXPECT_EQ(e.value(), 150);
  }
  try {
    encode_rc({-101, 0, 0, 0});
    FAIL() << "expected RangeError";
  } catch (const RangeError& e) {
    EXPECT_EQ(e.field(), "right");
  }
}

TEST(ParseRc, RoundTripProperty) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> axis(kRcMin, kRcMax);
  for (int i = 0; i < 2000; ++i) {
    const RcCommand c{axis(rng), axis(rng), axis(rng), axis(rng)};
    EXPECT_EQ(parse_rc(encode_rc(c)), c);
  }
}

TEST(ParseRc, RejectsBadGrammar) {
  for (const char* bad : {"rc 0 0 0", "rc 0 0 0 0 0", "rc  0 0 0 0", "rc 0 0 0 0 ", "rc a 0 0 0",
                          "RC 0 0 0 0", "rc 0 0 0 +1", "rc 0 0 0 1.5", ""}) {
    EXPECT_THROW(parse_rc(bad), std::invalid_argument) << bad;
    EXPECT_FALSE(is_rc_text(bad) && parse_command(bad).has_value()) << bad;
  }
  EXPECT_THROW(parse_rc("rc 0 0 101 0"), RangeError);
}

TEST(EncodeSimple, Verbatim) {
  EXPECT_EQ(encode_simple(Verb::Takeoff), "takeoff");
  EXPECT_EQ(encode_simple(Verb::Emergency), "emergency");
  EXPECT_EQ(encode_simple(Verb::BatteryQuery), "battery?");
  EXPECT_EQ(encode_simple(Verb::Command), "command");
  EXPECT_EQ(encode_simple(Verb::Land), "land");
  EXPECT_EQ(encode_simple(Verb::StreamOn), "streamon");
  EXPECT_EQ(encode_simple(Verb::StreamOff), "streamoff");
}

TEST(ParseCommand, VerbsAndRc) {
  for (auto v : {Verb::Command, Verb::Takeoff, Verb::Land, Verb::Emergency, Verb::StreamOn,
                 Verb::StreamOff, Verb::BatteryQuery}) {
    auto parsed = parse_command(encode_simple(v));
    ASSERT_TRUE(parsed);
    EXPECT_EQ(std::get<Verb>(*parsed), v);
  }
  auto rc = parse_command("rc 1 2 3 4");
  ASSERT_TRUE(rc);
  EXPECT_EQ(std::get<RcCommand>(*rc), (RcCommand{1, 2, 3, 4}));
  EXPECT_FALSE(parse_command("fly"));
  EXPECT_FALSE(parse_command("rc 0 0 0 200"));
}

TEST(CommandOutcome, KindOkIffExactlyOk) {
  EXPECT_EQ(CommandOutcome::classify("takeoff", "ok").kind, CommandOutcome::Kind::Ok);
  EXPECT_EQ(CommandOutcome::classify("takeoff", "error").kind, CommandOutcome::Kind::Error);
  EXPECT_EQ(CommandOutcome::classify("takeoff", "ok ").kind, CommandOutcome::Kind::Error);
  EXPECT_EQ(CommandOutcome::classify("takeoff", "OK").kind, CommandOutcome::Kind::Error);
  const auto bat = CommandOutcome::classify("battery?", "87");
  EXPECT_EQ(bat.kind, CommandOutcome::Kind::Value);
  EXPECT_EQ(bat.raw, "87");
  EXPECT_EQ(CommandOutcome::classify("battery?", "error").kind, CommandOutcome::Kind::Error);
}

TEST(ParseState, Baseline) {
  const auto t = parse_state("pitch:0;roll:0;yaw:0;h:0;bat:100;templ:70;temph:72;time:0;");
  EXPECT_EQ(t, (Telemetry{0, 0, 0, 0, 100, 70, 72, 0}));
}

TEST(ParseState, HandParsedPacket) {
  const auto t = parse_state("pitch:2;roll:-1;yaw:45;h:120;bat:87;templ:88;temph:91;time:33;");
  EXPECT_EQ(t.pitch, 2);
  EXPECT_EQ(t.roll, -1);
  EXPECT_EQ(t.yaw_deg, 45);
  EXPECT_EQ(t.height, 120);
  EXPECT_EQ(t.battery, 87);
  EXPECT_EQ(t.temp_low, 88);
  EXPECT_EQ(t.temp_high, 91);
  EXPECT_EQ(t.flight_time, 33);
}

TEST(ParseState, MalformedPairOffset) {
  try {
    parse_state("pitch;roll:0;");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_LE(e.offset(), 5u);
  }
}

TEST(ParseState, NonIntegerValue) {
  try {
    parse_state("pitch:x;roll:0;yaw:0;h:0;bat:1;templ:1;temph:1;time:0;");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 6u);
  }
  EXPECT_THROW(parse_state("pitch:1.5;roll:0;yaw:0;h:0;bat:1;templ:1;temph:1;time:0;"), ParseError);
}

TEST(ParseState, MissingKey) {
  EXPECT_THROW(parse_state("pitch:0;roll:0;yaw:0;h:0;bat:100;templ:70;temph:72;"), ParseError);
}

TEST(ParseState, UnknownKeysIgnored) {
  const auto t = parse_state(
      "mid:-1;x:0;pitch:0;roll:0;yaw:0;vgx:0;h:10;bat:50;baro:1.23;templ:60;temph:62;time:4;agx:-3.00;\r\n");
  EXPECT_EQ(t.height, 10);
  EXPECT_EQ(t.battery, 50);
  EXPECT_EQ(t.flight_time, 4);
}

TEST(ParseState, FormatRoundTripAndTotality) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> any(-500, 500), pct(0, 100);
  for (int i = 0; i < 500; ++i) {
    Telemetry t{any(rng), any(rng), any(rng), any(rng), pct(rng), 0, 0, std::abs(any(rng))};
    t.temp_low = any(rng);
    t.temp_high = t.temp_low + pct(rng);
    EXPECT_EQ(parse_state(format_state(t)), t);
  }
  // Random garbage never escapes as anything but ParseError.
  std::uniform_int_distribution<int> ch(0, 6);
  const char alphabet[] = {'a', ':', ';', '1', '-', 'h', 'p'};
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    for (int k = 0; k < 30; ++k) s += alphabet[ch(rng)];
    try {
      parse_state(s);
    } catch (const ParseError& e) {
      EXPECT_LE(e.offset(), s.size());
    }
  }
}

TEST(Endpoint, Parse) {
  auto e = Endpoint::parse("127.0.0.1:9000:9001:9002");
  EXPECT_EQ(e.host, "127.0.0.1");
  EXPECT_EQ(e.command_port, 9000);
  EXPECT_EQ(e.state_port, 9001);
  EXPECT_EQ(e.video_port, 9002);
  EXPECT_EQ(Endpoint::parse("drone").command_port, kCommandPort);
  EXPECT_THROW(Endpoint::parse("a:1:2"), std::invalid_argument);
  EXPECT_THROW(Endpoint::parse("a:99999"), std::invalid_argument);
}

namespace {

ClientOptions loopback(std::uint16_t port, int timeout_ms = 500) {
  ClientOptions o;
  o.endpoint.host = "127.0.0.1";
  o.endpoint.command_port = port;
  o.endpoint.state_port = 0;
  o.timeout = std::chrono::milliseconds(timeout_ms);
  return o;
}

}  // namespace

TEST(Client, RcIsFireAndForget) {
  testing_support::FakeDrone drone([](const std::string& s) -> std::optional<std::string> {
    if (is_rc_text(s)) return std::nullopt;
    return "ok";
  });
  Client client(loopback(drone.port()));
  const auto start = std::chrono::steady_clock::now();
  EXPECT_FALSE(client.send_command("rc 0 0 0 0"));
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(50));
  EXPECT_EQ(client.send(Verb::Command).kind, CommandOutcome::Kind::Ok);
}

TEST(Client, TimeoutThenLateReplyIsNotMisattributed) {
  std::atomic<int> n{0};
  testing_support::FakeDrone drone([&](const std::string& s) -> std::optional<std::string> {
    if (s == "takeoff" && n++ == 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(150));
      return "late";
    }
    return "ok";
  });
  Client client(loopback(drone.port(), 100));
  EXPECT_EQ(client.send(Verb::Takeoff).kind, CommandOutcome::Kind::Timeout);
  const auto next = client.send(Verb::Land);
  EXPECT_EQ(next.kind, CommandOutcome::Kind::Ok);
  EXPECT_EQ(next.raw, "ok");
}

TEST(Client, ReceivesTelemetry) {
  const auto state_port = testing_support::free_udp_port();
  auto o = loopback(1, 200);
  o.endpoint.state_port = state_port;
  Client client(o);
  ASSERT_EQ(client.local_state_port(), state_port);
  UdpSocket sender;
  sender.bind(Address::any(0));
  const Telemetry t{1, 2, 3, 40, 90, 60, 62, 5};
  sender.send_to(format_state(t), Address::resolve("127.0.0.1", state_port));
  sender.send_to("garbage", Address::resolve("127.0.0.1", state_port));
  for (int i = 0; i < 100 && (client.telemetry_count() < 1 || client.telemetry_errors() < 1); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ASSERT_TRUE(client.latest_telemetry());
  EXPECT_EQ(*client.latest_telemetry(), t);
  EXPECT_EQ(client.telemetry_errors(), 1u);
}

TEST(UdpSocket, RejectsOversizeSend) {
  UdpSocket s;
  s.bind(Address::any(0));
  EXPECT_THROW(s.send_to(std::string(kMaxDatagram + 1, 'x'), Address::resolve("127.0.0.1", 9)),
               TransportError);
}
