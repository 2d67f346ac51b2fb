#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ald/control/controller.hpp"
#include "ald/protocol/telemetry.hpp"
#include "ald/vision/box.hpp"
#include "ald/vision/frame.hpp"

namespace ald::station {

// Every message on the websocket, both directions, is one JSON object
// {"seq": n, "kind": k, "payload": p}. Outbound seq is per connection and
// strictly increasing; inbound seq is accepted but not checked.
// docs/bridge-protocol.md has the full schema.

inline constexpr std::string_view kFollowOn = "Follow Me Active";
inline constexpr std::string_view kFollowOff = "Follow Me Inactive";
inline constexpr std::string_view kGestureOn = "Gesture Control Active";
inline constexpr std::string_view kGestureOff = "Gesture Control Inactive";
inline constexpr std::string_view kTempLabel = "Internal Drone Temp:";
inline constexpr std::string_view kFacesLabel = "Faces detected:";
inline constexpr int kOverheatWarning = 90;

/// One decoded inbound message.
struct Inbound {
  std::optional<control::SafetyAction> safety;
  std::optional<control::KeyState> held;  // full held-key snapshot
  std::string pressed;                    // edge keys (subset of "gklfr")
  std::optional<std::string> gesture;     // label text; empty string clears
};

/// Accepts kinds "command" and "mode". Returns nullopt for anything else or
/// a payload that does not fit the schema.
std::optional<Inbound> parse_inbound(std::string_view text);

struct StatusView {
  control::ControlState state;
  std::optional<protocol::Telemetry> telemetry;
  int faces = 0;
  std::vector<vision::BoundingBox> boxes;  // full-resolution overlays
  bool flying = false;
  bool connected = true;
};

nlohmann::json make_status(const StatusView& view);
nlohmann::json telemetry_payload(const protocol::Telemetry& t);

/// {"seq":..,"kind":..,"payload":..} with the payload already serialized.
std::string envelope(std::uint64_t seq, std::string_view kind, std::string_view payload_json);

struct BridgeOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;  // 0 picks a free port
  std::filesystem::path ui_dir;  // static files; empty serves nothing
  double max_frame_rate = 15.0;
};

/// HTTP static files plus a websocket endpoint on one port, served from its
/// own I/O thread. publish_* never block on the network: frames go through a
/// one-slot buffer per client that drops when the client lags; all other
/// messages queue and are always delivered while the client stays connected.
class Bridge {
 public:
  explicit Bridge(BridgeOptions options = {});
  ~Bridge();
  Bridge(const Bridge&) = delete;
  Bridge& operator=(const Bridge&) = delete;

  std::uint16_t port() const noexcept;
  void stop();

  void publish_telemetry(const protocol::Telemetry& t);
  void publish_status(const nlohmann::json& status);
  void publish_command(std::string_view text);
  /// Returns false when the frame was skipped by the rate limit or because
  /// no client is connected.
  bool publish_frame(const vision::Frame& frame, std::uint64_t index);

  /// Called on the I/O thread as soon as an emergency arrives, before the
  /// control tick sees it. The emergency is also delivered through
  /// take_input as key 'p' so the controller logs and repeats it.
  void on_emergency(std::function<void()> handler);

  struct Input {
    control::KeyState keys;
    std::optional<std::string> gesture;
  };
  /// Latest held keys plus every edge key received since the last call.
  Input take_input();

  std::size_t clients() const;
  std::uint64_t frames_dropped() const;
  std::uint64_t inbound_rejected() const;

  class Impl;

 private:
  std::shared_ptr<Impl> impl_;
};

}  // namespace ald::station
