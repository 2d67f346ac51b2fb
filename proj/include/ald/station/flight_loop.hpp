#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "ald/control/controller.hpp"
#include "ald/protocol/client.hpp"
#include "ald/station/bridge.hpp"
#include "ald/station/session.hpp"
#include "ald/vision/blob_detector.hpp"

namespace ald::station {

/// The drone did not answer the initial "command".
class UnreachableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlightOptions {
  protocol::ClientOptions client;
  std::optional<std::filesystem::path> record_dir;  // sessions start recording here
  std::filesystem::path default_record_root = "sessions";
  std::optional<BridgeOptions> bridge;  // nullopt runs headless
  std::uint64_t max_ticks = 0;          // 0 runs until stop is set
  bool takeoff = false;                 // press e on the first tick
  bool follow = false;                  // press k on the first tick
  bool land_on_exit = true;
  control::ControlParams params;
  vision::BlobDetectorParams detector;
};

struct FlightSummary {
  std::uint64_t ticks = 0;
  std::uint64_t rc_sent = 0;
  std::uint64_t commands_ok = 0;
  std::uint64_t commands_failed = 0;  // error or timeout
  std::uint64_t frames_seen = 0;
  control::ControlState final_state;
  std::optional<protocol::Telemetry> last_telemetry;
  std::vector<SessionManifest> sessions;
};

/// The live controller: one tick every params.tick seconds against a drone
/// or simulator endpoint. rc goes out from the tick itself; other verbs are
/// handed to a worker so a slow reply never stalls the loop.
FlightSummary run_flight(const FlightOptions& options, const std::atomic<bool>* stop = nullptr);

}  // namespace ald::station
