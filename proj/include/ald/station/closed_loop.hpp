#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "ald/control/controller.hpp"
#include "ald/sim/world.hpp"
#include "ald/station/recorder.hpp"
#include "ald/vision/blob_detector.hpp"

namespace ald::station {

struct ClosedLoopOptions {
  int substeps = 5;           // simulator steps per controller tick
  double substep_dt = 0.01;   // s
  control::ControlParams params;
  vision::BlobDetectorParams detector;
  int face_factor = 4;        // face counting runs on the reduced frame
};

struct LoopTick {
  std::uint64_t tick = 0;
  double t = 0.0;  // simulated time at the start of the tick
  control::Perception perception;
  control::TickResult result;
  protocol::Telemetry telemetry;  // after the tick's simulator steps
};

/// Controller and simulator in one thread, no sockets: each tick perceives,
/// runs control_tick, applies its verbs and rc to the world, then steps the
/// simulator for one tick period. Fully deterministic for a given world.
class ClosedLoop {
 public:
  explicit ClosedLoop(sim::SimWorld world, control::ControlState initial = {},
                      ClosedLoopOptions options = {});

  LoopTick tick(const control::KeyState& keys = {},
                std::optional<control::GestureLabel> gesture = std::nullopt);

  /// Frames, telemetry, commands and inputs go to the recorder while attached.
  void attach(Recorder* recorder) noexcept { recorder_ = recorder; }

  const sim::SimWorld& world() const noexcept { return world_; }
  sim::SimWorld& mutable_world() noexcept { return world_; }
  const control::ControlState& state() const noexcept { return state_; }
  std::uint64_t ticks() const noexcept { return ticks_; }
  const ClosedLoopOptions& options() const noexcept { return options_; }

 private:
  control::Perception perceive(const control::ControlState& state,
                               const std::optional<control::GestureLabel>& gesture) const;
  void apply(const control::TickResult& result);

  sim::SimWorld world_;
  control::ControlState state_;
  ClosedLoopOptions options_;
  vision::BlobDetector detector_;
  Recorder* recorder_ = nullptr;
  std::uint64_t ticks_ = 0;
};

/// Runs `loop` for `seconds` with a recorder attached, pressing the keys in
/// `first` on the first tick only. Returns the finalized manifest.
SessionManifest record_session(ClosedLoop& loop, const std::filesystem::path& dir, double seconds,
                               const control::KeyState& first = {}, RecorderOptions options = {});

}  // namespace ald::station
