#include "ald/station/closed_loop.hpp"

#include <cmath>

#include "ald/sim/camera.hpp"

namespace ald::station {

using control::SafetyAction;
using control::SideEffect;

ClosedLoop::ClosedLoop(sim::SimWorld world, control::ControlState initial,
                       ClosedLoopOptions options)
    : world_(std::move(world)),
      state_(initial),
      options_(std::move(options)),
      detector_(options_.detector) {
  options_.params.validate();
  if (options_.substeps <= 0 || options_.substep_dt <= 0.0) {
    throw std::invalid_argument("closed loop needs positive substeps and dt");
  }
}

control::Perception ClosedLoop::perceive(const control::ControlState& state,
                                         const std::optional<control::GestureLabel>& gesture) const {
  control::Perception p;
  if (!world_.streaming || world_.shutdown) return p;
  p.frame_present = true;
  if (!state.cv_mode()) return p;

  const vision::Frame frame = sim::render_camera(world_);
  if (state.followme) {
    const auto found = detector_(frame);
    p.eyes = vision::best_candidate(found);
  }
  if (state.findfaces) {
    p.faces = static_cast<int>(vision::detect_reduced(detector_, frame, options_.face_factor).size());
  }
  if (state.gestures) p.gesture = gesture;
  return p;
}

void ClosedLoop::apply(const control::TickResult& result) {
  if (result.safety) {
    switch (*result.safety) {
      case SafetyAction::Emergency: sim::emergency(world_); break;
      case SafetyAction::Land: sim::land(world_); break;
      case SafetyAction::Takeoff: sim::takeoff(world_); break;
    }
  }
  for (auto effect : result.effects) {
    if (world_.shutdown) break;
    if (effect == SideEffect::StreamOn) world_.streaming = true;
    if (effect == SideEffect::StreamOff) world_.streaming = false;
  }
}

LoopTick ClosedLoop::tick(const control::KeyState& keys,
                          std::optional<control::GestureLabel> gesture) {
  LoopTick out;
  out.tick = ticks_;
  out.t = world_.time;

  // Toggles and safety do not depend on perception, so a first pass tells us
  // which modes are on (and whether the stream was just switched on) before
  // the frame is examined. control_tick is pure, so running it twice is safe.
  const auto modes = control::control_tick(keys, {}, state_, options_.params);
  apply(modes);
  out.perception = perceive(modes.state, gesture);
  out.result = control::control_tick(keys, out.perception, state_, options_.params);
  state_ = out.result.state;

  if (recorder_) {
    recorder_->record_input({out.tick, keys, out.perception});
    const auto t_ms = std::llround(out.t * 1000.0);
    for (auto& text : commands_for(out.result)) recorder_->record_command({out.tick, t_ms, text});
  }

  for (int i = 0; i < options_.substeps; ++i) {
    if (recorder_) {
      if (!world_.streaming) {
        recorder_->offer_frame(nullptr, world_.time);
      } else if (recorder_->frame_due(world_.time)) {
        recorder_->offer_frame(std::make_shared<const vision::Frame>(sim::render_camera(world_)),
                               world_.time);
      }
    }
    world_ = sim::step(std::move(world_), out.result.command, options_.substep_dt);
  }
  out.telemetry = sim::telemetry_of(world_);
  if (recorder_) recorder_->record_telemetry({out.tick, out.telemetry});
  ++ticks_;
  return out;
}

SessionManifest record_session(ClosedLoop& loop, const std::filesystem::path& dir, double seconds,
                               const control::KeyState& first, RecorderOptions options) {
  options.initial_state = loop.state();
  options.tick_ms = static_cast<int>(std::lround(loop.options().params.tick * 1000.0));
  Recorder recorder(dir, std::move(options));
  loop.attach(&recorder);
  const double tick_seconds = loop.options().substeps * loop.options().substep_dt;
  const auto n = static_cast<std::uint64_t>(std::llround(seconds / tick_seconds));
  for (std::uint64_t i = 0; i < n; ++i) loop.tick(i == 0 ? first : control::KeyState{});
  loop.attach(nullptr);
  return recorder.stop();
}

}  // namespace ald::station
