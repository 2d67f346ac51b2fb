#include "ald/control/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ald::control {

void ControlParams::validate() const {
  if (area_min >= area_max) throw std::invalid_argument("area range must satisfy min < max");
  if (clip <= 0 || clip > protocol::kRcMax) throw std::invalid_argument("clip must be in (0, 100]");
  if (std::abs(step_speed) > clip || std::abs(key_speed) > clip) {
    throw std::invalid_argument("speeds must lie within the clip range");
  }
  if (yaw_divisor < 1.0) throw std::invalid_argument("yaw divisor below 1 can exceed the rc range");
  if (image_width <= 0 || image_height <= 0) throw std::invalid_argument("bad image size");
  if (tick <= 0.0) throw std::invalid_argument("tick must be positive");
}

GestureLabel GestureLabel::from_text(std::string text) {
  Gesture kind = Gesture::Other;
  if (text == "thumbs up") kind = Gesture::ThumbsUp;
  else if (text == "thumbs down") kind = Gesture::ThumbsDown;
  else if (text == "fist") kind = Gesture::Fist;
  else if (text == "stop") kind = Gesture::Stop;
  return {kind, std::move(text)};
}

std::string_view to_string(SafetyAction action) noexcept {
  switch (action) {
    case SafetyAction::Emergency: return "emergency";
    case SafetyAction::Land: return "land";
    case SafetyAction::Takeoff: return "takeoff";
  }
  return "";
}

std::string_view to_string(SideEffect effect) noexcept {
  switch (effect) {
    case SideEffect::StreamOn: return "stream-on";
    case SideEffect::StreamOff: return "stream-off";
    case SideEffect::CloseDisplay: return "close-display";
    case SideEffect::StartRecorder: return "start-recorder";
    case SideEffect::StopRecorder: return "stop-recorder";
  }
  return "";
}

namespace {

// int() of a quotient, toward zero. Quotients within 1e-9 of an integer are
// taken as that integer so that binary rounding in kp*x + kd*dx cannot move
// an exact result such as -12 / 1.5 = -8 to -7.
int truncate_toward_zero(double q) {
  const double nearest = std::round(q);
  if (std::abs(q - nearest) < 1e-9) return static_cast<int>(nearest);
  return static_cast<int>(std::trunc(q));
}

void ensure_camera(ControlState& s, std::vector<SideEffect>& effects) {
  if (!s.cv_mode()) return;
  if (!s.streaming) {
    s.streaming = true;
    effects.push_back(SideEffect::StreamOn);
  }
  if (!s.recording) {
    s.recording = true;
    effects.push_back(SideEffect::StartRecorder);
  }
}

}  // namespace

FollowResult follow_step(const Observation& obs, const ControlState& state,
                         const ControlParams& params) {
  FollowResult out{{}, state};
  const double width = params.image_width;
  const double height = params.image_height;

  double x_offset = 0.0;
  if (obs.cx > 0) {
    x_offset = obs.cx - width / 2.0;
    double yaw = params.kp * x_offset + params.kd * (x_offset - state.prev_offset);
    yaw = std::clamp(yaw, -static_cast<double>(params.clip), static_cast<double>(params.clip));
    out.command.yaw = truncate_toward_zero(yaw / params.yaw_divisor);
  }

  if (obs.area > 0 && obs.area < params.area_min) {
    out.command.forward = params.step_speed;  // too far
  } else if (obs.area > params.area_max) {
    out.command.forward = -params.step_speed;  // too close
  }

  if (obs.cy > 0 && obs.cy < height / 3.0) {
    out.command.upward = params.step_speed;  // target high in the frame
  } else if (obs.cy > height / 2.0) {
    out.command.upward = -params.step_speed;
  }

  out.state.prev_offset = x_offset;
  return out;
}

RcCommand gesture_step(const GestureLabel& gesture) {
  switch (gesture.kind) {
    case Gesture::ThumbsUp: return {0, 0, 50, 0};
    case Gesture::ThumbsDown: return {0, 0, -50, 0};
    case Gesture::Fist: return {0, 50, 0, 0};
    case Gesture::Stop: return {0, -50, 0, 0};
    case Gesture::Other: break;
  }
  return {};
}

RcCommand keyboard_step(const KeyState& keys, const ControlParams& params) {
  const int v = params.key_speed;
  RcCommand cmd;
  if (keys.right) cmd.right += v;
  if (keys.left) cmd.right -= v;
  if (keys.up) cmd.forward += v;
  if (keys.down) cmd.forward -= v;
  if (keys.w) cmd.upward += v;
  if (keys.s) cmd.upward -= v;
  if (keys.d) cmd.yaw += v;
  if (keys.a) cmd.yaw -= v;
  return cmd;
}

ToggleResult apply_toggle(const ControlState& state, char key) {
  ToggleResult out{state, {}};
  auto& s = out.state;
  switch (key) {
    case 'g':
      s.gestures = !s.gestures;
      s.followme = s.findfaces = false;
      break;
    case 'k':
      s.followme = !s.followme;
      s.gestures = s.findfaces = false;
      break;
    case 'l':
      s.findfaces = !s.findfaces;
      s.gestures = s.followme = false;
      break;
    case 'f':
      s.streaming = !s.streaming;
      if (s.streaming) {
        out.effects.push_back(SideEffect::StreamOn);
      } else {
        out.effects.push_back(SideEffect::StreamOff);
        out.effects.push_back(SideEffect::CloseDisplay);
      }
      break;
    case 'r':
      if (s.recording) {
        s.recording = s.streaming = false;
        out.effects.push_back(SideEffect::StreamOff);
        out.effects.push_back(SideEffect::StopRecorder);
      } else {
        s.recording = s.streaming = true;
        out.effects.push_back(SideEffect::StreamOn);
        out.effects.push_back(SideEffect::StartRecorder);
      }
      break;
    default:
      return out;
  }
  ensure_camera(s, out.effects);
  return out;
}

std::optional<SafetyAction> safety_step(const KeyState& keys) {
  if (keys.was_pressed('p')) return SafetyAction::Emergency;
  if (keys.was_pressed('q')) return SafetyAction::Land;
  if (keys.was_pressed('e')) return SafetyAction::Takeoff;
  return std::nullopt;
}

TickResult control_tick(const KeyState& keys, const Perception& perception,
                        const ControlState& state, const ControlParams& params) {
  TickResult out;
  out.state = state;
  out.safety = safety_step(keys);
  RcCommand command = keyboard_step(keys, params);

  for (char key : std::string_view("gklfr")) {
    if (!keys.was_pressed(key)) continue;
    auto toggled = apply_toggle(out.state, key);
    out.state = toggled.state;
    out.effects.insert(out.effects.end(), toggled.effects.begin(), toggled.effects.end());
  }
  ensure_camera(out.state, out.effects);

  if (out.state.streaming && perception.frame_present) {
    std::optional<RcCommand> movement;
    if (out.state.gestures) {
      movement = gesture_step(perception.gesture.value_or(GestureLabel{}));
    }
    if (out.state.followme) {
      const auto follow = follow_step(perception.eyes.value_or(Observation{}), out.state, params);
      movement = follow.command;
      out.state.prev_offset = follow.state.prev_offset;
    }
    if (movement) {
      command = *movement;
      out.camera_override = true;
    }
  }
  out.command = command;
  return out;
}

}  // namespace ald::control
