#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ald/protocol/rc_command.hpp"
#include "ald/vision/box.hpp"

namespace ald::control {

using protocol::RcCommand;
using vision::Observation;

/// Mode flags. At most one of followme / gestures / findfaces is set, and any
/// of them being set forces streaming and recording on.
struct ControlState {
  bool followme = false;
  bool gestures = false;
  bool findfaces = false;
  bool streaming = false;
  bool recording = false;
  double prev_offset = 0.0;  // last horizontal eye offset, px
  bool terminate = false;

  bool cv_mode() const noexcept { return followme || gestures || findfaces; }
  friend bool operator==(const ControlState&, const ControlState&) = default;
};

struct ControlParams {
  double kp = 0.4;  // weight on the current horizontal offset
  double kd = 0.4;  // weight on the per-tick change of the offset (not divided by dt)
  std::int64_t area_min = 2800;  // px^2, below: move forward
  std::int64_t area_max = 3000;  // px^2, above: move backward
  int step_speed = 30;
  int key_speed = 75;
  double yaw_divisor = 1.5;
  int clip = 100;
  int image_width = 840;
  int image_height = 720;
  double tick = 0.05;  // s; the gains above are tuned to this period

  /// Throws std::invalid_argument on inconsistent values.
  void validate() const;
};

enum class Gesture { ThumbsUp, ThumbsDown, Fist, Stop, Other };

struct GestureLabel {
  Gesture kind = Gesture::Other;
  std::string text;  // original label text

  static GestureLabel from_text(std::string text);
};

/// Held movement keys plus the edge-triggered command keys seen this tick.
struct KeyState {
  bool right = false, left = false, up = false, down = false;
  bool w = false, s = false, d = false, a = false;
  std::string pressed;  // edge events this tick, subset of "pqegklfr", in arrival order

  bool was_pressed(char key) const noexcept { return pressed.find(key) != std::string::npos; }
};

enum class SafetyAction { Emergency, Land, Takeoff };

enum class SideEffect { StreamOn, StreamOff, CloseDisplay, StartRecorder, StopRecorder };

std::string_view to_string(SafetyAction action) noexcept;
std::string_view to_string(SideEffect effect) noexcept;

struct FollowResult {
  RcCommand command;
  ControlState state;
};

/// Eye-tracking law: yaw from the horizontal offset (proportional plus
/// per-tick difference), fixed-step forward/backward from the box area,
/// fixed-step up/down from the vertical position. Never moves sideways.
FollowResult follow_step(const Observation& obs, const ControlState& state,
                         const ControlParams& params = {});

RcCommand gesture_step(const GestureLabel& gesture);

RcCommand keyboard_step(const KeyState& keys, const ControlParams& params = {});

struct ToggleResult {
  ControlState state;
  std::vector<SideEffect> effects;
};

/// key is one of g (gestures), k (follow me), l (find faces), f (stream),
/// r (record). Other keys leave the state unchanged.
ToggleResult apply_toggle(const ControlState& state, char key);

/// p > q > e.
std::optional<SafetyAction> safety_step(const KeyState& keys);

/// What perception produced for this tick. frame_present is false when no
/// camera frame was available.
struct Perception {
  bool frame_present = false;
  std::optional<Observation> eyes;      // full-resolution best candidate
  std::optional<GestureLabel> gesture;  // symbolic label, if any
  int faces = 0;
};

struct TickResult {
  RcCommand command;
  ControlState state;
  std::optional<SafetyAction> safety;
  std::vector<SideEffect> effects;
  bool camera_override = false;  // command came from a CV mode
};

/// One controller iteration: safety keys, keyboard mixing, toggles, then the
/// active CV mode replaces the keyboard command if it produced a movement.
/// Exactly one rc command per call.
TickResult control_tick(const KeyState& keys, const Perception& perception,
                        const ControlState& state, const ControlParams& params = {});

}  // namespace ald::control
