#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "ald/protocol/client.hpp"

namespace ald::station {

struct ConformanceOptions {
  protocol::Endpoint endpoint;
  std::chrono::milliseconds timeout{3000};
  bool flight = true;  // include takeoff / rc / land
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Protocol checks against a live endpoint. Throws UnreachableError when the
/// first "command" gets no reply at all.
std::vector<CheckResult> run_conformance(const ConformanceOptions& options);

}  // namespace ald::station
