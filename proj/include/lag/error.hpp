#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lag {

enum class ErrorCode {
  NotASphere,
  NotAPlane,
  DegeneratePencil,
  NotLorentz,
  NotRotation,
  SuperluminalVelocity,
  InvalidElement,
  GridTooSmall,
  NotImmersed,
  UmbilicPoint,
  ParabolicPoint,
  IllConditionedCoframe,
  NotClosed,
  PathDependence,
  NewtonDiverged,
  NotIntegralElement,
  StepFailure,
  IllPosedGrowth,
  RankDeficient,
  ConfigError,
  IoError,
};

const char* error_name(ErrorCode code);

// Process exit code for an error class (gate failures use 1).
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::vector<std::pair<int, int>> nodes = {})
      : std::runtime_error(std::string(error_name(code)) + ": " + what),
        code_(code),
        nodes_(std::move(nodes)) {}

  ErrorCode code() const { return code_; }
  // Offending grid nodes (i, j), when the error is tied to sample locations.
  const std::vector<std::pair<int, int>>& nodes() const { return nodes_; }

 private:
  ErrorCode code_;
  std::vector<std::pair<int, int>> nodes_;
};

}  // namespace lag
