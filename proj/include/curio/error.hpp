#pragma once

#include <stdexcept>
#include <string>

namespace curio {

/// Error raised by loaders, trainers and the pipeline. The message names the
/// offending file/line or resource where one exists.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pipeline stage failure; carries the stage name so callers can report which
/// part of a run aborted.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("stage '" + stage + "': " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace curio
