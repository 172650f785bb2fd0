#pragma once

#include <stdexcept>
#include <string>

namespace hk {

struct HkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : HkError {
  explicit NotPositiveDefinite(const std::string& what) : HkError(what) {}
};

struct StepTooLarge : HkError {
  explicit StepTooLarge(const std::string& what) : HkError(what) {}
};

struct BadParameter : HkError {
  explicit BadParameter(const std::string& what) : HkError(what) {}
};

struct InsufficientSnapshots : HkError {
  explicit InsufficientSnapshots(const std::string& what) : HkError(what) {}
};

struct ZeroVector : HkError {
  explicit ZeroVector(const std::string& what) : HkError(what) {}
};

struct MissingRun : HkError {
  explicit MissingRun(const std::string& what) : HkError(what) {}
};

struct ConfigError : HkError {
  explicit ConfigError(const std::string& what) : HkError(what) {}
};

}  // namespace hk
