#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace anchorcls {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or bad user input. Maps to CLI exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed data files (datasets, descriptions, stores).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Failure inside a model backend.
class BackendError : public Error {
 public:
  explicit BackendError(const std::string& msg, bool retryable = false)
      : Error(msg), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

/// A pipeline stage failed; carries the stage name and task seed. Maps to CLI exit code 2.
class StageError : public Error {
 public:
  StageError(const std::string& stage, std::uint64_t task_seed, const std::string& msg)
      : Error("stage '" + stage + "' failed (task seed " + std::to_string(task_seed) + "): " + msg),
        stage_(stage),
        task_seed_(task_seed) {}
  const std::string& stage() const { return stage_; }
  std::uint64_t task_seed() const { return task_seed_; }

 private:
  std::string stage_;
  std::uint64_t task_seed_;
};

}  // namespace anchorcls
