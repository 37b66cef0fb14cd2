#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace brw {

/// Base class of every error the library raises deliberately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input. `field` is a path such as "step[2].prob".
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A population grew past the configured particle cap.
class CapExceeded : public Error {
 public:
  CapExceeded(int generation, std::uint64_t population, std::uint64_t cap)
      : Error("particle cap " + std::to_string(cap) + " exceeded at generation " +
              std::to_string(generation) + " (population " + std::to_string(population) + ")"),
        generation_(generation),
        population_(population) {}

  /// Generation whose population broke the cap.
  int generation() const noexcept { return generation_; }
  /// Index of the last snapshot that was completed before the cap was hit.
  int last_completed() const noexcept { return generation_ - 1; }
  std::uint64_t population() const noexcept { return population_; }

 private:
  int generation_;
  std::uint64_t population_;
};

/// A computation refused because it would exceed a resource budget
/// (enumeration size, distance cap, packed window capacity).
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// σ̂ is numerically zero and cannot be used to rescale.
class DegenerateSigma : public Error {
 public:
  using Error::Error;
};

}  // namespace brw
