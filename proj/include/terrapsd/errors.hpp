#pragma once

#include <stdexcept>
#include <string>

namespace terrapsd {

// Data-dependent failures get their own types so callers can react per kind;
// argument/precondition violations use std::invalid_argument.

struct InsufficientData : std::runtime_error {
  explicit InsufficientData(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegeneratePatch : std::runtime_error {
  explicit DegeneratePatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnfittableSpectrum : std::runtime_error {
  explicit UnfittableSpectrum(const std::string& msg) : std::runtime_error(msg) {}
};

struct ContractViolation : std::runtime_error {
  explicit ContractViolation(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace terrapsd
