// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qpkick {

/// Invalid user-supplied configuration or arguments. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A backend would exceed its memory budget. Maps to CLI exit code 3.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string &what, std::size_t required_bytes)
      : std::runtime_error(what), required_bytes_(required_bytes) {}
  std::size_t required_bytes() const { return required_bytes_; }

 private:
  std::size_t required_bytes_;
};

/// A numerical invariant (norm, spectrum) drifted beyond tolerance. Exit code 4.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qpkick
