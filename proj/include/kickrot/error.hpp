// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace kickrot {

// Invalid user input (bad parameter values, malformed configuration).
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// A computation could not be completed with trustworthy numbers.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Population leaked into the artificial upper edge of the J grid.
class TruncationError : public NumericalError {
 public:
  TruncationError(int cycle, double top_population, int j_max);

  [[nodiscard]] int cycle() const noexcept { return cycle_; }
  [[nodiscard]] double top_population() const noexcept { return top_population_; }

 private:
  int cycle_;
  double top_population_;
};

}  // namespace kickrot
