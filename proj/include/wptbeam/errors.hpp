// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef WPTBEAM_ERRORS_HPP_
#define WPTBEAM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace wptbeam {

// Invalid parameter or argument value (bad config, out-of-range input).
class parameter_error : public std::domain_error {
 public:
  explicit parameter_error(const std::string& what) : std::domain_error(what) {}
};

// Vector or matrix dimensions do not agree.
class shape_error : public std::domain_error {
 public:
  explicit shape_error(const std::string& what) : std::domain_error(what) {}
};

// A combination coefficient is too small for the angle-estimation step.
class degenerate_coefficient_error : public std::domain_error {
 public:
  explicit degenerate_coefficient_error(const std::string& what)
      : std::domain_error(what) {}
};

// Both components of an angle estimate are zero; no rotation is defined.
class degenerate_angle_error : public std::domain_error {
 public:
  explicit degenerate_angle_error(const std::string& what)
      : std::domain_error(what) {}
};

// Requested inverse lies outside the invertible range of a model.
class non_invertible_error : public std::domain_error {
 public:
  explicit non_invertible_error(const std::string& what)
      : std::domain_error(what) {}
};

// An iterative numeric routine failed to converge.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// A probe would never complete and no recovery path is enabled.
class timeout_error : public std::runtime_error {
 public:
  explicit timeout_error(const std::string& what) : std::runtime_error(what) {}
};

// Every probe direction timed out; the channel cannot be estimated.
class channel_unreachable_error : public std::runtime_error {
 public:
  explicit channel_unreachable_error(const std::string& what)
      : std::runtime_error(what) {}
};

// A datapath input arrived in a state that does not accept it.
class protocol_error : public std::runtime_error {
 public:
  explicit protocol_error(const std::string& what) : std::runtime_error(what) {}
};

// File could not be read, parsed, or written.
class file_error : public std::runtime_error {
 public:
  explicit file_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wptbeam

#endif  // WPTBEAM_ERRORS_HPP_
