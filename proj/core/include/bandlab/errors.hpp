// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace bandlab {

// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An ensemble spec, experiment config, or argument violates a documented
// constraint. The message names the constraint that failed. Maps to CLI
// exit code 2.
class SpecError : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed: an iterative solver did not converge within
// its iteration budget, a LAPACK call reported an error, or an input
// contained non-finite entries. Carries the last residual when one is
// meaningful. Maps to CLI exit code 3.
class SolveError : public Error {
 public:
  explicit SolveError(const std::string& what, double residual = 0.0)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// A sample is exactly singular (some singular value is zero), so the log
// potential is undefined for it.
class SingularSampleError : public Error {
 public:
  using Error::Error;
};

// An experiment run aborted as a whole, e.g. more than half of its trials
// failed.
class RunError : public Error {
 public:
  using Error::Error;
};

}  // namespace bandlab
