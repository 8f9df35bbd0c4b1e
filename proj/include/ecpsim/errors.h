// Copyright 2026 The ecpsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace ecpsim {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mode collisions, unknown modes, malformed coefficients.
class InvalidCircuitError : public Error {
 public:
  using Error::Error;
};

/// Zero-norm state where a normalized one is required.
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

/// An element was asked to act on an occupation it does not model.
class UnsupportedConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A homodyne partition does not cover the probe tags present.
class PartitionError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A branch state matched none of the known outcome classes.
class ClassificationError : public Error {
 public:
  using Error::Error;
};

/// Efficiency requested for a product input (zero entanglement).
class UndefinedEfficiencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace ecpsim
