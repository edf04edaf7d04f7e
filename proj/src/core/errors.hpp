// Copyright 2026 The gqe-pdpo Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace gqe {

/// Base for every error raised by the core library. The C API maps each
/// subclass onto a distinct status code.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input (bad token, wire collision, bad config).
class InputError : public Error {
  public:
    using Error::Error;
};

/// Non-finite values where finite ones are required; aborts a training run.
class NumericError : public Error {
  public:
    using Error::Error;
};

/// Request exceeds what the implementation supports (e.g. too many qubits).
class CapabilityError : public Error {
  public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
  public:
    using Error::Error;
};

/// No valid preference pair could be formed (fewer than two samples or all
/// energies tied).
class EmptyBatchError : public Error {
  public:
    using Error::Error;
};

} // namespace gqe
