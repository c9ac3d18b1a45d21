// Copyright 2026 The qldp Authors
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

namespace qldp {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, domain violations, unparsable files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A requested object would exceed the configured total-dimension cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A privacy charge would push a register ledger past its budget.
class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

/// A measurement failed the oracle's triviality verification.
class NotTrivialEnoughError : public Error {
 public:
  using Error::Error;
};

/// The rejection sampler gave up before accepting an outcome.
class MaxIterationsExceededError : public Error {
 public:
  using Error::Error;
};

/// Fewer state copies were supplied than the protocol requires.
class InsufficientCopiesError : public Error {
 public:
  using Error::Error;
};

}  // namespace qldp
