// Copyright 2026 The unitax Authors.
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

namespace unitax {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A class with an empty extent, or sets from different universes.
class InvalidClassError : public Error {
 public:
  using Error::Error;
};

/// Input taxonomies that break the flat-taxonomy contract.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent taxonomy / spec files.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix dimensions that do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Inputs for which the requested quantity is undefined (all-zero scores,
/// empty batches, classes without any samples).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss during training.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace unitax
