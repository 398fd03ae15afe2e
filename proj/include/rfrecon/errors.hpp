// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The rfrecon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace rfrecon {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input values, broken invariants, corrupt file contents. CLI exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Filesystem failures. CLI exit code 2.
class IoError : public Error {
public:
    using Error::Error;
};

class PlacementError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DeviceInsideBuildingError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ExtentMismatchError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DimensionMismatchError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class LabelMismatchError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class CorruptFormatError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvariantViolationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class MissingFileError : public IoError {
public:
    using IoError::IoError;
};

} // namespace rfrecon
