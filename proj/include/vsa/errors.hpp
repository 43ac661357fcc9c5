/*
 Copyright 2026 The vsa authors
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace vsa {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: missing files, malformed manifests, invalid configs,
// vocabulary mismatches. Maps to CLI exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

// Failures during a run: non-finite loss, checkpoint write failures.
// Maps to CLI exit code 3.
class TrainingError : public Error {
public:
    using Error::Error;
};

} // namespace vsa
