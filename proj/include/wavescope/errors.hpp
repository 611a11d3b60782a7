// SPDX-License-Identifier: Apache-2.0
//
// wavescope - indoor RF ray tracing and WiFi radio-map simulation
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
// ------------------------------------------------------------------------

#ifndef WAVESCOPE_ERRORS_HPP
#define WAVESCOPE_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace wavescope
{

// Invalid caller input (bad value, out-of-range location, empty set).
class ArgumentError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// Document failed schema validation. `pointer` is a JSON pointer to the offending element.
class SchemaError : public std::runtime_error
{
  public:
    SchemaError(std::string pointer, const std::string &message)
        : std::runtime_error((pointer.empty() ? std::string("document") : pointer) + ": " + message),
          pointer_(std::move(pointer)) {}

    const std::string &pointer() const { return pointer_; }

  private:
    std::string pointer_;
};

// Referenced identifier (transceiver, scene, map, job) does not exist.
class NotFoundError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Observation streams do not match the radio map's stream set.
class StreamMismatchError : public std::runtime_error
{
  public:
    StreamMismatchError(const std::string &message, std::vector<std::string> expected)
        : std::runtime_error(message), expected_(std::move(expected)) {}

    const std::vector<std::string> &expected() const { return expected_; }

  private:
    std::vector<std::string> expected_;
};

// File could not be read or written.
class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

} // namespace wavescope

#endif
