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

#ifndef WAVESCOPE_DIGEST_HPP
#define WAVESCOPE_DIGEST_HPP

#include <string>
#include <string_view>

namespace wavescope
{

// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

// Fixed-point decimal with `digits` fraction digits ("-31.000").
std::string format_fixed(double value, int digits);

} // namespace wavescope

#endif
