// Copyright 2026 The til Authors
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

// JSON file formats.
//
//   matrix   {"dim": n, "re": [[...]], "im": [[...]]}   (row-major; rectangular
//            matrices carry "rows" and "cols" instead of "dim")
//   channel  {"dim_in": a, "dim_out": b, "kraus": [matrix, ...]}
//   instance {"sigma": matrix, "tau": matrix, "channel": channel, "seed": s}

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "til/channels.hpp"
#include "til/linalg.hpp"

namespace til {

using Json = nlohmann::ordered_json;

/// Parse or validation failure with one entry per offending field.
class InputError : public std::runtime_error {
 public:
  explicit InputError(std::vector<std::string> items);
  const std::vector<std::string>& items() const { return items_; }

 private:
  std::vector<std::string> items_;
};

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
HermitianMatrix hermitian_from_json(const Json& j);

Json channel_to_json(const Channel& n);
Channel channel_from_json(const Json& j);

struct Instance {
  PsdMatrix sigma;
  DensityMatrix tau;
  Channel channel;
  std::uint64_t seed = 0;
  /// Check parameters of the originating run, when replaying a sweep failure.
  std::optional<Json> params;
};

Json instance_to_json(const Instance& inst);
/// Validates Hermiticity, nonnegativity, unit trace of tau, CPTP and
/// supp(tau) ⊆ supp(sigma), collecting every failure into an InputError.
Instance instance_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace til
