// Copyright 2026 The docinspect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "docinspect/corpus.hpp"

namespace docinspect::fixtures {

// Fixed input for one rule-based error type.
struct GoldenInput {
  std::string error_type;
  ElementKind element = ElementKind::Text;
  std::string input;
};

// One entry per rule-based type, in taxonomy order.
const std::vector<GoldenInput>& golden_inputs();

// {seed, input, output, receipt} for text rules, {seed, input, output, edit}
// for table rules, or {seed, input, error} when the rule refuses the input.
Json golden_line(const GoldenInput& g, std::uint64_t seed);

}  // namespace docinspect::fixtures
